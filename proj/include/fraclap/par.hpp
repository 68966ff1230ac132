#pragma once

#include <cstddef>

#include "fraclap/types.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fraclap::par {

// Global worker count. set_threads(1) forces fully sequential execution;
// results are identical either way because every parallel loop writes
// disjoint output slots and keeps a fixed per-slot summation order.
int threads();
void set_threads(int n);

template <class F>
void for_index(Index n, F&& f) {
#ifdef _OPENMP
  if (threads() > 1) {
#pragma omp parallel for schedule(static) num_threads(threads())
    for (Index i = 0; i < n; ++i) f(i);
    return;
  }
#endif
  for (Index i = 0; i < n; ++i) f(i);
}

// Fixed-order pairwise summation; independent of thread count.
double pairwise_sum(const double* x, std::size_t n);
Complex pairwise_sum(const Complex* x, std::size_t n);

}  // namespace fraclap::par
