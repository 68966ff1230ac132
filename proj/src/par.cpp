#include "fraclap/par.hpp"

#include <algorithm>
#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fraclap::par {

namespace {
std::atomic<int> g_threads{0};  // 0 = not set yet, use hardware default
}

int threads() {
  int t = g_threads.load(std::memory_order_relaxed);
  if (t > 0) return t;
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

void set_threads(int n) { g_threads.store(std::max(1, n), std::memory_order_relaxed); }

namespace {

template <class T>
T pairwise_impl(const T* x, std::size_t n) {
  if (n <= 32) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_impl(x, h) + pairwise_impl(x + h, n - h);
}

}  // namespace

double pairwise_sum(const double* x, std::size_t n) { return pairwise_impl(x, n); }
Complex pairwise_sum(const Complex* x, std::size_t n) { return pairwise_impl(x, n); }

}  // namespace fraclap::par
