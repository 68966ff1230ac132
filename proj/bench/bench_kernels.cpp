// Timing comparison of the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <vector>

#include "fraclap/kernels.hpp"
#include "fraclap/model.hpp"
#include "fraclap/par.hpp"
#include "fraclap/pipeline.hpp"
#include "fraclap/potentials.hpp"

using namespace fraclap;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_ms(F&& f, int reps = 3) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = Clock::now();
    f();
    auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int level = argc > 1 ? std::atoi(argv[1]) : 5;
  IFSModel model = build_model(ModelName::gasket);
  auto data = build_level(model, level, 20000);
  const SpectralBasis& basis = data->basis;
  const Index n = basis.size();
  std::printf("gasket level %d, %lld vertices, %d threads\n", level,
              static_cast<long long>(n), par::threads());

  CVector w(n);
  for (Index j = 0; j < n; ++j) w[j] = riesz_multiplier(basis.eigenvalues[j], 1.0);
  Vector wr(n);
  for (Index j = 0; j < n; ++j) wr[j] = std::exp(-basis.eigenvalues[j] * 1e-3);

  CMatrix K;
  Matrix H;
  double t_serial, t_par;

  t_serial = time_ms([&] { H = mode_sum_serial(basis.eigenvectors, wr); });
  t_par = time_ms([&] { H = mode_sum(basis.eigenvectors, wr); });
  std::printf("%-28s serial %9.2f ms   omp %9.2f ms   speedup %.2fx\n", "heat mode_sum",
              t_serial, t_par, t_serial / t_par);

  t_serial = time_ms([&] { K = mode_sum_serial(basis.eigenvectors, w); });
  t_par = time_ms([&] { K = mode_sum(basis.eigenvectors, w); });
  std::printf("%-28s serial %9.2f ms   omp %9.2f ms   speedup %.2fx\n", "complex mode_sum",
              t_serial, t_par, t_serial / t_par);

  CVector u(n);
  for (Index i = 0; i < n; ++i) u[i] = std::sin(0.1 * i);
  CVector y;
  t_serial = time_ms([&] { y = kernel_matvec_serial(K, basis.mass, u); }, 10);
  t_par = time_ms([&] { y = kernel_matvec(K, basis.mass, u); }, 10);
  std::printf("%-28s serial %9.2f ms   omp %9.2f ms   speedup %.2fx\n", "kernel matvec",
              t_serial, t_par, t_serial / t_par);

  double hs_s = 0, hs_p = 0;
  t_serial = time_ms([&] { hs_s = weighted_frobenius_serial(K, basis.mass); });
  t_par = time_ms([&] { hs_p = weighted_frobenius(K, basis.mass); });
  std::printf("%-28s serial %9.2f ms   omp %9.2f ms   speedup %.2fx\n", "weighted frobenius",
              t_serial, t_par, t_serial / t_par);

  // Identical bits, not just close.
  CMatrix K2 = mode_sum_serial(basis.eigenvectors, w);
  bool identical = (K2 - K).cwiseAbs().maxCoeff() == 0.0 && hs_s == hs_p;
  std::printf("serial/omp results identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
