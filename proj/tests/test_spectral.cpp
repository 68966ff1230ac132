#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "fraclap/kernels.hpp"
#include "fraclap/model.hpp"
#include "fraclap/spectral.hpp"

using namespace fraclap;

namespace {

SpectralBasis make_basis(ModelName name, int level) {
  static std::vector<std::unique_ptr<ApproxGraph>> keep;
  keep.push_back(std::make_unique<ApproxGraph>(build_model(name), level, 20000));
  EnergyLaplacian el = assemble(*keep.back());
  return eigenbasis(el);
}

// Graph-normalized gasket eigenvalues: mu = (2/3) lambda / 5^m. In this
// normalization consecutive levels are linked by mu -> mu(5 - mu).
std::vector<double> graph_normalized(const SpectralBasis& b) {
  double scale = (2.0 / 3.0) / std::pow(5.0, b.level);
  std::vector<double> mu(b.eigenvalues.data(), b.eigenvalues.data() + b.size());
  for (double& m : mu) m *= scale;
  return mu;
}

}  // namespace

TEST_CASE("interval eigenvalues equal the discrete Neumann cosine values") {
  for (int m : {4, 6, 8}) {
    SpectralBasis b = make_basis(ModelName::interval, m);
    const double n = std::pow(2.0, m);
    for (Index j = 0; j < b.size(); ++j) {
      double exact = 4.0 * n * n * std::pow(std::sin(j * M_PI / (2.0 * n)), 2);
      if (j == 0)
        CHECK(std::abs(b.eigenvalues[0]) < 1e-10);
      else
        CHECK(std::abs(b.eigenvalues[j] - exact) < 1e-10 * exact);
    }
    // lambda_1 approaches pi^2 from below as the level grows.
    CHECK(b.eigenvalues[1] < M_PI * M_PI);
    CHECK(b.eigenvalues[1] > M_PI * M_PI * (1.0 - 1.0 / (n * n)));
  }
}

TEST_CASE("lowest mode is the constant and the basis is M-orthonormal") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    SpectralBasis b = make_basis(name, 4);
    CHECK(std::abs(b.eigenvalues[0]) < 1e-12 * b.eigenvalues[b.size() - 1]);
    CHECK((b.eigenvectors.col(0).array() - b.eigenvectors(0, 0)).abs().maxCoeff() < 1e-8);
    CHECK(b.eigenvectors(0, 0) == doctest::Approx(1.0).epsilon(1e-8));

    Matrix gram = b.eigenvectors.transpose() * b.mass.asDiagonal() * b.eigenvectors;
    CHECK((gram - Matrix::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("pencil residual L phi = lambda M phi is small in the relative sense") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    ApproxGraph g(build_model(name), 4);
    EnergyLaplacian el = assemble(g);
    SpectralBasis b = eigenbasis(el);
    Matrix lhs = el.stiffness * b.eigenvectors;
    Matrix rhs = b.mass.asDiagonal() * b.eigenvectors * b.eigenvalues.asDiagonal();
    double scale = b.eigenvalues[b.size() - 1];
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8 * scale);
  }
}

TEST_CASE("gasket spectra decimate: every coarse eigenvalue is shadowed") {
  std::vector<double> prev;
  for (int m : {1, 2, 3, 4}) {
    std::vector<double> mu = graph_normalized(make_basis(ModelName::gasket, m));
    if (!prev.empty()) {
      // Map fine eigenvalues down with mu(5 - mu), then match the coarse
      // multiset with multiplicity.
      std::vector<double> mapped;
      for (double f : mu) mapped.push_back(f * (5.0 - f));
      std::sort(mapped.begin(), mapped.end());
      std::vector<bool> used(mapped.size(), false);
      for (double c : prev) {
        bool found = false;
        for (std::size_t i = 0; i < mapped.size(); ++i) {
          if (used[i]) continue;
          if (std::abs(mapped[i] - c) <= 1e-8) {
            used[i] = true;
            found = true;
            break;
          }
        }
        CHECK_MESSAGE(found, "coarse eigenvalue ", c, " not shadowed at level ", m);
      }
    }
    prev = std::move(mu);
  }
}

TEST_CASE("heat kernel on the interval approaches the theta-function value") {
  SpectralBasis b = make_basis(ModelName::interval, 8);
  // Continuum Neumann value at the endpoint: 1 + 2 sum e^{-k^2 pi^2 t}.
  double t = 0.1;
  double cont = 1.0;
  for (int k = 1; k <= 60; ++k) cont += 2.0 * std::exp(-k * k * M_PI * M_PI * t);
  CHECK(cont == doctest::Approx(1.7843).epsilon(2e-4));
  // Endpoint vertex: the one with the largest first-mode amplitude.
  Index end = 0;
  for (Index v = 0; v < b.size(); ++v)
    if (b.eigenvectors(v, 1) > b.eigenvectors(end, 1)) end = v;
  double disc = heat_kernel_entry(b, t, 0, end, end);
  CHECK(std::abs(disc - cont) < 1e-4);
}

TEST_CASE("heat kernel slices: positivity, unit mass, semigroup property") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    ApproxGraph g(build_model(name), 4);
    EnergyLaplacian el = assemble(g);
    SpectralBasis b = eigenbasis(el);
    ScalingWindow win = scaling_window(b);
    for (double t : {win.lo, std::sqrt(win.lo * win.hi), win.hi}) {
      HeatKernelSlice h = heat_kernel(b, t, 0);
      CHECK(h.values.minCoeff() > 0.0);
      Vector mass_int = h.values * b.mass;
      CHECK((mass_int.array() - 1.0).abs().maxCoeff() < 1e-12);
      CHECK((h.values - h.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
    // Chapman-Kolmogorov with unequal times.
    double t = win.lo, s = 2.7 * win.lo;
    HeatKernelSlice ht = heat_kernel(b, t, 0), hs = heat_kernel(b, s, 0),
                    hts = heat_kernel(b, t + s, 0);
    Matrix composed = ht.values * b.mass.asDiagonal() * hs.values;
    CHECK((composed - hts.values).cwiseAbs().maxCoeff() < 1e-10 * hts.values.maxCoeff());

    // Large time: only the constant mode survives.
    HeatKernelSlice hinf = heat_kernel(b, 50.0 / b.lambda1(), 0);
    CHECK((hinf.values.array() - 1.0).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("time derivative slice matches central differences at second order") {
  SpectralBasis b = make_basis(ModelName::gasket, 3);
  ScalingWindow win = scaling_window(b);
  double t = std::sqrt(win.lo * win.hi);
  HeatKernelSlice dot = heat_kernel(b, t, 1);

  auto fd_error = [&](double eps) {
    Matrix fd = (heat_kernel(b, t + eps, 0).values - heat_kernel(b, t - eps, 0).values) /
                (2.0 * eps);
    return (fd - dot.values).cwiseAbs().maxCoeff();
  };
  double scale = dot.values.cwiseAbs().maxCoeff();
  CHECK(fd_error(1e-4 * t) < 1e-6 * scale);
  // Halving eps divides the error by about four.
  double e1 = fd_error(2e-3 * t), e2 = fd_error(1e-3 * t);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("derivative slices obey the same envelope shape in the window") {
  SpectralBasis b = make_basis(ModelName::gasket, 4);
  ScalingWindow win = scaling_window(b);
  const double beta = b.resistance_dim / (b.resistance_dim + 1.0);
  for (int k : {1, 2}) {
    double worst = 0;
    for (double t : log_grid(win.lo, win.hi, 7)) {
      HeatKernelSlice s = heat_kernel(b, t, k);
      double bound = std::pow(t, -beta - k);  // envelope up to a constant
      worst = std::max(worst, s.values.cwiseAbs().maxCoeff() / bound);
    }
    CHECK(worst < 50.0);
    CHECK(worst > 1e-3);
  }
}

TEST_CASE("interval heat envelope fit recovers the classical exponents") {
  ApproxGraph g(build_model(ModelName::interval), 8);
  EnergyLaplacian el = assemble(g);
  SpectralBasis b = eigenbasis(el);
  Matrix R = resistance_matrix(el);
  ScalingWindow win = scaling_window(b);

  EnvelopeSamples samples;
  for (Index v = 8; v < b.size(); v += 16) samples.diagonal.push_back(v);
  for (Index i = 0; i < b.size(); i += 7)
    for (Index j = i + 1; j < b.size(); j += 31) samples.pairs.emplace_back(i, j);

  EnvelopeFit fit = heat_envelope_fit(b, R, log_grid(win.lo, win.hi, 24), samples);
  CHECK(std::abs(fit.beta - 0.5) < 0.03);
  CHECK(std::abs(fit.gamma - 1.0) < 0.1);
  CHECK(fit.c_rate == doctest::Approx(0.25).epsilon(0.25));
  CHECK(fit.c_upper >= fit.c_lower);
  CHECK(fit.c_lower > 0.0);
}

TEST_CASE("eigenbasis rejects bad inputs and basis ids are stable") {
  ApproxGraph g(build_model(ModelName::interval), 3);
  EnergyLaplacian el = assemble(g);
  el.mass[2] = 0.0;
  CHECK_THROWS_AS(eigenbasis(el), DomainError);

  EnergyLaplacian ok = assemble(g);
  SpectralBasis b = eigenbasis(ok);
  CHECK(b.basis_id == "interval:m3:n9");
  CHECK_THROWS_AS(heat_kernel(b, 0.0, 0), DomainError);
  CHECK_THROWS_AS(heat_kernel(b, -1.0, 0), DomainError);
}

TEST_CASE("parallel and serial mode sums are bit-identical") {
  SpectralBasis b = make_basis(ModelName::gasket, 3);
  Vector w(b.size());
  for (Index j = 0; j < b.size(); ++j) w[j] = std::exp(-b.eigenvalues[j] * 1e-3);
  Matrix par_m = mode_sum(b.eigenvectors, w);
  Matrix ser_m = mode_sum_serial(b.eigenvectors, w);
  CHECK((par_m - ser_m).cwiseAbs().maxCoeff() == 0.0);

  CVector wc(b.size());
  for (Index j = 0; j < b.size(); ++j) wc[j] = std::polar(1.0, 0.3 * j);
  CMatrix par_c = mode_sum(b.eigenvectors, wc);
  CMatrix ser_c = mode_sum_serial(b.eigenvectors, wc);
  CHECK((par_c - ser_c).cwiseAbs().maxCoeff() == 0.0);

  CVector u(b.size());
  for (Index i = 0; i < b.size(); ++i) u[i] = Complex(std::sin(0.2 * i), std::cos(0.1 * i));
  CHECK((kernel_matvec(par_c, b.mass, u) - kernel_matvec_serial(par_c, b.mass, u))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(weighted_frobenius(par_c, b.mass) == weighted_frobenius_serial(par_c, b.mass));
}
