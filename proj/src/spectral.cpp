#include "fraclap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fraclap/kernels.hpp"
#include "fraclap/par.hpp"

namespace fraclap {

double SpectralBasis::lambda1() const {
  const double floor = 1e-9 * std::max(1.0, eigenvalues[eigenvalues.size() - 1]);
  for (Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] > floor) return eigenvalues[i];
  throw NumericError("no positive eigenvalue found");
}

SpectralBasis eigenbasis(const EnergyLaplacian& el) {
  const Index n = el.stiffness.rows();
  if ((el.mass.array() <= 0).any()) throw DomainError("mass matrix must be strictly positive");

  // Reduce the pencil (L, M) to standard form; M is diagonal so this is exact.
  Vector dinv = el.mass.array().rsqrt();
  Matrix S = dinv.asDiagonal() * el.stiffness * dinv.asDiagonal();
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed to converge");

  Matrix phi = dinv.asDiagonal() * es.eigenvectors();

  // Rayleigh-quotient pass tightens the eigenvalues well past the dense
  // solver's absolute floor; cheap with the sparse stiffness.
  Matrix B = el.stiffness_sparse * phi;
  Vector lam(n);
  for (Index j = 0; j < n; ++j) {
    double num = phi.col(j).dot(B.col(j));
    double den = phi.col(j).dot((el.mass.array() * phi.col(j).array()).matrix());
    lam[j] = num / den;
  }
  for (Index j = 0; j < n; ++j)
    if (lam[j] < 0) lam[j] = 0.0;

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return lam[a] < lam[b]; });

  SpectralBasis basis;
  basis.eigenvalues.resize(n);
  basis.eigenvectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    basis.eigenvalues[j] = lam[order[j]];
    basis.eigenvectors.col(j) = phi.col(order[j]);
  }

  // Sign convention: first entry attaining the max magnitude is positive.
  for (Index j = 0; j < n; ++j) {
    Index arg = 0;
    double best = 0.0;
    for (Index i = 0; i < n; ++i) {
      double a = std::abs(basis.eigenvectors(i, j));
      if (a > best + 1e-14 * best) {
        best = a;
        arg = i;
      }
    }
    if (basis.eigenvectors(arg, j) < 0) basis.eigenvectors.col(j) = -basis.eigenvectors.col(j);
  }

  basis.mass = el.mass;
  basis.level = el.level;
  basis.model_name = el.graph->model().name;
  basis.resistance_dim = el.graph->model().resistance_dim;
  basis.basis_id = to_string(basis.model_name) + ":m" + std::to_string(el.level) + ":n" +
                   std::to_string(n);
  return basis;
}

namespace {

Vector heat_weights(const SpectralBasis& basis, double t, int k) {
  const Index n = basis.size();
  Vector w(n);
  for (Index j = 0; j < n; ++j) {
    double lam = basis.eigenvalues[j];
    double v = std::exp(-lam * t);
    for (int i = 0; i < k; ++i) v *= -lam;
    w[j] = v;
  }
  return w;
}

}  // namespace

HeatKernelSlice heat_kernel(const SpectralBasis& basis, double t, int k) {
  if (t <= 0) throw DomainError("heat kernel requires t > 0");
  if (k < 0) throw DomainError("derivative order must be nonnegative");
  HeatKernelSlice slice;
  slice.time = t;
  slice.derivative_order = k;
  slice.values = mode_sum(basis.eigenvectors, heat_weights(basis, t, k));
  return slice;
}

double heat_kernel_entry(const SpectralBasis& basis, double t, int k, Index x, Index y) {
  if (t <= 0) throw DomainError("heat kernel requires t > 0");
  const Index n = basis.size();
  double acc = 0.0;
  for (Index j = 0; j < n; ++j) {
    double lam = basis.eigenvalues[j];
    double v = std::exp(-lam * t);
    for (int i = 0; i < k; ++i) v *= -lam;
    acc += v * basis.eigenvectors(x, j) * basis.eigenvectors(y, j);
  }
  return acc;
}

ScalingWindow scaling_window(const SpectralBasis& basis, double size_constant) {
  IFSModel model = build_model(basis.model_name);
  const double finest = size_constant * std::pow(model.r(), basis.level);
  ScalingWindow w;
  w.t_min = std::pow(finest, basis.resistance_dim + 1.0);
  w.t_max = 1.0 / basis.lambda1();
  w.lo = 10.0 * w.t_min;
  w.hi = 0.1 * w.t_max;
  if (w.lo >= w.hi) throw NumericError("empty scaling window at this level");
  return w;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1.0));
  return g;
}

namespace {

struct LsqLine {
  double slope{0.0};
  double intercept{0.0};
  double ssr{0.0};
};

LsqLine lsq(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-30) throw NumericError("degenerate regression");
  LsqLine l;
  l.slope = (n * sxy - sx * sy) / det;
  l.intercept = (sy - l.slope * sx) / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (l.intercept + l.slope * x[i]);
    l.ssr += r * r;
  }
  return l;
}

}  // namespace

EnvelopeFit heat_envelope_fit(const SpectralBasis& basis, const Matrix& resistance,
                              const std::vector<double>& t_grid,
                              const EnvelopeSamples& samples, const EnvelopeFitOptions& opts) {
  if (t_grid.size() < 4 || samples.diagonal.empty() || samples.pairs.empty())
    throw DomainError("heat_envelope_fit: not enough samples");
  const double span = std::log10(t_grid.back() / t_grid.front());
  if (span < 0.3) throw DomainError("heat_envelope_fit: window too narrow");

  const double d = basis.resistance_dim;

  // On-diagonal slope gives beta.
  std::vector<double> lx, ly;
  for (double t : t_grid)
    for (Index x : samples.diagonal) {
      double h = heat_kernel_entry(basis, t, 0, x, x);
      if (h <= 0) throw NumericError("nonpositive on-diagonal heat value");
      lx.push_back(std::log(t));
      ly.push_back(std::log(h));
    }
  LsqLine beta_line = lsq(lx, ly);

  EnvelopeFit fit;
  fit.beta = -beta_line.slope;
  fit.beta_residual_rms = std::sqrt(beta_line.ssr / lx.size());

  // Off-diagonal samples: z = log(t^beta h) against w = (R^(d+1)/t)^gamma.
  struct Sample {
    double base;  // R^(d+1)/t
    double z;
  };
  std::vector<Sample> raw;
  for (double t : t_grid)
    for (auto [x, y] : samples.pairs) {
      double h = heat_kernel_entry(basis, t, 0, x, y);
      if (h <= 0) continue;  // outside the reliable range
      double base = std::pow(resistance(x, y), d + 1.0) / t;
      raw.push_back({base, std::log(h) + fit.beta * std::log(t)});
    }

  auto ssr_at = [&](double gamma, LsqLine* out) {
    std::vector<double> w, z;
    for (const Sample& s : raw) {
      double wv = std::pow(s.base, gamma);
      if (wv < opts.w_min || wv > opts.w_max) continue;
      w.push_back(wv);
      z.push_back(s.z);
    }
    if (w.size() < 20) throw DomainError("heat_envelope_fit: window too narrow");
    LsqLine l = lsq(w, z);
    if (out) *out = l;
    return l.ssr / w.size();
  };

  // Coarse grid then ternary refinement; deterministic.
  double best_gamma = opts.gamma_min, best = std::numeric_limits<double>::infinity();
  for (double g = opts.gamma_min; g <= opts.gamma_max + 1e-12; g += 0.05) {
    double v = ssr_at(g, nullptr);
    if (v < best) {
      best = v;
      best_gamma = g;
    }
  }
  double a = std::max(opts.gamma_min, best_gamma - 0.05);
  double b = std::min(opts.gamma_max, best_gamma + 0.05);
  for (int it = 0; it < 60; ++it) {
    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (ssr_at(m1, nullptr) < ssr_at(m2, nullptr))
      b = m2;
    else
      a = m1;
  }
  fit.gamma = 0.5 * (a + b);

  LsqLine line;
  double mean_ssr = ssr_at(fit.gamma, &line);
  fit.c_rate = -line.slope;
  fit.residual_rms = std::sqrt(mean_ssr);

  double cu = -std::numeric_limits<double>::infinity();
  double cl = std::numeric_limits<double>::infinity();
  long used = 0;
  for (const Sample& s : raw) {
    double wv = std::pow(s.base, fit.gamma);
    if (wv < opts.w_min || wv > opts.w_max) continue;
    double c = s.z + fit.c_rate * wv;
    cu = std::max(cu, c);
    cl = std::min(cl, c);
    ++used;
  }
  fit.c_upper = std::exp(cu);
  fit.c_lower = std::exp(cl);
  fit.sample_count = used + static_cast<long>(lx.size());
  return fit;
}

}  // namespace fraclap
