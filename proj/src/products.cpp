#include "fraclap/products.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fraclap/gamma.hpp"
#include "fraclap/par.hpp"

namespace fraclap {

ProductBasis product_basis(const SpectralBasis& factor, int copies, Index tensor_cap) {
  if (copies < 2) throw DomainError("product basis needs at least 2 copies");
  ProductBasis pb;
  pb.factor = &factor;
  pb.copies = copies;
  double total = std::pow(static_cast<double>(factor.size()), copies);
  if (total > static_cast<double>(tensor_cap)) return pb;  // sampled evaluation only

  pb.tensor_built = true;
  const Index flat = static_cast<Index>(total);
  pb.eigenvalues.resize(flat);
  pb.index_map.resize(flat);
  std::vector<int> idx(copies, 0);
  for (Index f = 0; f < flat; ++f) {
    double sum = 0;
    for (int c = 0; c < copies; ++c) sum += factor.eigenvalues[idx[c]];
    pb.eigenvalues[f] = sum;
    pb.index_map[f] = idx;
    for (int c = copies - 1; c >= 0; --c) {
      if (++idx[c] < factor.size()) break;
      idx[c] = 0;
    }
  }
  return pb;
}

double product_heat_kernel(const SpectralBasis& factor, int copies, double t,
                           const ProductPoint& x, const ProductPoint& y) {
  if (static_cast<int>(x.size()) != copies || static_cast<int>(y.size()) != copies)
    throw DomainError("product point arity mismatch");
  double v = 1.0;
  for (int c = 0; c < copies; ++c) v *= heat_kernel_entry(factor, t, 0, x[c], y[c]);
  return v;
}

double product_heat_tensor_sum(const ProductBasis& pb, double t, const ProductPoint& x,
                               const ProductPoint& y) {
  if (!pb.tensor_built) throw DomainError("tensor basis not built at this size");
  const SpectralBasis& f = *pb.factor;
  const Index flat = pb.eigenvalues.size();
  std::vector<double> terms(flat);
  for (Index k = 0; k < flat; ++k) {
    double v = std::exp(-pb.eigenvalues[k] * t);
    for (int c = 0; c < pb.copies; ++c) {
      int n = pb.index_map[k][c];
      v *= f.eigenvectors(x[c], n) * f.eigenvectors(y[c], n);
    }
    terms[k] = v;
  }
  return par::pairwise_sum(terms.data(), terms.size());
}

double ProductMetric::operator()(const ProductPoint& x, const ProductPoint& y) const {
  const double p = (d + 1.0) * gamma;
  double acc = 0;
  for (int c = 0; c < copies; ++c)
    acc += std::pow((*factor_resistance)(x[c], y[c]), p);
  return std::pow(acc, 1.0 / p);
}

ProductKernelEvaluator::ProductKernelEvaluator(const SpectralBasis& factor, int copies,
                                               KernelFamily family, Complex alpha)
    : factor_(&factor), copies_(copies), family_(family), alpha_(alpha) {
  if (family != KernelFamily::riesz_imaginary && family != KernelFamily::bessel &&
      family != KernelFamily::bessel_imaginary)
    throw DomainError("product kernels: family must be riesz, bessel or bessel_imaginary");
  if (copies == 2) {
    const Index n = factor.size();
    table_.resize(n, n);
    par::for_index(n, [&](Index i) {
      for (Index j = 0; j < n; ++j)
        table_(i, j) = multiplier(factor.eigenvalues[i] + factor.eigenvalues[j]);
    });
  } else if (std::pow(static_cast<double>(factor.size()), copies) > 1e7) {
    throw DomainError("product basis too large without sampling; use 2 copies");
  }
}

Complex ProductKernelEvaluator::multiplier(double lambda_sum) const {
  switch (family_) {
    case KernelFamily::riesz_imaginary:
      return riesz_multiplier(lambda_sum, alpha_.imag());
    case KernelFamily::bessel:
      return bessel_multiplier(lambda_sum, alpha_);
    case KernelFamily::bessel_imaginary:
      return bessel_imag_multiplier(lambda_sum, alpha_.imag());
    default:
      return {0, 0};
  }
}

namespace {

// Component factors phi_n(x_c) phi_n(y_c), optionally weighted by -lambda_n.
Vector pair_profile(const SpectralBasis& f, Index x, Index y, bool laplacian) {
  const Index n = f.size();
  Vector a(n);
  for (Index k = 0; k < n; ++k) {
    double v = f.eigenvectors(x, k) * f.eigenvectors(y, k);
    if (laplacian) v *= -f.eigenvalues[k];
    a[k] = v;
  }
  return a;
}

}  // namespace

Complex ProductKernelEvaluator::entry(const ProductPoint& x, const ProductPoint& y) const {
  return entry_factor_laplacian(x, y, -1);
}

Complex ProductKernelEvaluator::entry_factor_laplacian(const ProductPoint& x,
                                                       const ProductPoint& y, int li) const {
  const SpectralBasis& f = *factor_;
  if (copies_ == 2) {
    Vector a = pair_profile(f, x[0], y[0], li == 0);
    Vector b = pair_profile(f, x[1], y[1], li == 1);
    const Index n = f.size();
    Complex acc{0, 0};
    for (Index i = 0; i < n; ++i) {
      Complex inner{0, 0};
      for (Index j = 0; j < n; ++j) inner += table_(i, j) * b[j];
      acc += a[i] * inner;
    }
    return acc;
  }
  // Generic multi-index sum.
  std::vector<Vector> prof(copies_);
  for (int c = 0; c < copies_; ++c) prof[c] = pair_profile(f, x[c], y[c], c == li);
  const Index n = f.size();
  std::vector<int> idx(copies_, 0);
  Complex acc{0, 0};
  while (true) {
    double lam = 0;
    double p = 1;
    for (int c = 0; c < copies_; ++c) {
      lam += f.eigenvalues[idx[c]];
      p *= prof[c][idx[c]];
    }
    acc += multiplier(lam) * p;
    int c = copies_ - 1;
    while (c >= 0 && ++idx[c] == n) idx[c--] = 0;
    if (c < 0) break;
  }
  return acc;
}

Complex ProductKernelEvaluator::quadrature_entry(const ProductPoint& x, const ProductPoint& y,
                                                 const QuadratureConfig& cfg) const {
  const SpectralBasis& f = *factor_;
  bool diagonal = true;
  for (int c = 0; c < copies_; ++c)
    if (x[c] != y[c]) diagonal = false;
  if (diagonal) throw DomainError("product quadrature route is defined off the diagonal");

  auto h_parts = [&](double t, std::vector<double>& h, std::vector<double>& hdot) {
    for (int c = 0; c < copies_; ++c) {
      h[c] = heat_kernel_entry(f, t, 0, x[c], y[c]);
      hdot[c] = heat_kernel_entry(f, t, 1, x[c], y[c]);
    }
  };

  if (family_ == KernelFamily::riesz_imaginary) {
    const double a = alpha_.imag();
    auto g = [&](double u) -> Complex {
      double t = std::exp(u);
      if (t > 700.0) return {0, 0};
      std::vector<double> h(copies_), hdot(copies_);
      h_parts(t, h, hdot);
      double minus_d1 = 0;  // -Delta_1 h^N = -(d/dt) prod h
      for (int c = 0; c < copies_; ++c) {
        double prod = -hdot[c];
        for (int j = 0; j < copies_; ++j)
          if (j != c) prod *= h[j];
        minus_d1 += prod;
      }
      return minus_d1 * t * std::polar(1.0, -a * u);
    };
    Complex integral = integrate_log_axis(g, 0.0, std::abs(a), cfg);
    return integral / complex_gamma(Complex(1.0, -a));
  }

  if (family_ == KernelFamily::bessel) {
    auto g = [&](double u) -> Complex {
      double t = std::exp(u);
      if (t > 700.0) return {0, 0};
      std::vector<double> h(copies_), hdot(copies_);
      h_parts(t, h, hdot);
      double prod = 1;
      for (int c = 0; c < copies_; ++c) prod *= h[c];
      double ex = -t - alpha_.real() * u;
      return prod * std::exp(ex) * std::polar(1.0, -alpha_.imag() * u);
    };
    Complex integral = integrate_log_axis(g, 0.0, std::abs(alpha_.imag()), cfg);
    return integral / complex_gamma(-alpha_);
  }

  // bessel_imaginary: off the diagonal the product heat entry vanishes at
  // t = 0, so the transform converges without regularization.
  const double a = alpha_.imag();
  auto g = [&](double u) -> Complex {
    double t = std::exp(u);
    if (t > 700.0) return {0, 0};
    std::vector<double> h(copies_), hdot(copies_);
    h_parts(t, h, hdot);
    double prod = 1;
    for (int c = 0; c < copies_; ++c) prod *= h[c];
    return prod * std::exp(-t) * std::polar(1.0, -a * u);
  };
  Complex integral = integrate_log_axis(g, 0.0, std::abs(a), cfg);
  Complex c_alpha = 1.0 / complex_gamma(Complex(1.0, -a));
  return Complex(0.0, -a) * c_alpha * integral;
}

std::vector<std::pair<ProductPoint, ProductPoint>> sample_product_pairs(
    Index factor_size, const ProductMetric& metric, const ProductSampleConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::pair<ProductPoint, ProductPoint>> out;
  std::map<int, long> bin_count;
  const long attempts = cfg.pair_budget * 50;
  for (long it = 0; it < attempts && static_cast<long>(out.size()) < cfg.pair_budget; ++it) {
    ProductPoint x(metric.copies), y(metric.copies);
    for (int c = 0; c < metric.copies; ++c) {
      x[c] = static_cast<Index>(rng() % factor_size);
      y[c] = static_cast<Index>(rng() % factor_size);
    }
    double R = metric(x, y);
    if (R <= 0) continue;  // product diagonal
    int bin = static_cast<int>(std::floor(std::log10(R) * cfg.bins_per_decade));
    if (bin_count[bin] >= cfg.per_bin_cap) continue;
    ++bin_count[bin];
    out.emplace_back(std::move(x), std::move(y));
  }
  if (out.size() < 20) throw DomainError("not enough product pairs sampled");
  return out;
}

namespace {

BoundReport product_bound_core(const std::vector<ProductLevelView>& levels, double target,
                               const ProductSampleConfig& cfg, const SizeBoundOptions& opts,
                               bool laplacian, const std::string& id) {
  BoundReport rep;
  rep.estimate_id = id;
  std::vector<std::pair<double, double>> cloud;
  for (const auto& view : levels) {
    auto pairs = sample_product_pairs(view.evaluator->factor().size(), *view.metric, cfg);
    std::vector<double> vals(pairs.size());
    par::for_index(static_cast<Index>(pairs.size()), [&](Index i) {
      const auto& [x, y] = pairs[i];
      if (!laplacian) {
        vals[i] = std::abs(view.evaluator->entry(x, y));
      } else {
        double worst = 0;
        for (int c = 0; c < view.evaluator->copies(); ++c)
          worst = std::max(worst, std::abs(view.evaluator->entry_factor_laplacian(x, y, c)));
        vals[i] = worst;
      }
    });
    double c_level = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      double R = (*view.metric)(pairs[i].first, pairs[i].second);
      cloud.emplace_back(R, vals[i]);
      c_level = std::max(c_level, vals[i] * std::pow(R, target));
    }
    rep.per_level_constants.emplace_back(view.level, c_level);
    rep.sample_count += static_cast<long>(pairs.size());
  }
  PowerLawFit fit = fit_power_law_envelope(cloud, cfg.bins_per_decade, 20, opts.min_decades);
  rep.fitted_exponent = fit.exponent;
  rep.target_exponent = target;
  rep.exponent_tolerance = target * opts.exponent_tol_frac;
  rep.drift_cap = opts.drift_cap;
  double cmax = 0, cmin = std::numeric_limits<double>::infinity();
  for (auto& [lvl, c] : rep.per_level_constants) {
    cmax = std::max(cmax, c);
    cmin = std::min(cmin, c);
  }
  rep.drift = (cmin > 0) ? cmax / cmin : 1.0;
  bool exp_ok = opts.two_sided ? std::abs(rep.fitted_exponent - target) <= rep.exponent_tolerance
                               : rep.fitted_exponent >= target - rep.exponent_tolerance;
  rep.pass = exp_ok && rep.drift <= opts.drift_cap;
  rep.details["fit_residual_rms"] = fit.residual_rms;
  return rep;
}

}  // namespace

BoundReport verify_product_size(const std::vector<ProductLevelView>& levels, double d,
                                const ProductSampleConfig& cfg, const SizeBoundOptions& opts) {
  const int N = levels.front().evaluator->copies();
  return product_bound_core(levels, N * d, cfg, opts, false, "product_size");
}

BoundReport verify_product_laplacian(const std::vector<ProductLevelView>& levels, double d,
                                     const ProductSampleConfig& cfg,
                                     const SizeBoundOptions& opts) {
  const int N = levels.front().evaluator->copies();
  return product_bound_core(levels, (N + 1) * d + 1.0, cfg, opts, true, "product_smooth");
}

BoundReport verify_product_holder(const std::vector<ProductLevelView>& levels, double d,
                                  const ProductHolderConfig& cfg) {
  BoundReport rep;
  rep.estimate_id = "product_holder";
  rep.parameter = "c=" + std::to_string(cfg.c);

  std::vector<double> lrho, lval;
  for (const auto& view : levels) {
    const ApproxGraph& g = *view.graph;
    const ProductMetric& metric = *view.metric;
    const int N = view.evaluator->copies();
    const double target = N * d;
    const Index n = view.evaluator->factor().size();
    std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ull * (view.level + 1)));

    double c_level = 0;
    long used = 0;
    long attempts = cfg.triple_budget * 200;
    for (long it = 0; it < attempts && used < cfg.triple_budget; ++it) {
      // y and ybar differ in one component along a graph edge.
      const Edge& e = g.edges()[rng() % g.edges().size()];
      int comp = static_cast<int>(rng() % N);
      ProductPoint y(N), yb(N), x(N);
      for (int c = 0; c < N; ++c) {
        y[c] = static_cast<Index>(rng() % n);
        yb[c] = y[c];
        x[c] = static_cast<Index>(rng() % n);
      }
      y[comp] = e.p;
      yb[comp] = e.q;
      double ryy = metric(y, yb);
      double rxy = metric(x, y);
      if (rxy < cfg.c * ryy) continue;
      double rho = ryy / metric(x, yb);
      double diff = std::abs(view.evaluator->entry(x, y) - view.evaluator->entry(x, yb));
      if (diff <= 0 || rho <= 0) continue;
      lrho.push_back(std::log(rho));
      lval.push_back(std::log(diff * std::pow(rxy, target)));
      c_level = std::max(c_level, diff * std::pow(rxy, target) / std::sqrt(rho));
      ++used;
    }
    if (used > 0) rep.per_level_constants.emplace_back(view.level, c_level);
    rep.sample_count += used;
  }
  if (rep.sample_count < 20)
    throw DomainError("verify_product_holder: not enough admissible triples");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lrho.size(); ++i) {
    sx += lrho[i];
    sy += lval[i];
    sxx += lrho[i] * lrho[i];
    sxy += lrho[i] * lval[i];
  }
  double nn = static_cast<double>(lrho.size());
  double det = nn * sxx - sx * sx;
  if (std::abs(det) < 1e-30) throw DomainError("degenerate regression");
  rep.fitted_exponent = (nn * sxy - sx * sy) / det;
  rep.target_exponent = 0.5;
  rep.exponent_tolerance = 0.5 - cfg.min_exponent;
  double cmax = 0, cmin = std::numeric_limits<double>::infinity();
  for (auto& [lvl, c] : rep.per_level_constants) {
    cmax = std::max(cmax, c);
    cmin = std::min(cmin, c);
  }
  rep.drift = (rep.per_level_constants.size() > 1 && cmin > 0) ? cmax / cmin : 1.0;
  rep.drift_cap = cfg.drift_cap;
  rep.pass = rep.fitted_exponent >= cfg.min_exponent && rep.drift <= cfg.drift_cap;
  return rep;
}

}  // namespace fraclap
