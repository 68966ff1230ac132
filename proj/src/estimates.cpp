#include "fraclap/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fraclap/kernels.hpp"
#include "fraclap/par.hpp"

namespace fraclap {

namespace {

struct LsqLine {
  double slope{0.0}, intercept{0.0}, ssr{0.0};
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
  if (std::abs(det) < 1e-30) throw DomainError("degenerate regression");
  LsqLine l;
  l.slope = (n * sxy - sx * sy) / det;
  l.intercept = (sy - l.slope * sx) / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (l.intercept + l.slope * x[i]);
    l.ssr += r * r;
  }
  return l;
}

PowerLawFit fit_from_loglog(const std::vector<double>& lr, const std::vector<double>& lk,
                            long n_raw) {
  LsqLine line = lsq(lr, lk);
  PowerLawFit fit;
  fit.exponent = -line.slope;
  fit.constant = std::exp(line.intercept);
  fit.residual_rms = std::sqrt(line.ssr / lr.size());
  fit.sample_count = n_raw;
  return fit;
}

double span_decades(const std::vector<double>& logs) {
  auto [mn, mx] = std::minmax_element(logs.begin(), logs.end());
  return (*mx - *mn) / std::log(10.0);
}

}  // namespace

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples,
                          int min_samples, double min_decades) {
  std::vector<double> lr, lk;
  for (auto [R, K] : samples) {
    if (R <= 0 || K <= 0) continue;
    lr.push_back(std::log(R));
    lk.push_back(std::log(K));
  }
  if (static_cast<int>(lr.size()) < min_samples)
    throw DomainError("fit_power_law: not enough positive samples");
  if (span_decades(lr) < min_decades)
    throw DomainError("fit_power_law: insufficient dynamic range");
  return fit_from_loglog(lr, lk, static_cast<long>(lr.size()));
}

PowerLawFit fit_power_law_envelope(const std::vector<std::pair<double, double>>& samples,
                                   int bins_per_decade, int min_samples, double min_decades) {
  std::vector<std::pair<double, double>> pos;
  for (auto s : samples)
    if (s.first > 0 && s.second > 0) pos.push_back(s);
  if (static_cast<int>(pos.size()) < min_samples)
    throw DomainError("fit_power_law: not enough positive samples");

  double lmin = std::log10(pos[0].first), lmax = lmin;
  for (auto [R, K] : pos) {
    lmin = std::min(lmin, std::log10(R));
    lmax = std::max(lmax, std::log10(R));
  }
  if (lmax - lmin < min_decades) throw DomainError("fit_power_law: insufficient dynamic range");

  const int nbins = std::max(2, static_cast<int>((lmax - lmin) * bins_per_decade) + 1);
  std::vector<double> best_val(nbins, 0.0), best_r(nbins, 0.0);
  for (auto [R, K] : pos) {
    int b = std::min(nbins - 1,
                     static_cast<int>((std::log10(R) - lmin) * bins_per_decade));
    if (K > best_val[b]) {
      best_val[b] = K;
      best_r[b] = R;
    }
  }
  std::vector<double> lr, lk;
  for (int b = 0; b < nbins; ++b)
    if (best_val[b] > 0) {
      lr.push_back(std::log(best_r[b]));
      lk.push_back(std::log(best_val[b]));
    }
  if (lr.size() < 3) throw DomainError("fit_power_law: insufficient dynamic range");
  return fit_from_loglog(lr, lk, static_cast<long>(pos.size()));
}

namespace {

void finish_report(BoundReport& rep, double target, double tol, bool two_sided,
                   double drift_cap) {
  rep.target_exponent = target;
  rep.exponent_tolerance = tol;
  rep.drift_cap = drift_cap;
  double cmax = 0, cmin = std::numeric_limits<double>::infinity();
  for (auto& [lvl, c] : rep.per_level_constants) {
    cmax = std::max(cmax, c);
    cmin = std::min(cmin, c);
  }
  rep.drift = (cmin > 0) ? cmax / cmin : 1.0;
  bool exp_ok = two_sided ? std::abs(rep.fitted_exponent - target) <= tol
                          : rep.fitted_exponent >= target - tol;
  rep.pass = exp_ok && rep.drift <= drift_cap;
}

BoundReport bound_core(const std::vector<KernelLevelView>& levels,
                       const std::function<CMatrix(const KernelLevelView&)>& field,
                       double weight_exp, double target, const SizeBoundOptions& opts,
                       const std::string& id) {
  BoundReport rep;
  rep.estimate_id = id;
  std::vector<std::pair<double, double>> cloud;
  bool any_nonzero = false;
  for (const auto& view : levels) {
    CMatrix K = field(view);
    const Matrix& R = *view.resistance;
    const Index n = K.rows();
    double c_level = 0.0;
    for (Index x = 0; x < n; ++x)
      for (Index y = x + 1; y < n; ++y) {
        double a = std::abs(K(x, y));
        if (a > 0) any_nonzero = true;
        cloud.emplace_back(R(x, y), a);
        c_level = std::max(c_level, a * std::pow(R(x, y), weight_exp));
      }
    rep.per_level_constants.emplace_back(view.level, c_level);
    rep.sample_count += static_cast<long>(n * (n - 1) / 2);
  }
  if (!any_nonzero) {
    rep.fitted_exponent = target;
    finish_report(rep, target, target * opts.exponent_tol_frac, opts.two_sided,
                  opts.drift_cap);
    rep.pass = true;  // zero kernel satisfies the bound with constant 0
    return rep;
  }
  PowerLawFit fit = fit_power_law_envelope(cloud, 8, 20, opts.min_decades);
  rep.fitted_exponent = fit.exponent;
  rep.details["fit_constant"] = fit.constant;
  rep.details["fit_residual_rms"] = fit.residual_rms;
  finish_report(rep, target, target * opts.exponent_tol_frac, opts.two_sided, opts.drift_cap);
  return rep;
}

}  // namespace

BoundReport verify_size_bound(const std::vector<KernelLevelView>& levels, double d,
                              const SizeBoundOptions& opts) {
  return bound_core(
      levels, [](const KernelLevelView& v) { return *v.kernel; }, d, d, opts, "size");
}

BoundReport verify_laplacian_bound(const std::vector<KernelLevelView>& levels, double d,
                                   const SizeBoundOptions& opts) {
  auto second_laplacian = [](const KernelLevelView& v) {
    // Delta_2 K = -K L M^{-1}, the discrete Laplacian applied to kernel columns.
    CMatrix KL = *v.kernel * v.el->stiffness_sparse.cast<Complex>();
    for (Index y = 0; y < KL.cols(); ++y) KL.col(y) /= -v.el->mass[y];
    return KL;
  };
  return bound_core(levels, second_laplacian, 2.0 * d + 1.0, 2.0 * d + 1.0, opts,
                    "laplacian_smooth");
}

HolderConfig default_holder_config(const IFSModel& model) {
  HolderConfig cfg;
  const double r = model.r();
  int k0 = 1;
  while (std::pow(r, k0) >= 1.0 / 3.0) ++k0;
  cfg.k0 = k0;
  cfg.c = std::pow(r, -3 - k0) * 1.0001;
  return cfg;
}

BoundReport verify_holder(const std::vector<KernelLevelView>& levels, double d,
                          const HolderConfig& cfg) {
  BoundReport rep;
  rep.estimate_id = "holder";
  rep.parameter = "c=" + std::to_string(cfg.c);

  std::vector<double> lrho, lval;
  for (const auto& view : levels) {
    const CMatrix& K = *view.kernel;
    const Matrix& R = *view.resistance;
    const ApproxGraph& g = *view.el->graph;
    const Index n = K.rows();

    // Near pairs at the two finest scales.
    std::vector<std::pair<Index, Index>> near;
    for (const Edge& e : g.edges()) near.emplace_back(e.p, e.q);
    if (g.level() >= 1)
      for (const Word& w : g.words_at_level(g.level() - 1)) {
        auto b = g.cell_boundary(w);
        for (std::size_t i = 0; i < b.size(); ++i)
          for (std::size_t j = i + 1; j < b.size(); ++j) near.emplace_back(b[i], b[j]);
      }

    std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ull * (view.level + 1)));
    double c_level = 0.0;
    long used = 0;
    for (auto [y, yb] : near) {
      double ryy = R(y, yb);
      std::vector<Index> far;
      for (Index x = 0; x < n; ++x)
        if (R(x, y) >= cfg.c * ryy && x != y && x != yb) far.push_back(x);
      if (far.empty()) continue;
      long take = std::max<long>(1, cfg.pair_budget / static_cast<long>(near.size()));
      for (long t = 0; t < take; ++t) {
        Index x = far[rng() % far.size()];
        double rho = ryy / R(x, yb);
        double diff = std::abs(K(x, y) - K(x, yb));
        if (diff <= 0 || rho <= 0) continue;
        lrho.push_back(std::log(rho));
        lval.push_back(std::log(diff * std::pow(R(x, y), d)));
        c_level = std::max(c_level, diff * std::pow(R(x, y), d) / std::sqrt(rho));
        ++used;
      }
    }
    if (used > 0) rep.per_level_constants.emplace_back(view.level, c_level);
    rep.sample_count += used;
  }
  if (rep.sample_count < 20)
    throw DomainError("verify_holder: not enough admissible triples at this level");

  LsqLine line = lsq(lrho, lval);
  rep.fitted_exponent = line.slope;
  rep.details["ratio_decades"] = span_decades(lrho);
  rep.details["fit_residual_rms"] = std::sqrt(line.ssr / lrho.size());
  rep.target_exponent = 0.5;
  rep.exponent_tolerance = 0.5 - cfg.min_exponent;
  rep.drift_cap = cfg.drift_cap;
  double cmax = 0, cmin = std::numeric_limits<double>::infinity();
  for (auto& [lvl, c] : rep.per_level_constants) {
    cmax = std::max(cmax, c);
    cmin = std::min(cmin, c);
  }
  rep.drift = (rep.per_level_constants.size() > 1 && cmin > 0) ? cmax / cmin : 1.0;
  rep.pass = rep.fitted_exponent >= cfg.min_exponent && rep.drift <= cfg.drift_cap;
  return rep;
}

BoundReport verify_int_exp(const Matrix& resistance, const Vector& mass, double d,
                           double gamma, double c_rate, const std::vector<double>& t_grid,
                           const std::vector<Index>& centers, double band_cap) {
  if (t_grid.size() < 4) throw DomainError("verify_int_exp: t grid too small");
  BoundReport rep;
  rep.estimate_id = "int_exp";
  const Index n = mass.size();
  const double beta = d / (d + 1.0);
  double ratio_max = 0, ratio_min = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    for (Index y : centers) {
      std::vector<double> terms(n);
      for (Index x = 0; x < n; ++x) {
        double w = std::pow(std::pow(resistance(x, y), d + 1.0) / t, gamma);
        terms[x] = std::exp(-c_rate * w) * mass[x];
      }
      double integral = par::pairwise_sum(terms.data(), terms.size());
      double ratio = integral / std::pow(t, beta);
      ratio_max = std::max(ratio_max, ratio);
      ratio_min = std::min(ratio_min, ratio);
      ++rep.sample_count;
    }
  }
  rep.details["ratio_max"] = ratio_max;
  rep.details["ratio_min"] = ratio_min;
  rep.details["t_decades"] = std::log10(t_grid.back() / t_grid.front());
  rep.drift = ratio_max / ratio_min;
  rep.drift_cap = band_cap;
  rep.pass = rep.drift <= band_cap;
  return rep;
}

namespace {

double lp_norm(const CVector& u, const Vector& mass, double p) {
  double acc = 0;
  for (Index i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u[i]), p) * mass[i];
  return std::pow(acc, 1.0 / p);
}

}  // namespace

double lp_norm_estimate(const KernelField& kf, double p, int trials, std::uint64_t seed,
                        const SpectralBasis* basis) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("lp_norm_estimate requires 1 < p < inf");
  const Index n = kf.values.rows();
  std::mt19937_64 rng(seed);
  auto uniform = [&]() { return (rng() >> 11) * 0x1.0p-53; };
  auto normal = [&]() {
    double u1 = std::max(uniform(), 1e-300), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };

  double best = 0.0;
  auto try_u = [&](const CVector& u) {
    double nu = lp_norm(u, kf.mass, p);
    if (nu <= 0) return;
    best = std::max(best, lp_norm(apply_kernel(kf, u), kf.mass, p) / nu);
  };

  // Point masses stress the L1 end.
  const Index stride = std::max<Index>(1, n / std::max(1, trials));
  for (Index y = 0; y < n; y += stride) {
    CVector u = CVector::Zero(n);
    u[y] = 1.0;
    try_u(u);
  }
  // Random dense and sign-pattern functions.
  for (int t = 0; t < trials; ++t) {
    CVector u(n);
    for (Index i = 0; i < n; ++i) u[i] = normal();
    try_u(u);
    for (Index i = 0; i < n; ++i) u[i] = (rng() & 1) ? 1.0 : -1.0;
    try_u(u);
  }
  // High-frequency stress from the top of the spectrum.
  if (basis) {
    const Index top = std::min<Index>(8, n);
    for (Index j = 0; j < top; ++j) {
      try_u(basis->eigenvectors.col(n - 1 - j).cast<Complex>());
      try_u(basis->eigenvectors.col(j).cast<Complex>());
    }
    for (int t = 0; t < std::min(trials, 8); ++t) {
      CVector u = CVector::Zero(n);
      for (Index j = 0; j < top; ++j)
        u += normal() * basis->eigenvectors.col(n - 1 - j).cast<Complex>();
      try_u(u);
    }
  }
  return best;
}

BoundReport verify_lp_norms(const std::vector<KernelLevelView>& levels,
                            const std::vector<const SpectralBasis*>& bases, double p,
                            int trials, std::uint64_t seed, double drift_cap) {
  BoundReport rep;
  rep.estimate_id = "lp_norms";
  rep.parameter = "p=" + std::to_string(p);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    KernelField kf;
    kf.values = *levels[i].kernel;
    kf.mass = levels[i].el->mass;
    double est = lp_norm_estimate(kf, p, trials, seed + i, bases.empty() ? nullptr : bases[i]);
    rep.per_level_constants.emplace_back(levels[i].level, est);
    rep.sample_count += trials;
  }
  finish_report(rep, 0.0, std::numeric_limits<double>::infinity(), false, drift_cap);
  return rep;
}

double hilbert_schmidt_norm(const KernelField& kf) {
  return weighted_frobenius(kf.values, kf.mass);
}

double hs_norm_parseval(const SpectralBasis& basis, const CVector& weights) {
  std::vector<double> sq(weights.size());
  for (Index i = 0; i < weights.size(); ++i) sq[i] = std::norm(weights[i]);
  (void)basis;
  return std::sqrt(par::pairwise_sum(sq.data(), sq.size()));
}

BoundReport verify_hilbert_schmidt(const std::vector<const SpectralBasis*>& bases,
                                   Complex alpha, bool expect_stable, double slope_threshold) {
  BoundReport rep;
  rep.estimate_id = "hilbert_schmidt";
  rep.parameter = "alpha=" + std::to_string(alpha.real());
  std::vector<double> lx, ly;
  for (const SpectralBasis* b : bases) {
    CVector w(b->size());
    for (Index j = 0; j < b->size(); ++j) w[j] = bessel_multiplier(b->eigenvalues[j], alpha);
    double hs = hs_norm_parseval(*b, w);
    rep.per_level_constants.emplace_back(b->level, hs);
    lx.push_back(std::log(b->eigenvalues[b->size() - 1]));
    ly.push_back(2.0 * std::log(hs));
    rep.sample_count += b->size();
  }
  LsqLine line = lsq(lx, ly);
  rep.fitted_exponent = line.slope;  // growth of HS^2 in log(lambda_max)
  rep.target_exponent = 0.0;
  rep.exponent_tolerance = slope_threshold;
  rep.details["expect_stable"] = expect_stable ? 1.0 : 0.0;
  bool stable = line.slope <= slope_threshold;
  rep.pass = (stable == expect_stable);
  rep.drift = rep.per_level_constants.back().second / rep.per_level_constants.front().second;
  return rep;
}

BoundReport verify_l1_rows(const std::vector<KernelLevelView>& levels, double drift_cap) {
  BoundReport rep;
  rep.estimate_id = "l1_rows";
  double global_max = 0, global_min = std::numeric_limits<double>::infinity();
  for (const auto& view : levels) {
    const CMatrix& K = *view.kernel;
    const Vector& mass = view.el->mass;
    const Index n = K.rows();
    double lv_max = 0, lv_min = std::numeric_limits<double>::infinity();
    for (Index x = 0; x < n; ++x) {
      double row = 0;
      for (Index y = 0; y < n; ++y) row += std::abs(K(x, y)) * mass[y];
      lv_max = std::max(lv_max, row);
      lv_min = std::min(lv_min, row);
    }
    rep.per_level_constants.emplace_back(view.level, lv_max);
    global_max = std::max(global_max, lv_max);
    global_min = std::min(global_min, lv_min);
    rep.sample_count += n;
  }
  rep.drift = global_max / global_min;
  rep.drift_cap = drift_cap;
  rep.details["row_l1_max"] = global_max;
  rep.details["row_l1_min"] = global_min;
  rep.pass = rep.drift <= drift_cap;
  return rep;
}

BoundReport verify_lsm_regimes(const std::vector<KernelLevelView>& levels, double d, double s,
                               double drift_cap) {
  BoundReport rep;
  rep.estimate_id = "lsm_regimes";
  rep.parameter = "s=" + std::to_string(s);
  std::vector<std::pair<double, double>> cloud;
  double l1_max = 0, l1_min = std::numeric_limits<double>::infinity();
  double l2_max = 0, l2_min = std::numeric_limits<double>::infinity();
  for (const auto& view : levels) {
    const CMatrix& K = *view.kernel;
    const Matrix& R = *view.resistance;
    const Vector& mass = view.el->mass;
    const Index n = K.rows();
    double c_level = 0;
    for (Index x = 0; x < n; ++x) {
      double row1 = 0, row2 = 0;
      for (Index y = 0; y < n; ++y) {
        double a = std::abs(K(x, y));
        row1 += a * mass[y];
        row2 += a * a * mass[y];
        if (y > x) cloud.emplace_back(R(x, y), a);
      }
      l1_max = std::max(l1_max, row1);
      l1_min = std::min(l1_min, row1);
      l2_max = std::max(l2_max, std::sqrt(row2));
      l2_min = std::min(l2_min, std::sqrt(row2));
      if (s > d) c_level = std::max(c_level, K.cwiseAbs().maxCoeff());
    }
    if (s > d)
      rep.per_level_constants.emplace_back(view.level, c_level);
    else {
      double c = 0;
      for (Index x = 0; x < n; ++x)
        for (Index y = x + 1; y < n; ++y)
          c = std::max(c, std::abs(K(x, y)) * std::pow(R(x, y), d - s));
      rep.per_level_constants.emplace_back(view.level, c);
    }
    rep.sample_count += n * n;
  }
  rep.details["row_l1_drift"] = l1_max / l1_min;
  rep.details["row_l2_drift"] = l2_max / l2_min;

  double cmax = 0, cmin = std::numeric_limits<double>::infinity();
  for (auto& [lvl, c] : rep.per_level_constants) {
    cmax = std::max(cmax, c);
    cmin = std::min(cmin, c);
  }
  rep.drift = cmax / cmin;
  rep.drift_cap = drift_cap;

  if (s > d) {
    rep.target_exponent = 0.0;
    rep.fitted_exponent = 0.0;
    rep.pass = rep.drift <= drift_cap;
  } else {
    PowerLawFit fit = fit_power_law_envelope(cloud, 8, 20, 1.0);
    rep.fitted_exponent = fit.exponent;
    rep.target_exponent = d - s;
    rep.exponent_tolerance = std::max(0.15 * (d - s), 0.1);
    bool l1_ok = (s <= 0) || (l1_max / l1_min <= drift_cap);
    bool l2_ok = (s <= d / 2) || (l2_max / l2_min <= drift_cap);
    rep.pass = std::abs(rep.fitted_exponent - rep.target_exponent) <= rep.exponent_tolerance &&
               rep.drift <= drift_cap && l1_ok && l2_ok;
  }
  return rep;
}

}  // namespace fraclap
