#include "fraclap/potentials.hpp"

#include <cmath>

#include "fraclap/gamma.hpp"
#include "fraclap/kernels.hpp"
#include "fraclap/par.hpp"

namespace fraclap {

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::riesz_imaginary: return "riesz_imaginary";
    case KernelFamily::bessel: return "bessel";
    case KernelFamily::bessel_imaginary: return "bessel_imaginary";
    case KernelFamily::laplace_type: return "laplace_type";
    case KernelFamily::lsm: return "lsm";
  }
  return "?";
}

std::string to_string(KernelRoute r) {
  return r == KernelRoute::spectral ? "spectral" : "quadrature";
}

KernelFamily parse_kernel_family(const std::string& s) {
  if (s == "riesz" || s == "riesz_imaginary") return KernelFamily::riesz_imaginary;
  if (s == "bessel") return KernelFamily::bessel;
  if (s == "bessel_imaginary" || s == "bessel_imag") return KernelFamily::bessel_imaginary;
  if (s == "laplace_type" || s == "laplace") return KernelFamily::laplace_type;
  if (s == "lsm") return KernelFamily::lsm;
  throw DomainError("unknown kernel family: " + s);
}

KernelRoute parse_kernel_route(const std::string& s) {
  if (s == "spectral") return KernelRoute::spectral;
  if (s == "quadrature") return KernelRoute::quadrature;
  throw DomainError("unknown kernel route: " + s);
}

Complex MultiplierSpec::eval(double t) const {
  if (kind == Kind::power_imag) return std::polar(1.0, -alpha * std::log(t));
  return fn(t);
}

MultiplierSpec MultiplierSpec::power_imag(double alpha) {
  MultiplierSpec m;
  m.kind = Kind::power_imag;
  m.alpha = alpha;
  m.bound = 1.0;
  m.freq_hint = std::abs(alpha);
  return m;
}

MultiplierSpec MultiplierSpec::constant() { return power_imag(0.0); }

MultiplierSpec MultiplierSpec::function(std::function<Complex(double)> f, double bound,
                                        double freq_hint) {
  MultiplierSpec m;
  m.kind = Kind::bounded_function;
  m.fn = std::move(f);
  m.bound = bound;
  m.freq_hint = freq_hint;
  if (!std::isfinite(bound)) throw DomainError("multiplier bound must be finite");
  return m;
}

namespace {

constexpr double kLambdaZeroTol = 1e-12;

bool is_zero_mode(double lambda, double lambda_max) {
  return lambda <= kLambdaZeroTol * std::max(1.0, lambda_max);
}

}  // namespace

Complex riesz_multiplier(double lambda, double alpha) {
  if (lambda <= 0) return {0.0, 0.0};
  return std::polar(1.0, alpha * std::log(lambda));
}

Complex bessel_multiplier(double lambda, Complex alpha) {
  return std::exp(alpha * std::log1p(lambda));
}

Complex bessel_imag_multiplier(double lambda, double alpha) {
  return std::polar(1.0, alpha * std::log1p(lambda));
}

Complex quad_riesz_multiplier(double lambda, double alpha, const QuadratureConfig& cfg) {
  if (lambda <= 0) return {0.0, 0.0};
  return scalar_power_by_quadrature(lambda, alpha, cfg);
}

Complex quad_bessel_multiplier(double lambda, Complex alpha, const QuadratureConfig& cfg) {
  if (alpha.real() >= 0) throw DomainError("bessel quadrature requires re(alpha) < 0");
  const double mu = 1.0 + lambda;
  const double a = -alpha.real();
  auto g = [mu, alpha](double u) -> Complex {
    double ex = -mu * std::exp(u) - alpha.real() * u;
    if (ex < -745.0) return {0.0, 0.0};
    return std::exp(ex) * std::polar(1.0, -alpha.imag() * u);
  };
  Complex integral = integrate_log_axis(g, std::log(a / mu), std::abs(alpha.imag()), cfg);
  return integral / complex_gamma(-alpha);
}

Complex quad_bessel_imag_multiplier(double lambda, double alpha, const QuadratureConfig& cfg) {
  if (alpha == 0.0) return {1.0, 0.0};
  if (lambda <= 0) return {1.0, 0.0};
  const double mu = 1.0 + lambda;
  // Constant-mode subtraction keeps the small-t integrand absolutely
  // integrable: e^{-mu t} - e^{-t} = e^{-t} expm1(-lambda t).
  auto g = [mu, lambda, alpha](double u) -> Complex {
    double t = std::exp(u);
    if (t > 745.0) return {0.0, 0.0};
    double diff = std::exp(-t) * std::expm1(-lambda * t);
    return diff * std::polar(1.0, -alpha * u);
  };
  double t_peak = std::log(mu) / (mu - 1.0);
  Complex integral = integrate_log_axis(g, std::log(t_peak), std::abs(alpha), cfg);
  Complex c_alpha = 1.0 / complex_gamma(Complex(1.0, -alpha));
  return 1.0 + Complex(0.0, -alpha) * c_alpha * integral;
}

Complex quad_laplace_multiplier(double lambda, const MultiplierSpec& mult,
                                const QuadratureConfig& cfg) {
  if (lambda <= 0) return {0.0, 0.0};
  auto g = [lambda, &mult](double u) -> Complex {
    double ex = u - lambda * std::exp(u);
    if (ex < -745.0) return {0.0, 0.0};
    return lambda * std::exp(ex) * mult.eval(std::exp(u));
  };
  return integrate_log_axis(g, -std::log(lambda), mult.freq_hint, cfg);
}

Complex quad_lsm_multiplier(double lambda, double s, double d, const MultiplierSpec& mult,
                            const QuadratureConfig& cfg) {
  if (s <= 0) throw DomainError("per-mode lsm quadrature requires s > 0");
  const double sigma = s / (d + 1.0);
  const double mu = 1.0 + lambda;
  auto g = [sigma, mu, &mult](double u) -> Complex {
    double ex = sigma * u - mu * std::exp(u);
    if (ex < -745.0) return {0.0, 0.0};
    return std::exp(ex) * mult.eval(std::exp(u));
  };
  return integrate_log_axis(g, std::log(sigma / mu), mult.freq_hint, cfg);
}

namespace {

KernelField make_field(const SpectralBasis& basis, KernelFamily family, Complex alpha,
                       KernelRoute route, const CVector& weights) {
  KernelField kf;
  kf.family = family;
  kf.alpha = alpha;
  kf.route = route;
  kf.values = mode_sum(basis.eigenvectors, weights);
  kf.mass = basis.mass;
  kf.basis_id = basis.basis_id;
  kf.level = basis.level;
  if (!kf.values.allFinite()) throw NumericError("kernel has non-finite entries");
  return kf;
}

// Per-mode quadrature weights, parallel over modes.
CVector quad_weights(const SpectralBasis& basis,
                     const std::function<Complex(double)>& per_mode) {
  const Index n = basis.size();
  CVector w(n);
  par::for_index(n, [&](Index j) { w[j] = per_mode(basis.eigenvalues[j]); });
  return w;
}

}  // namespace

KernelField riesz_imaginary_kernel(const SpectralBasis& basis, double alpha, KernelRoute route,
                                   const QuadratureConfig& cfg) {
  const double lmax = basis.eigenvalues[basis.size() - 1];
  CVector w(basis.size());
  if (route == KernelRoute::spectral) {
    for (Index j = 0; j < basis.size(); ++j) {
      double lam = basis.eigenvalues[j];
      w[j] = is_zero_mode(lam, lmax) ? Complex{0, 0} : riesz_multiplier(lam, alpha);
    }
  } else {
    w = quad_weights(basis, [&](double lam) {
      return is_zero_mode(lam, lmax) ? Complex{0, 0} : quad_riesz_multiplier(lam, alpha, cfg);
    });
  }
  return make_field(basis, KernelFamily::riesz_imaginary, Complex(0, alpha), route, w);
}

KernelField bessel_kernel(const SpectralBasis& basis, Complex alpha, KernelRoute route,
                          const QuadratureConfig& cfg) {
  if (alpha.real() >= 0)
    throw DomainError("bessel_kernel requires re(alpha) < 0; use bessel_group_extension");
  CVector w(basis.size());
  if (route == KernelRoute::spectral) {
    for (Index j = 0; j < basis.size(); ++j) w[j] = bessel_multiplier(basis.eigenvalues[j], alpha);
  } else {
    w = quad_weights(basis,
                     [&](double lam) { return quad_bessel_multiplier(lam, alpha, cfg); });
  }
  return make_field(basis, KernelFamily::bessel, alpha, route, w);
}

KernelField bessel_group_extension(const SpectralBasis& basis, const EnergyLaplacian& el,
                                   Complex alpha, int k, KernelRoute route,
                                   const QuadratureConfig& cfg) {
  const double re_frac = alpha.real() - k;
  if (!(re_frac >= -1.0 && re_frac < 0.0))
    throw DomainError("bessel_group_extension: k must satisfy -1 <= re(alpha) - k < 0");

  Complex frac = alpha - static_cast<double>(k);
  KernelField base;
  if (frac.real() < 0) {
    base = bessel_kernel(basis, frac, route, cfg);
  } else {
    // re(alpha) integer: the fractional part is the identity.
    base.family = KernelFamily::bessel;
    base.route = route;
    base.mass = basis.mass;
    base.basis_id = basis.basis_id;
    base.level = basis.level;
    base.values = CMatrix::Zero(basis.size(), basis.size());
    for (Index i = 0; i < basis.size(); ++i) base.values(i, i) = 1.0 / basis.mass[i];
    if (frac.imag() != 0.0) base = bessel_imaginary_kernel(basis, frac.imag(), route, cfg);
  }

  // Compose with A^k where A = I - Delta = M^{-1}(M + L), acting on kernel rows.
  CMatrix K = base.values;
  for (int i = 0; i < k; ++i) {
    CMatrix MK = K;
    for (Index r = 0; r < K.rows(); ++r) MK.row(r) *= el.mass[r];
    CMatrix LK = el.stiffness_sparse.cast<Complex>() * K;
    CMatrix AK = MK + LK;
    for (Index r = 0; r < K.rows(); ++r) AK.row(r) /= el.mass[r];
    K = AK;
  }
  base.values = K;
  base.alpha = alpha;
  if (!base.values.allFinite()) throw NumericError("kernel has non-finite entries");
  return base;
}

KernelField bessel_imaginary_kernel(const SpectralBasis& basis, double alpha, KernelRoute route,
                                    const QuadratureConfig& cfg) {
  if (alpha == 0.0) {
    // i*alpha prefactor vanishes; the operator is the identity.
    KernelField kf;
    kf.family = KernelFamily::bessel_imaginary;
    kf.alpha = Complex(0, 0);
    kf.route = route;
    kf.mass = basis.mass;
    kf.basis_id = basis.basis_id;
    kf.level = basis.level;
    kf.values = CMatrix::Zero(basis.size(), basis.size());
    for (Index i = 0; i < basis.size(); ++i) kf.values(i, i) = 1.0 / basis.mass[i];
    return kf;
  }
  CVector w(basis.size());
  if (route == KernelRoute::spectral) {
    for (Index j = 0; j < basis.size(); ++j)
      w[j] = bessel_imag_multiplier(basis.eigenvalues[j], alpha);
  } else {
    w = quad_weights(basis,
                     [&](double lam) { return quad_bessel_imag_multiplier(lam, alpha, cfg); });
  }
  return make_field(basis, KernelFamily::bessel_imaginary, Complex(0, alpha), route, w);
}

KernelField laplace_type_kernel(const SpectralBasis& basis, const MultiplierSpec& mult,
                                const QuadratureConfig& cfg) {
  if (!std::isfinite(mult.bound)) throw DomainError("multiplier bound must be finite");
  CVector w = quad_weights(basis,
                           [&](double lam) { return quad_laplace_multiplier(lam, mult, cfg); });
  KernelField kf = make_field(basis, KernelFamily::laplace_type, Complex(0, mult.alpha),
                              KernelRoute::quadrature, w);
  return kf;
}

Complex lsm_kernel_entry(const SpectralBasis& basis, double s, const MultiplierSpec& mult,
                         Index x, Index y, const QuadratureConfig& cfg) {
  const double d = basis.resistance_dim;
  if (s <= 0 && x == y) throw DomainError("lsm kernel diverges on the diagonal for s <= 0");
  if (s <= -(d + 1.0)) throw DomainError("lsm kernel requires s > -(d+1)");
  if (s > 0) {
    // Mode-wise integrals converge individually.
    Complex acc{0, 0};
    for (Index j = 0; j < basis.size(); ++j)
      acc += quad_lsm_multiplier(basis.eigenvalues[j], s, d, mult, cfg) *
             basis.eigenvectors(x, j) * basis.eigenvectors(y, j);
    return acc;
  }
  // s <= 0 off-diagonal: integrate the assembled heat entry, which vanishes
  // linearly at t = 0.
  const double sigma = s / (d + 1.0);
  auto g = [&](double u) -> Complex {
    double t = std::exp(u);
    if (t > 745.0) return {0.0, 0.0};
    double h = heat_kernel_entry(basis, t, 0, x, y);
    double ex = sigma * u - t;
    if (ex < -745.0) return {0.0, 0.0};
    return h * std::exp(ex) * mult.eval(t);
  };
  return integrate_log_axis(g, 0.0, mult.freq_hint, cfg);
}

KernelField lsm_kernel(const SpectralBasis& basis, double s, const MultiplierSpec& mult,
                       KernelRoute route, const QuadratureConfig& cfg) {
  if (s <= 0) throw DomainError("matrix lsm kernel requires s > 0");
  const double d = basis.resistance_dim;
  CVector w(basis.size());
  if (route == KernelRoute::spectral) {
    if (mult.kind != MultiplierSpec::Kind::power_imag)
      throw DomainError("spectral lsm route needs a power-type multiplier");
    // int t^{sigma - i alpha} e^{-(1+lambda) t} dt/t = Gamma(sigma - i alpha) (1+lambda)^{-sigma + i alpha}
    Complex z(s / (d + 1.0), -mult.alpha);
    Complex gz = complex_gamma(z);
    for (Index j = 0; j < basis.size(); ++j)
      w[j] = gz * std::exp(-z * std::log1p(basis.eigenvalues[j]));
  } else {
    w = quad_weights(basis,
                     [&](double lam) { return quad_lsm_multiplier(lam, s, d, mult, cfg); });
  }
  KernelField kf = make_field(basis, KernelFamily::lsm, Complex(0, mult.alpha), route, w);
  kf.lsm_s = s;
  return kf;
}

CVector apply_kernel(const KernelField& kf, const CVector& u) {
  if (u.size() != kf.values.rows()) throw DomainError("apply_kernel: size mismatch");
  return kernel_matvec(kf.values, kf.mass, u);
}

CVector apply_kernel(const KernelField& kf, const Vector& u) {
  return apply_kernel(kf, CVector(u.cast<Complex>()));
}

double relative_frobenius_error(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace fraclap
