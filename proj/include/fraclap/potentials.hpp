#pragma once

#include <functional>
#include <string>

#include "fraclap/energy.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/spectral.hpp"
#include "fraclap/types.hpp"

namespace fraclap {

enum class KernelFamily { riesz_imaginary, bessel, bessel_imaginary, laplace_type, lsm };
enum class KernelRoute { spectral, quadrature };

std::string to_string(KernelFamily f);
std::string to_string(KernelRoute r);
KernelFamily parse_kernel_family(const std::string& s);
KernelRoute parse_kernel_route(const std::string& s);

/// Bounded multiplier data m(t) for Laplace-transform-type operators.
struct MultiplierSpec {
  enum class Kind { power_imag, bounded_function };
  Kind kind{Kind::power_imag};
  double alpha{0.0};                        // power_imag: m(t) = t^{-i alpha}
  std::function<Complex(double)> fn;        // bounded_function
  double bound{1.0};                        // sup |m|
  double freq_hint{0.0};                    // dominant log-time frequency

  Complex eval(double t) const;
  static MultiplierSpec power_imag(double alpha);
  static MultiplierSpec constant();
  static MultiplierSpec function(std::function<Complex(double)> f, double bound,
                                 double freq_hint = 0.0);
};

/// One operator kernel as a dense complex matrix over V_m x V_m; the operator
/// acts by (T u)(x) = sum_y K(x,y) u(y) m(y).
struct KernelField {
  KernelFamily family{KernelFamily::riesz_imaginary};
  Complex alpha{0.0, 0.0};
  double lsm_s{0.0};
  KernelRoute route{KernelRoute::spectral};
  CMatrix values;
  Vector mass;
  std::string basis_id;
  int level{0};
};

// Scalar spectral multipliers of the shipped families.
Complex riesz_multiplier(double lambda, double alpha);            // lambda^{i a}, 0 at 0
Complex bessel_multiplier(double lambda, Complex alpha);          // (1+lambda)^a
Complex bessel_imag_multiplier(double lambda, double alpha);      // (1+lambda)^{i a}

// Per-mode multipliers produced by numeric quadrature of the heat-transform
// representations (the independent construction route).
Complex quad_riesz_multiplier(double lambda, double alpha, const QuadratureConfig& cfg);
Complex quad_bessel_multiplier(double lambda, Complex alpha, const QuadratureConfig& cfg);
Complex quad_bessel_imag_multiplier(double lambda, double alpha, const QuadratureConfig& cfg);
Complex quad_laplace_multiplier(double lambda, const MultiplierSpec& mult,
                                const QuadratureConfig& cfg);
Complex quad_lsm_multiplier(double lambda, double s, double d, const MultiplierSpec& mult,
                            const QuadratureConfig& cfg);

KernelField riesz_imaginary_kernel(const SpectralBasis& basis, double alpha, KernelRoute route,
                                   const QuadratureConfig& cfg = {});

/// Requires re(alpha) < 0; use bessel_group_extension otherwise.
KernelField bessel_kernel(const SpectralBasis& basis, Complex alpha, KernelRoute route,
                          const QuadratureConfig& cfg = {});

/// A^alpha = A^k A^{alpha-k} with A = I - Delta and -1 <= re(alpha) - k < 0.
KernelField bessel_group_extension(const SpectralBasis& basis, const EnergyLaplacian& el,
                                   Complex alpha, int k,
                                   KernelRoute route = KernelRoute::spectral,
                                   const QuadratureConfig& cfg = {});

KernelField bessel_imaginary_kernel(const SpectralBasis& basis, double alpha,
                                    KernelRoute route = KernelRoute::quadrature,
                                    const QuadratureConfig& cfg = {});

KernelField laplace_type_kernel(const SpectralBasis& basis, const MultiplierSpec& mult,
                                const QuadratureConfig& cfg = {});

/// Pointwise kernel of int m(t) t^{s/(d+1)} h_t(x,y) e^{-t} dt/t. Any real s
/// with s > -(d+1); diverges on the diagonal when s <= 0.
Complex lsm_kernel_entry(const SpectralBasis& basis, double s, const MultiplierSpec& mult,
                         Index x, Index y, const QuadratureConfig& cfg = {});

/// Dense matrix form, s > 0 only.
KernelField lsm_kernel(const SpectralBasis& basis, double s, const MultiplierSpec& mult,
                       KernelRoute route, const QuadratureConfig& cfg = {});

CVector apply_kernel(const KernelField& kf, const CVector& u);
CVector apply_kernel(const KernelField& kf, const Vector& u);

/// Relative Frobenius distance, normalized by the second argument.
double relative_frobenius_error(const CMatrix& a, const CMatrix& b);

}  // namespace fraclap
