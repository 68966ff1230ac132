#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fraclap/energy.hpp"
#include "fraclap/types.hpp"

namespace fraclap {

/// Full decomposition of the pencil (L, M): ascending eigenvalues, columns
/// M-orthonormal, signs fixed so the largest-magnitude entry is positive.
struct SpectralBasis {
  Vector eigenvalues;
  Matrix eigenvectors;
  Vector mass;
  int level{0};
  ModelName model_name{ModelName::interval};
  double resistance_dim{1.0};
  std::string basis_id;

  Index size() const { return eigenvalues.size(); }
  /// First positive eigenvalue (spectral gap).
  double lambda1() const;
};

SpectralBasis eigenbasis(const EnergyLaplacian& el);

struct HeatKernelSlice {
  double time{0.0};
  int derivative_order{0};
  Matrix values;
};

HeatKernelSlice heat_kernel(const SpectralBasis& basis, double t, int k = 0);

/// Single entry sum_n (-lambda)^k e^{-lambda t} phi_n(x) phi_n(y); O(modes).
double heat_kernel_entry(const SpectralBasis& basis, double t, int k, Index x, Index y);

/// Time range on which the discrete model tracks the continuum scaling:
/// [10 * (finest cell size)^(d+1), 0.1 / lambda_1].
struct ScalingWindow {
  double t_min{0.0};
  double t_max{0.0};
  double lo{0.0};
  double hi{0.0};
};

ScalingWindow scaling_window(const SpectralBasis& basis, double size_constant = 1.0);

struct EnvelopeSamples {
  std::vector<Index> diagonal;
  std::vector<std::pair<Index, Index>> pairs;
};

struct EnvelopeFit {
  double beta{0.0};
  double gamma{0.0};
  double c_rate{0.0};    // decay rate inside the stretched exponential
  double c_upper{0.0};   // two-sided envelope prefactors
  double c_lower{0.0};
  double beta_residual_rms{0.0};
  double residual_rms{0.0};
  long sample_count{0};
};

struct EnvelopeFitOptions {
  double w_min{0.5};   // usable range of (R^(d+1)/t)^gamma for the tail fit
  double w_max{8.0};
  double gamma_min{0.25};
  double gamma_max{2.0};
};

/// beta from on-diagonal log-log regression; gamma and the rate/constants
/// from regressing log(t^beta h_t(x,y)) against (R(x,y)^(d+1)/t)^gamma.
EnvelopeFit heat_envelope_fit(const SpectralBasis& basis, const Matrix& resistance,
                              const std::vector<double>& t_grid,
                              const EnvelopeSamples& samples,
                              const EnvelopeFitOptions& opts = {});

/// Log-uniform grid of n points spanning [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace fraclap
