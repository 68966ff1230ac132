#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fraclap/potentials.hpp"
#include "fraclap/spectral.hpp"
#include "fraclap/types.hpp"

namespace fraclap {

struct PowerLawFit {
  double exponent{0.0};   // decay exponent e in |K| ~ C * R^{-e}
  double constant{0.0};
  double residual_rms{0.0};
  long sample_count{0};
};

/// Least-squares fit of log|K| = log C - e log R over (R, |K|) samples.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples,
                          int min_samples = 20, double min_decades = 1.5);

/// Same, but fitted through per-bin suprema (upper envelope).
PowerLawFit fit_power_law_envelope(const std::vector<std::pair<double, double>>& samples,
                                   int bins_per_decade = 8, int min_samples = 20,
                                   double min_decades = 1.2);

struct BoundReport {
  std::string estimate_id;
  std::string model;
  std::string parameter;
  double fitted_exponent{0.0};
  double target_exponent{0.0};
  double exponent_tolerance{0.0};
  std::vector<std::pair<int, double>> per_level_constants;
  double drift{1.0};
  double drift_cap{3.0};
  bool pass{false};
  long sample_count{0};
  std::map<std::string, double> details;
};

/// Per-level inputs shared by the kernel-estimate verifications.
struct KernelLevelView {
  int level{0};
  const CMatrix* kernel{nullptr};
  const Matrix* resistance{nullptr};
  const EnergyLaplacian* el{nullptr};
};

struct SizeBoundOptions {
  double exponent_tol_frac{0.15};
  double drift_cap{3.0};
  double min_decades{1.2};
  bool two_sided{false};  // default per contract: fitted exponent >= target - tol
};

BoundReport verify_size_bound(const std::vector<KernelLevelView>& levels, double d,
                              const SizeBoundOptions& opts = {});

BoundReport verify_laplacian_bound(const std::vector<KernelLevelView>& levels, double d,
                                   const SizeBoundOptions& opts = {});

struct HolderConfig {
  double c{0.0};            // separation constant, > r^{-3-k0}
  int k0{0};                // r^{k0} < 1/3
  long pair_budget{500};
  double min_exponent{0.45};
  std::uint64_t seed{1234};
  double drift_cap{3.0};
};

/// Defaults satisfying the separation invariant for the model.
HolderConfig default_holder_config(const IFSModel& model);

BoundReport verify_holder(const std::vector<KernelLevelView>& levels, double d,
                          const HolderConfig& cfg);

/// Band check of sum_x exp(-c (R(x,y)^(d+1)/t)^gamma) m(x) against t^(d/(d+1)).
BoundReport verify_int_exp(const Matrix& resistance, const Vector& mass, double d,
                           double gamma, double c_rate, const std::vector<double>& t_grid,
                           const std::vector<Index>& centers, double band_cap = 4.0);

/// Lower-bound estimate of the L^p -> L^p operator norm over random and
/// adversarial test functions.
double lp_norm_estimate(const KernelField& kf, double p, int trials, std::uint64_t seed,
                        const SpectralBasis* basis = nullptr);

BoundReport verify_lp_norms(const std::vector<KernelLevelView>& levels,
                            const std::vector<const SpectralBasis*>& bases, double p,
                            int trials, std::uint64_t seed, double drift_cap = 2.0);

double hilbert_schmidt_norm(const KernelField& kf);

/// Parseval form: sqrt(sum_n |w_n|^2) for a spectral-multiplier kernel.
double hs_norm_parseval(const SpectralBasis& basis, const CVector& weights);

/// Level-growth dichotomy of the Bessel Hilbert-Schmidt norm at exponent
/// alpha; stable when the fitted growth slope stays under the threshold.
BoundReport verify_hilbert_schmidt(const std::vector<const SpectralBasis*>& bases,
                                   Complex alpha, bool expect_stable,
                                   double slope_threshold = 0.05);

BoundReport verify_l1_rows(const std::vector<KernelLevelView>& levels, double drift_cap = 2.0);

/// Regime behavior of the lsm kernel at exponent s: bounded for s > d,
/// decay exponent d - s for s < d, row integrability per regime.
BoundReport verify_lsm_regimes(const std::vector<KernelLevelView>& levels, double d, double s,
                               double drift_cap = 3.0);

}  // namespace fraclap
