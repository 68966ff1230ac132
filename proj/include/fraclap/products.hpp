#pragma once

#include <cstdint>
#include <vector>

#include "fraclap/estimates.hpp"
#include "fraclap/potentials.hpp"
#include "fraclap/spectral.hpp"
#include "fraclap/types.hpp"

namespace fraclap {

using ProductPoint = std::vector<Index>;  // one factor vertex per copy

/// Tensor basis over N copies of a factor basis; the flat arrays are filled
/// only when the full tensor fits under the cap.
struct ProductBasis {
  const SpectralBasis* factor{nullptr};
  int copies{2};
  bool tensor_built{false};
  Vector eigenvalues;                       // sums of factor eigenvalues
  std::vector<std::vector<int>> index_map;  // flat -> multi-index
};

ProductBasis product_basis(const SpectralBasis& factor, int copies, Index tensor_cap = 20000);

/// h^N_t(x,y) = prod_i h_t(x_i, y_i).
double product_heat_kernel(const SpectralBasis& factor, int copies, double t,
                           const ProductPoint& x, const ProductPoint& y);

/// Same value summed over the flattened tensor basis (identity cross-check).
double product_heat_tensor_sum(const ProductBasis& pb, double t, const ProductPoint& x,
                               const ProductPoint& y);

/// R^N(x,y) = (sum_i R(x_i,y_i)^((d+1) gamma))^(1/((d+1) gamma)).
struct ProductMetric {
  const Matrix* factor_resistance{nullptr};
  double gamma{1.0};
  double d{1.0};
  int copies{2};

  double operator()(const ProductPoint& x, const ProductPoint& y) const;
};

/// Product-space kernels K^N(x,y) = sum f(lambda_{n_1}+...+lambda_{n_N})
/// prod_i phi_{n_i}(x_i) phi_{n_i}(y_i), evaluated at sampled point pairs.
/// N = 2 uses a pair-independent multiplier table; other N fall back to the
/// full multi-index sum when it is small enough.
class ProductKernelEvaluator {
 public:
  ProductKernelEvaluator(const SpectralBasis& factor, int copies, KernelFamily family,
                         Complex alpha);

  Complex multiplier(double lambda_sum) const;
  Complex entry(const ProductPoint& x, const ProductPoint& y) const;
  /// Kernel with the factor Laplacian applied in component i of y.
  Complex entry_factor_laplacian(const ProductPoint& x, const ProductPoint& y, int i) const;
  /// Independent route: numeric quadrature of the product heat transform.
  Complex quadrature_entry(const ProductPoint& x, const ProductPoint& y,
                           const QuadratureConfig& cfg = {}) const;

  const SpectralBasis& factor() const { return *factor_; }
  int copies() const { return copies_; }
  KernelFamily family() const { return family_; }
  Complex alpha() const { return alpha_; }

 private:
  const SpectralBasis* factor_;
  int copies_;
  KernelFamily family_;
  Complex alpha_;
  CMatrix table_;  // N=2 fast path: f(lambda_i + lambda_j)
};

struct ProductSampleConfig {
  long pair_budget{2000};
  std::uint64_t seed{77};
  int bins_per_decade{8};
  long per_bin_cap{200};
};

std::vector<std::pair<ProductPoint, ProductPoint>> sample_product_pairs(
    Index factor_size, const ProductMetric& metric, const ProductSampleConfig& cfg);

struct ProductLevelView {
  const ProductKernelEvaluator* evaluator{nullptr};
  const ProductMetric* metric{nullptr};
  const ApproxGraph* graph{nullptr};
  int level{0};
};

BoundReport verify_product_size(const std::vector<ProductLevelView>& levels, double d,
                                const ProductSampleConfig& cfg,
                                const SizeBoundOptions& opts = {});

BoundReport verify_product_laplacian(const std::vector<ProductLevelView>& levels, double d,
                                     const ProductSampleConfig& cfg,
                                     const SizeBoundOptions& opts = {});

struct ProductHolderConfig {
  double c{0.0};  // separation in the product metric
  long triple_budget{1500};
  double min_exponent{0.45};
  std::uint64_t seed{78};
  double drift_cap{3.0};
};

BoundReport verify_product_holder(const std::vector<ProductLevelView>& levels, double d,
                                  const ProductHolderConfig& cfg);

}  // namespace fraclap
