#pragma once

#include <memory>
#include <vector>

#include "fraclap/config.hpp"
#include "fraclap/energy.hpp"
#include "fraclap/estimates.hpp"
#include "fraclap/io.hpp"
#include "fraclap/model.hpp"
#include "fraclap/potentials.hpp"
#include "fraclap/products.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

/// Everything derived from one approximation level.
struct LevelData {
  std::unique_ptr<ApproxGraph> graph;
  EnergyLaplacian el;
  SpectralBasis basis;
  Matrix resistance;
};

std::unique_ptr<LevelData> build_level(const IFSModel& model, int level, Index vertex_cap,
                                       bool with_resistance = true);

// Subcommand drivers; return process exit codes (0 ok, 1 bound failure).
int run_build(const RunConfig& cfg);
int run_spectrum(const RunConfig& cfg);
int run_kernel(const RunConfig& cfg);
int run_verify(const RunConfig& cfg);
int run_product(const RunConfig& cfg);
int run_report(const RunConfig& cfg);

/// Kernel construction used by the verify/product drivers.
KernelField build_family_kernel(const SpectralBasis& basis, const EnergyLaplacian& el,
                                const std::string& family, double alpha, KernelRoute route,
                                const QuadratureConfig& qcfg);

std::vector<std::string> default_estimates();

}  // namespace fraclap
