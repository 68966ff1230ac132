#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fraclap/types.hpp"

namespace fraclap {

/// One run = one config; sections in the file map to dotted keys
/// ([holder] c=22 -> "holder.c"). Flags override file values, which override
/// environment, which override defaults.
struct RunConfig {
  std::string model{"gasket"};
  int level{4};
  std::vector<int> levels;  // empty: derived from level
  std::vector<std::string> families{"riesz"};
  std::vector<double> alphas{1.0};
  std::string route{"both"};
  std::vector<std::string> estimates;  // empty + all=false: default set
  bool all_estimates{false};

  double rel_tol{1e-9};
  double drift_cap{3.0};
  double exponent_tol_frac{0.15};
  bool exponent_two_sided{true};

  double holder_c{0.0};  // 0: model default separation
  long holder_budget{2000};
  double holder_min_exponent{0.45};

  double lsm_s{0.0};  // 0: defaults {d/2, d+1}
  int lp_trials{16};
  std::vector<double> lp_exponents{1.5, 3.0};

  int product_copies{2};
  long product_budget{1500};
  double product_holder_c{0.0};  // 0: model-default factor separation
  long product_holder_budget{1200};

  std::uint64_t seed{12345};
  std::string out_dir{"out"};
  int threads{0};  // 0: hardware default
  double size_constant{1.0};
  Index vertex_cap{5000};
  int heat_t_points{40};
  std::string report_dir;

  void apply(const std::string& dotted_key, const std::string& value);
};

RunConfig parse_config_file(const std::string& path, RunConfig base = {});

/// FRACLAP_OUT and FRACLAP_THREADS.
void apply_environment(RunConfig& cfg);

std::vector<int> effective_levels(const RunConfig& cfg);

}  // namespace fraclap
