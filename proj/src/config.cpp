#include "fraclap/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fraclap {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": " + v);
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": " + v);
  }
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "run.model" || key == "model") {
    model = v;
  } else if (key == "run.level" || key == "level") {
    level = to_int(v, key);
  } else if (key == "run.levels" || key == "levels") {
    levels.clear();
    for (const auto& s : split_list(v)) levels.push_back(to_int(s, key));
  } else if (key == "run.families" || key == "families" || key == "family") {
    families = split_list(v);
  } else if (key == "run.alphas" || key == "alphas" || key == "alpha") {
    alphas.clear();
    for (const auto& s : split_list(v)) alphas.push_back(to_double(s, key));
  } else if (key == "run.route" || key == "route") {
    route = v;
  } else if (key == "run.estimates" || key == "estimates" || key == "estimate") {
    estimates = split_list(v);
  } else if (key == "run.all" || key == "all") {
    all_estimates = (v == "1" || v == "true" || v == "yes");
  } else if (key == "run.seed" || key == "seed") {
    seed = static_cast<std::uint64_t>(std::stoull(v));
  } else if (key == "run.out" || key == "out") {
    out_dir = v;
  } else if (key == "run.threads" || key == "threads") {
    threads = to_int(v, key);
  } else if (key == "run.vertex_cap" || key == "vertex_cap") {
    vertex_cap = to_int(v, key);
  } else if (key == "tolerances.rel_tol" || key == "rel_tol") {
    rel_tol = to_double(v, key);
  } else if (key == "tolerances.drift_cap" || key == "drift_cap") {
    drift_cap = to_double(v, key);
  } else if (key == "tolerances.exponent_tol_frac" || key == "exponent_tol_frac") {
    exponent_tol_frac = to_double(v, key);
  } else if (key == "tolerances.exponent_two_sided" || key == "exponent_two_sided") {
    exponent_two_sided = (v == "1" || v == "true" || v == "yes");
  } else if (key == "holder.c" || key == "c") {
    holder_c = to_double(v, key);
  } else if (key == "holder.budget" || key == "holder_budget") {
    holder_budget = to_int(v, key);
  } else if (key == "holder.min_exponent" || key == "holder_min_exponent") {
    holder_min_exponent = to_double(v, key);
  } else if (key == "lsm.s" || key == "lsm_s") {
    lsm_s = to_double(v, key);
  } else if (key == "lp.trials" || key == "lp_trials") {
    lp_trials = to_int(v, key);
  } else if (key == "lp.exponents" || key == "lp_exponents") {
    lp_exponents.clear();
    for (const auto& s : split_list(v)) lp_exponents.push_back(to_double(s, key));
  } else if (key == "products.copies" || key == "copies") {
    product_copies = to_int(v, key);
  } else if (key == "products.budget" || key == "product_budget") {
    product_budget = to_int(v, key);
  } else if (key == "products.holder_c" || key == "product_holder_c") {
    product_holder_c = to_double(v, key);
  } else if (key == "products.holder_budget" || key == "product_holder_budget") {
    product_holder_budget = to_int(v, key);
  } else if (key == "run.size_constant" || key == "size_constant" || key == "c1") {
    size_constant = to_double(v, key);
  } else if (key == "heat.t_points" || key == "heat_t_points") {
    heat_t_points = to_int(v, key);
  } else if (key == "report.dir" || key == "dir") {
    report_dir = v;
  } else {
    throw ConfigError("config: unknown key: " + key);
  }
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    base.apply(section.empty() ? key : section + "." + key, val);
  }
  return base;
}

void apply_environment(RunConfig& cfg) {
  if (const char* out = std::getenv("FRACLAP_OUT")) cfg.out_dir = out;
  if (const char* th = std::getenv("FRACLAP_THREADS")) cfg.threads = to_int(th, "FRACLAP_THREADS");
}

std::vector<int> effective_levels(const RunConfig& cfg) {
  if (!cfg.levels.empty()) return cfg.levels;
  std::vector<int> out;
  for (int l = std::max(2, cfg.level - 3); l <= cfg.level; ++l) out.push_back(l);
  return out;
}

}  // namespace fraclap
