// Command-line front end: build, spectrum, kernel, verify, product, report.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fraclap/config.hpp"
#include "fraclap/par.hpp"
#include "fraclap/pipeline.hpp"

namespace {

struct Flags {
  std::string config_file;
  std::string model, route, out, estimates, families, levels, dir;
  int level = -1;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double c = 0, rel_tol = 0, drift_cap = 0, lsm_s = 0;
  long seed = -1;
  int threads = -1;
  int copies = 0;
  bool all = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_file, "key=value config file with sections");
  sub->add_option("--model", f.model, "gasket or interval");
  sub->add_option("--level", f.level, "finest approximation level");
  sub->add_option("--levels", f.levels, "comma-separated level list");
  sub->add_option("--seed", f.seed, "random seed for sampling");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threads", f.threads, "worker threads; 1 forces sequential");
  sub->add_option("--rel-tol", f.rel_tol, "quadrature relative tolerance");
  sub->add_option("--drift-cap", f.drift_cap, "per-level constant drift cap");
}

fraclap::RunConfig merge(const Flags& f) {
  fraclap::RunConfig cfg;
  if (!f.config_file.empty()) cfg = fraclap::parse_config_file(f.config_file, cfg);
  fraclap::apply_environment(cfg);
  if (!f.model.empty()) cfg.apply("model", f.model);
  if (f.level >= 0) cfg.apply("level", std::to_string(f.level));
  if (!f.levels.empty()) cfg.apply("levels", f.levels);
  if (!f.families.empty()) cfg.apply("families", f.families);
  if (!std::isnan(f.alpha)) cfg.apply("alpha", std::to_string(f.alpha));
  if (!f.route.empty()) cfg.apply("route", f.route);
  if (!f.estimates.empty()) cfg.apply("estimates", f.estimates);
  if (f.all) cfg.all_estimates = true;
  if (f.c > 0) cfg.apply("c", std::to_string(f.c));
  if (f.rel_tol > 0) cfg.apply("rel_tol", std::to_string(f.rel_tol));
  if (f.drift_cap > 0) cfg.apply("drift_cap", std::to_string(f.drift_cap));
  if (f.lsm_s != 0) cfg.apply("lsm_s", std::to_string(f.lsm_s));
  if (f.seed >= 0) cfg.apply("seed", std::to_string(f.seed));
  if (!f.out.empty()) cfg.apply("out", f.out);
  if (f.threads >= 0) cfg.apply("threads", std::to_string(f.threads));
  if (f.copies >= 2) cfg.apply("copies", std::to_string(f.copies));
  if (!f.dir.empty()) cfg.report_dir = f.dir;
  if (cfg.threads > 0) fraclap::par::set_threads(cfg.threads);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator kernels and estimate verification on fractal graph approximations"};
  app.require_subcommand(1);
  Flags f;

  auto* build = app.add_subcommand("build", "construct a level graph and serialize it");
  add_common(build, f);

  auto* spectrum = app.add_subcommand("spectrum", "eigenbasis with CSV/binary export");
  add_common(spectrum, f);

  auto* kernel = app.add_subcommand("kernel", "construct and export operator kernels");
  add_common(kernel, f);
  kernel->add_option("--family", f.families, "riesz|bessel|bessel_imaginary|laplace_type|lsm");
  kernel->add_option("--alpha", f.alpha, "operator parameter");
  kernel->add_option("--route", f.route, "spectral|quadrature|both");

  auto* verify = app.add_subcommand("verify", "run the estimate verification suite");
  add_common(verify, f);
  verify->add_option("--family", f.families, "operator families, comma separated");
  verify->add_option("--alpha", f.alpha, "operator parameter");
  verify->add_option("--estimate", f.estimates, "estimate ids, comma separated");
  verify->add_flag("--all", f.all, "run the default estimate set");
  verify->add_option("--c", f.c, "Holder separation constant");
  verify->add_option("--s", f.lsm_s, "lsm exponent s");

  auto* product = app.add_subcommand("product", "product-space kernel suite");
  add_common(product, f);
  product->add_option("--family", f.families, "riesz|bessel|bessel_imaginary");
  product->add_option("--alpha", f.alpha, "operator parameter");
  product->add_option("--copies", f.copies, "number of factors N");
  product->add_option("--c", f.c, "product Holder separation constant");

  auto* report = app.add_subcommand("report", "summarize report JSON files in a directory");
  add_common(report, f);
  report->add_option("--dir", f.dir, "directory holding report bundles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fraclap::RunConfig cfg = merge(f);
    if (build->parsed()) return fraclap::run_build(cfg);
    if (spectrum->parsed()) return fraclap::run_spectrum(cfg);
    if (kernel->parsed()) return fraclap::run_kernel(cfg);
    if (verify->parsed()) return fraclap::run_verify(cfg);
    if (product->parsed()) return fraclap::run_product(cfg);
    if (report->parsed()) return fraclap::run_report(cfg);
  } catch (const fraclap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fraclap::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fraclap::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
