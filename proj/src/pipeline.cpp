#include "fraclap/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <random>

#include "fraclap/par.hpp"

namespace fraclap {

namespace {

std::string tag(const RunConfig& cfg, int level) {
  return cfg.model + "_m" + std::to_string(level);
}

std::string alpha_str(double a) {
  std::string s = std::to_string(a);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

Json config_echo(const RunConfig& cfg) {
  Json j;
  j["model"] = cfg.model;
  j["levels"] = effective_levels(cfg);
  j["families"] = cfg.families;
  j["alphas"] = cfg.alphas;
  j["seed"] = cfg.seed;
  j["rel_tol"] = cfg.rel_tol;
  j["drift_cap"] = cfg.drift_cap;
  j["exponent_tol_frac"] = cfg.exponent_tol_frac;
  return j;
}

// Deterministic stratified off-diagonal pair sample, spread across the
// resistance range.
std::vector<std::pair<Index, Index>> sample_pairs(const Matrix& R, long budget,
                                                  std::uint64_t seed) {
  const Index n = R.rows();
  std::mt19937_64 rng(seed);
  double rmax = R.maxCoeff();
  double rmin = rmax;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) rmin = std::min(rmin, R(i, j));
  const int bins_per_decade = 8;
  std::map<int, long> count;
  const long per_bin = std::max<long>(2, budget / std::max<long>(
      1, static_cast<long>(std::log10(rmax / rmin) * bins_per_decade) + 1));
  std::vector<std::pair<Index, Index>> out;
  long attempts = budget * 60;
  for (long it = 0; it < attempts && static_cast<long>(out.size()) < budget; ++it) {
    Index x = static_cast<Index>(rng() % n);
    Index y = static_cast<Index>(rng() % n);
    if (x == y) continue;
    int bin = static_cast<int>(std::floor(std::log10(R(x, y) / rmin) * bins_per_decade));
    if (count[bin] >= per_bin) continue;
    ++count[bin];
    out.emplace_back(x, y);
  }
  return out;
}

std::vector<Index> sample_vertices(Index n, int want) {
  std::vector<Index> out;
  Index stride = std::max<Index>(1, n / want);
  for (Index v = 0; v < n && static_cast<int>(out.size()) < want; v += stride)
    out.push_back(v);
  return out;
}

}  // namespace

std::unique_ptr<LevelData> build_level(const IFSModel& model, int level, Index vertex_cap,
                                       bool with_resistance) {
  auto data = std::make_unique<LevelData>();
  data->graph = std::make_unique<ApproxGraph>(model, level, vertex_cap);
  data->el = assemble(*data->graph);
  data->basis = eigenbasis(data->el);
  if (with_resistance) data->resistance = resistance_matrix(data->el);
  return data;
}

KernelField build_family_kernel(const SpectralBasis& basis, const EnergyLaplacian& el,
                                const std::string& family, double alpha, KernelRoute route,
                                const QuadratureConfig& qcfg) {
  KernelFamily fam = parse_kernel_family(family);
  switch (fam) {
    case KernelFamily::riesz_imaginary:
      return riesz_imaginary_kernel(basis, alpha, route, qcfg);
    case KernelFamily::bessel: {
      if (alpha < 0) return bessel_kernel(basis, Complex(alpha, 0), route, qcfg);
      int k = static_cast<int>(std::floor(alpha)) + 1;
      return bessel_group_extension(basis, el, Complex(alpha, 0), k, route, qcfg);
    }
    case KernelFamily::bessel_imaginary:
      return bessel_imaginary_kernel(basis, alpha, route, qcfg);
    case KernelFamily::laplace_type:
      return laplace_type_kernel(basis, MultiplierSpec::power_imag(alpha), qcfg);
    case KernelFamily::lsm:
      return lsm_kernel(basis, alpha, MultiplierSpec::constant(), route, qcfg);
  }
  throw DomainError("unsupported kernel family");
}

std::vector<std::string> default_estimates() {
  return {"size",    "laplacian_smooth", "holder",   "heat_envelope", "int_exp",
          "l1_rows", "hilbert_schmidt",  "lp_norms", "lsm_regimes"};
}

int run_build(const RunConfig& cfg) {
  IFSModel model = build_model(cfg.model);
  ApproxGraph graph = build_graph(model, cfg.level, cfg.vertex_cap);
  std::string base = cfg.out_dir + "/" + tag(cfg, cfg.level);
  write_graph_json(graph, base + "_graph.json");
  std::cout << "wrote " << base + "_graph.json" << " (" << graph.vertex_count()
            << " vertices, " << graph.edges().size() << " edges)\n";
  return 0;
}

int run_spectrum(const RunConfig& cfg) {
  IFSModel model = build_model(cfg.model);
  auto data = build_level(model, cfg.level, cfg.vertex_cap, false);
  std::string base = cfg.out_dir + "/" + tag(cfg, cfg.level);
  write_eigenvalues_csv(data->basis, base + "_eigenvalues.csv");
  write_basis_binary(data->basis, base + "_basis.bin");
  std::cout << "wrote " << base + "_eigenvalues.csv (" << data->basis.size() << " rows)\n";
  std::cout << "wrote " << base + "_basis.bin\n";
  return 0;
}

int run_kernel(const RunConfig& cfg) {
  IFSModel model = build_model(cfg.model);
  auto data = build_level(model, cfg.level, cfg.vertex_cap, false);
  QuadratureConfig qcfg;
  qcfg.rel_tol = cfg.rel_tol;

  Json bundle;
  bundle["schema"] = "fraclap/kernel-run/v1";
  bundle["config"] = config_echo(cfg);
  Json results = Json::array();
  for (const std::string& family : cfg.families) {
    for (double alpha : cfg.alphas) {
      Json item;
      item["family"] = family;
      item["alpha"] = alpha;
      std::string base = cfg.out_dir + "/" + tag(cfg, cfg.level) + "_" + family + "_a" +
                         alpha_str(alpha);
      if (cfg.route == "spectral" || cfg.route == "both") {
        KernelField ks = build_family_kernel(data->basis, data->el, family, alpha,
                                             KernelRoute::spectral, qcfg);
        write_kernel_binary(ks, base + "_spectral");
        item["spectral"] = base + "_spectral.bin";
        if (cfg.route == "both") {
          KernelField kq = build_family_kernel(data->basis, data->el, family, alpha,
                                               KernelRoute::quadrature, qcfg);
          write_kernel_binary(kq, base + "_quadrature");
          item["quadrature"] = base + "_quadrature.bin";
          item["route_relative_frobenius"] =
              relative_frobenius_error(kq.values, ks.values);
        }
      } else {
        KernelField kq = build_family_kernel(data->basis, data->el, family, alpha,
                                             parse_kernel_route(cfg.route), qcfg);
        write_kernel_binary(kq, base + "_" + cfg.route);
        item[cfg.route] = base + "_" + cfg.route + ".bin";
      }
      results.push_back(item);
    }
  }
  bundle["kernels"] = results;
  write_reports_json(bundle, cfg.out_dir + "/kernel_report.json");
  std::cout << "wrote " << cfg.out_dir + "/kernel_report.json\n";
  return 0;
}

namespace {

struct VerifyContext {
  IFSModel model;
  std::vector<std::unique_ptr<LevelData>> levels;
  QuadratureConfig qcfg;
};

std::vector<KernelLevelView> make_views(const VerifyContext& ctx,
                                        const std::vector<CMatrix>& kernels) {
  std::vector<KernelLevelView> views;
  for (std::size_t i = 0; i < ctx.levels.size(); ++i)
    views.push_back({ctx.levels[i]->basis.level, &kernels[i], &ctx.levels[i]->resistance,
                     &ctx.levels[i]->el});
  return views;
}

}  // namespace

int run_verify(const RunConfig& cfg) {
  IFSModel model = build_model(cfg.model);
  const double d = model.resistance_dim;

  VerifyContext ctx;
  ctx.model = model;
  ctx.qcfg.rel_tol = cfg.rel_tol;
  for (int level : effective_levels(cfg))
    ctx.levels.push_back(build_level(model, level, cfg.vertex_cap));
  LevelData& finest = *ctx.levels.back();

  std::vector<std::string> wanted = cfg.all_estimates || cfg.estimates.empty()
                                        ? default_estimates()
                                        : cfg.estimates;
  auto want = [&](const std::string& id) {
    return std::find(wanted.begin(), wanted.end(), id) != wanted.end();
  };

  std::vector<BoundReport> reports;
  auto add = [&](BoundReport r, const std::string& param = "") {
    r.model = cfg.model;
    if (!param.empty()) r.parameter = param;
    reports.push_back(std::move(r));
  };

  SizeBoundOptions sopts;
  sopts.exponent_tol_frac = cfg.exponent_tol_frac;
  sopts.drift_cap = cfg.drift_cap;
  sopts.two_sided = cfg.exponent_two_sided;

  // Kernel-based estimates per operator family and parameter.
  if (want("size") || want("laplacian_smooth") || want("holder") || want("lp_norms")) {
    for (const std::string& family : cfg.families) {
      for (double alpha : cfg.alphas) {
        std::vector<CMatrix> kernels;
        for (auto& lv : ctx.levels)
          kernels.push_back(build_family_kernel(lv->basis, lv->el, family, alpha,
                                                KernelRoute::spectral, ctx.qcfg)
                                .values);
        auto views = make_views(ctx, kernels);
        std::string param = family + " alpha=" + alpha_str(alpha);
        if (want("size")) add(verify_size_bound(views, d, sopts), param);
        if (want("laplacian_smooth")) add(verify_laplacian_bound(views, d, sopts), param);
        if (want("holder")) {
          HolderConfig hc = default_holder_config(model);
          if (cfg.holder_c > 0) hc.c = cfg.holder_c;
          hc.pair_budget = cfg.holder_budget;
          hc.min_exponent = cfg.holder_min_exponent;
          hc.seed = cfg.seed;
          hc.drift_cap = cfg.drift_cap;
          std::vector<KernelLevelView> fine{views.back()};
          add(verify_holder(fine, d, hc), param);
        }
        if (want("lp_norms")) {
          std::vector<const SpectralBasis*> bases;
          for (auto& lv : ctx.levels) bases.push_back(&lv->basis);
          for (double p : cfg.lp_exponents)
            add(verify_lp_norms(views, bases, p, cfg.lp_trials, cfg.seed, 2.0),
                param + " p=" + alpha_str(p));
        }
        // Log-log cloud for external plotting.
        std::vector<std::pair<double, double>> plot;
        const CMatrix& K = kernels.back();
        const Matrix& R = finest.resistance;
        Index step = std::max<Index>(1, K.rows() * K.rows() / 20000);
        Index c = 0;
        for (Index x = 0; x < K.rows(); ++x)
          for (Index y = x + 1; y < K.rows(); ++y)
            if (++c % step == 0 && std::abs(K(x, y)) > 0)
              plot.emplace_back(std::log10(R(x, y)), std::log10(std::abs(K(x, y))));
        write_plot_data(plot, cfg.out_dir + "/plot_size_" + family + "_a" +
                                  alpha_str(alpha) + ".dat");
      }
    }
  }

  EnvelopeFit fit;
  bool have_fit = false;
  if (want("heat_envelope") || want("int_exp")) {
    ScalingWindow win = scaling_window(finest.basis, cfg.size_constant);
    auto t_grid = log_grid(win.lo, win.hi, cfg.heat_t_points);
    EnvelopeSamples samples;
    samples.diagonal = sample_vertices(finest.basis.size(), 12);
    samples.pairs = sample_pairs(finest.resistance, 200, cfg.seed ^ 0xabcdef);
    fit = heat_envelope_fit(finest.basis, finest.resistance, t_grid, samples);
    have_fit = true;

    BoundReport rep;
    rep.estimate_id = "heat_envelope";
    rep.fitted_exponent = fit.beta;
    rep.target_exponent = model.beta();
    rep.exponent_tolerance = model.name == ModelName::interval ? 0.03 : 0.05;
    rep.per_level_constants.emplace_back(finest.basis.level, fit.c_upper);
    rep.drift = fit.c_upper / fit.c_lower;
    rep.drift_cap = cfg.drift_cap;
    rep.sample_count = fit.sample_count;
    rep.details["beta"] = fit.beta;
    rep.details["gamma"] = fit.gamma;
    rep.details["c_rate"] = fit.c_rate;
    rep.details["c_upper"] = fit.c_upper;
    rep.details["c_lower"] = fit.c_lower;
    rep.details["residual_rms"] = fit.residual_rms;
    bool gamma_ok =
        model.name == ModelName::interval ? std::abs(fit.gamma - 1.0) <= 0.1 : true;
    rep.pass = std::abs(fit.beta - rep.target_exponent) <= rep.exponent_tolerance &&
               gamma_ok && rep.drift <= rep.drift_cap;
    add(rep);
  }

  if (want("int_exp")) {
    const double t_lo = 10.0 * std::pow(cfg.size_constant * std::pow(model.r(), finest.basis.level),
                                        d + 1.0);
    auto t_grid = log_grid(t_lo, 1000.0 * t_lo, cfg.heat_t_points);
    auto centers = sample_vertices(finest.basis.size(), 5);
    add(verify_int_exp(finest.resistance, finest.el.mass, d, fit.gamma, fit.c_rate, t_grid,
                       centers, 4.0),
        "gamma=" + alpha_str(fit.gamma));
  }

  if (want("l1_rows")) {
    std::vector<CMatrix> kernels;
    for (auto& lv : ctx.levels)
      kernels.push_back(bessel_kernel(lv->basis, Complex(-1.0, 0), KernelRoute::spectral,
                                      ctx.qcfg)
                            .values);
    add(verify_l1_rows(make_views(ctx, kernels), 2.0), "bessel alpha=-1");
  }

  if (want("hilbert_schmidt")) {
    std::vector<const SpectralBasis*> bases;
    for (auto& lv : ctx.levels) bases.push_back(&lv->basis);
    const double threshold = -d / (2.0 * (d + 1.0));
    add(verify_hilbert_schmidt(bases, Complex(threshold - 0.05, 0), true));
    add(verify_hilbert_schmidt(bases, Complex(threshold + 0.05, 0), false));
  }

  if (want("lsm_regimes")) {
    std::vector<double> s_values =
        cfg.lsm_s > 0 ? std::vector<double>{cfg.lsm_s} : std::vector<double>{0.5 * d, d + 1.0};
    for (double s : s_values) {
      std::vector<CMatrix> kernels;
      for (auto& lv : ctx.levels)
        kernels.push_back(lsm_kernel(lv->basis, s, MultiplierSpec::constant(),
                                     KernelRoute::spectral, ctx.qcfg)
                              .values);
      add(verify_lsm_regimes(make_views(ctx, kernels), d, s, cfg.drift_cap));
    }
  }

  Json bundle;
  bundle["schema"] = "fraclap/verify/v1";
  bundle["config"] = config_echo(cfg);
  Json jreports = Json::array();
  bool all_pass = true;
  for (const BoundReport& r : reports) {
    jreports.push_back(report_to_json(r));
    all_pass = all_pass && r.pass;
  }
  bundle["reports"] = jreports;
  bundle["all_pass"] = all_pass;
  write_reports_json(bundle, cfg.out_dir + "/reports.json");
  write_reports_csv(reports, cfg.out_dir + "/summary.csv");
  for (const BoundReport& r : reports)
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.estimate_id
              << (r.parameter.empty() ? "" : " (" + r.parameter + ")") << " fitted="
              << r.fitted_exponent << " target=" << r.target_exponent << " drift=" << r.drift
              << "\n";
  std::cout << "wrote " << cfg.out_dir + "/reports.json\n";
  return all_pass ? 0 : 1;
}

int run_product(const RunConfig& cfg) {
  IFSModel model = build_model(cfg.model);
  const double d = model.resistance_dim;
  QuadratureConfig qcfg;
  qcfg.rel_tol = cfg.rel_tol;

  auto levels = effective_levels(cfg);
  std::vector<int> use(levels.end() - std::min<std::size_t>(2, levels.size()), levels.end());
  std::vector<std::unique_ptr<LevelData>> data;
  for (int l : use) data.push_back(build_level(model, l, cfg.vertex_cap));

  // Factor envelope fit fixes the metric exponent gamma.
  LevelData& finest = *data.back();
  ScalingWindow win = scaling_window(finest.basis, cfg.size_constant);
  EnvelopeSamples samples;
  samples.diagonal = sample_vertices(finest.basis.size(), 10);
  samples.pairs = sample_pairs(finest.resistance, 150, cfg.seed ^ 0xf00d);
  EnvelopeFit fit = heat_envelope_fit(finest.basis, finest.resistance,
                                      log_grid(win.lo, win.hi, cfg.heat_t_points), samples);

  std::vector<BoundReport> reports;
  for (const std::string& family : cfg.families) {
    KernelFamily fam = parse_kernel_family(family);
    if (fam == KernelFamily::laplace_type || fam == KernelFamily::lsm) continue;
    for (double alpha_raw : cfg.alphas) {
      Complex alpha = fam == KernelFamily::bessel ? Complex(alpha_raw, 0)
                                                  : Complex(0, alpha_raw);
      if (fam == KernelFamily::bessel && alpha_raw >= 0) continue;
      std::vector<ProductKernelEvaluator> evals;
      std::vector<ProductMetric> metrics;
      evals.reserve(data.size());
      for (auto& lv : data) {
        evals.emplace_back(lv->basis, cfg.product_copies, fam, alpha);
        metrics.push_back(
            ProductMetric{&lv->resistance, fit.gamma, d, cfg.product_copies});
      }
      std::vector<ProductLevelView> views;
      for (std::size_t i = 0; i < data.size(); ++i)
        views.push_back({&evals[i], &metrics[i], data[i]->graph.get(), data[i]->basis.level});

      ProductSampleConfig scfg;
      scfg.pair_budget = cfg.product_budget;
      scfg.seed = cfg.seed ^ 0x77;
      SizeBoundOptions sopts;
      sopts.exponent_tol_frac = cfg.exponent_tol_frac;
      sopts.drift_cap = cfg.drift_cap;
      sopts.two_sided = cfg.exponent_two_sided;
      sopts.min_decades = 1.0;

      std::string param = family + " alpha=" + alpha_str(alpha_raw);
      auto add = [&](BoundReport r) {
        r.model = cfg.model;
        r.parameter = param + " N=" + std::to_string(cfg.product_copies);
        reports.push_back(std::move(r));
      };
      add(verify_product_size(views, d, scfg, sopts));
      add(verify_product_laplacian(views, d, scfg, sopts));

      ProductHolderConfig hc;
      HolderConfig base = default_holder_config(model);
      hc.c = cfg.product_holder_c > 0 ? cfg.product_holder_c
                                      : (cfg.holder_c > 0 ? cfg.holder_c : base.c);
      hc.triple_budget = cfg.product_holder_budget;
      hc.seed = cfg.seed ^ 0x78;
      hc.drift_cap = cfg.drift_cap;
      std::vector<ProductLevelView> fine{views.back()};
      add(verify_product_holder(fine, d, hc));
    }
  }

  Json bundle;
  bundle["schema"] = "fraclap/product/v1";
  bundle["config"] = config_echo(cfg);
  bundle["metric_gamma"] = fit.gamma;
  Json jreports = Json::array();
  bool all_pass = true;
  for (const BoundReport& r : reports) {
    jreports.push_back(report_to_json(r));
    all_pass = all_pass && r.pass;
  }
  bundle["reports"] = jreports;
  bundle["all_pass"] = all_pass;
  write_reports_json(bundle, cfg.out_dir + "/product_reports.json");
  write_reports_csv(reports, cfg.out_dir + "/product_summary.csv");
  for (const BoundReport& r : reports)
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.estimate_id << " (" << r.parameter
              << ") fitted=" << r.fitted_exponent << " target=" << r.target_exponent << "\n";
  return all_pass ? 0 : 1;
}

int run_report(const RunConfig& cfg) {
  std::string dir = cfg.report_dir.empty() ? cfg.out_dir : cfg.report_dir;
  std::vector<BoundReport> reports;
  if (!std::filesystem::is_directory(dir)) throw ConfigError("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  for (const std::string& f : files) {
    Json j;
    try {
      j = Json::parse(read_text_file(f));
    } catch (const std::exception&) {
      continue;
    }
    if (!j.contains("reports")) continue;
    for (const auto& jr : j["reports"]) reports.push_back(report_from_json(jr));
  }
  if (reports.empty()) throw ConfigError("no report files found in " + dir);

  std::printf("%-18s %-10s %-28s %12s %12s %8s %6s\n", "estimate", "model", "parameter",
              "fitted", "target", "drift", "pass");
  for (const BoundReport& r : reports)
    std::printf("%-18s %-10s %-28s %12.5f %12.5f %8.3f %6s\n", r.estimate_id.c_str(),
                r.model.c_str(), r.parameter.c_str(), r.fitted_exponent, r.target_exponent,
                r.drift, r.pass ? "yes" : "NO");
  return 0;
}

}  // namespace fraclap
