#include "fraclap/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace fraclap {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json graph_to_json(const ApproxGraph& graph) {
  const IFSModel& m = graph.model();
  Json j;
  j["schema"] = "fraclap/graph/v1";
  j["model"] = to_string(m.name);
  j["level"] = graph.level();
  j["branch_count"] = m.branch_count;
  j["boundary_size"] = m.boundary_size;
  j["resistance_dim"] = m.resistance_dim;
  j["energy_weights"] = Json::array();
  j["measure_weights"] = Json::array();
  for (int i = 0; i < m.branch_count; ++i) {
    j["energy_weights"].push_back(m.energy_weights[i].str());
    j["measure_weights"].push_back(m.measure_weights[i].str());
  }
  Json verts = Json::array();
  for (Index v = 0; v < graph.vertex_count(); ++v) {
    Json jv;
    jv["id"] = v;
    jv["measure"] = graph.vertex_measure()[v];
    jv["boundary"] = graph.is_root_boundary(v);
    Json words = Json::array();
    for (const Address& a : graph.addresses(v)) words.push_back(a.word.str());
    jv["cells"] = words;
    verts.push_back(jv);
  }
  j["vertices"] = verts;
  Json edges = Json::array();
  for (const Edge& e : graph.edges())
    edges.push_back(Json{{"p", e.p}, {"q", e.q}, {"conductance", e.conductance},
                         {"cell", e.cell.str()}});
  j["edges"] = edges;
  Json cells = Json::object();
  for (const Word& w : graph.words_at_level(graph.level())) {
    Json ids = Json::array();
    for (Index v : graph.cell_vertices(w)) ids.push_back(v);
    cells[w.str().empty() ? "-" : w.str()] = ids;
  }
  j["cells"] = cells;
  return j;
}

void write_graph_json(const ApproxGraph& graph, const std::string& path) {
  write_text_file(path, graph_to_json(graph).dump(2) + "\n");
}

namespace {

constexpr char kBasisMagic[8] = {'F', 'L', 'S', 'B', '0', '0', '0', '1'};

void put_i64(std::ofstream& os, std::int64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::int64_t get_i64(std::ifstream& is) {
  std::int64_t v;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void put_doubles(std::ofstream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}
void get_doubles(std::ifstream& is, double* p, std::size_t n) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void write_basis_binary(const SpectralBasis& basis, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os.write(kBasisMagic, sizeof(kBasisMagic));
  put_i64(os, basis.model_name == ModelName::gasket ? 1 : 0);
  put_i64(os, basis.level);
  put_i64(os, basis.size());
  double d = basis.resistance_dim;
  put_doubles(os, &d, 1);
  put_doubles(os, basis.eigenvalues.data(), basis.size());
  put_doubles(os, basis.mass.data(), basis.size());
  put_doubles(os, basis.eigenvectors.data(), basis.size() * basis.size());
}

SpectralBasis read_basis_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kBasisMagic, sizeof(magic)) != 0)
    throw ConfigError("not a basis file: " + path);
  SpectralBasis b;
  b.model_name = get_i64(is) == 1 ? ModelName::gasket : ModelName::interval;
  b.level = static_cast<int>(get_i64(is));
  Index n = get_i64(is);
  get_doubles(is, &b.resistance_dim, 1);
  b.eigenvalues.resize(n);
  b.mass.resize(n);
  b.eigenvectors.resize(n, n);
  get_doubles(is, b.eigenvalues.data(), n);
  get_doubles(is, b.mass.data(), n);
  get_doubles(is, b.eigenvectors.data(), n * n);
  if (!is) throw ConfigError("truncated basis file: " + path);
  b.basis_id = to_string(b.model_name) + ":m" + std::to_string(b.level) + ":n" +
               std::to_string(n);
  return b;
}

void write_eigenvalues_csv(const SpectralBasis& basis, const std::string& path) {
  std::string out = "index,eigenvalue\n";
  for (Index i = 0; i < basis.size(); ++i)
    out += std::to_string(i) + "," + format_double(basis.eigenvalues[i]) + "\n";
  write_text_file(path, out);
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::string out = "row,col,value\n";
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(m(i, j)) + "\n";
  write_text_file(path, out);
}

namespace {
constexpr char kKernelMagic[8] = {'F', 'L', 'K', 'F', '0', '0', '0', '1'};
}

void write_kernel_binary(const KernelField& kf, const std::string& path_prefix) {
  {
    std::ofstream os(path_prefix + ".bin", std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path_prefix + ".bin for writing");
    os.write(kKernelMagic, sizeof(kKernelMagic));
    put_i64(os, kf.values.rows());
    put_doubles(os, reinterpret_cast<const double*>(kf.values.data()),
                2 * kf.values.size());
    put_doubles(os, kf.mass.data(), kf.mass.size());
  }
  Json side;
  side["schema"] = "fraclap/kernel/v1";
  side["family"] = to_string(kf.family);
  side["alpha_re"] = kf.alpha.real();
  side["alpha_im"] = kf.alpha.imag();
  side["lsm_s"] = kf.lsm_s;
  side["route"] = to_string(kf.route);
  side["basis_id"] = kf.basis_id;
  side["level"] = kf.level;
  side["n"] = kf.values.rows();
  write_text_file(path_prefix + ".json", side.dump(2) + "\n");
}

KernelField read_kernel_binary(const std::string& path_prefix) {
  Json side = Json::parse(read_text_file(path_prefix + ".json"));
  KernelField kf;
  kf.family = parse_kernel_family(side.at("family").get<std::string>());
  kf.alpha = Complex(side.at("alpha_re").get<double>(), side.at("alpha_im").get<double>());
  kf.lsm_s = side.at("lsm_s").get<double>();
  kf.route = parse_kernel_route(side.at("route").get<std::string>());
  kf.basis_id = side.at("basis_id").get<std::string>();
  kf.level = side.at("level").get<int>();
  std::ifstream is(path_prefix + ".bin", std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path_prefix + ".bin");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kKernelMagic, sizeof(magic)) != 0)
    throw ConfigError("not a kernel file: " + path_prefix + ".bin");
  Index n = get_i64(is);
  kf.values.resize(n, n);
  kf.mass.resize(n);
  get_doubles(is, reinterpret_cast<double*>(kf.values.data()), 2 * n * n);
  get_doubles(is, kf.mass.data(), n);
  if (!is) throw ConfigError("truncated kernel file");
  return kf;
}

void write_kernel_csv(const KernelField& kf, const std::string& path) {
  std::string out = "row,col,re,im\n";
  for (Index i = 0; i < kf.values.rows(); ++i)
    for (Index j = 0; j < kf.values.cols(); ++j)
      out += std::to_string(i) + "," + std::to_string(j) + "," +
             format_double(kf.values(i, j).real()) + "," +
             format_double(kf.values(i, j).imag()) + "\n";
  write_text_file(path, out);
}

Json report_to_json(const BoundReport& r) {
  Json j;
  j["estimate_id"] = r.estimate_id;
  j["model"] = r.model;
  j["parameter"] = r.parameter;
  j["fitted_exponent"] = r.fitted_exponent;
  j["target_exponent"] = r.target_exponent;
  j["exponent_tolerance"] = r.exponent_tolerance;
  Json consts = Json::array();
  for (auto& [lvl, c] : r.per_level_constants)
    consts.push_back(Json{{"level", lvl}, {"constant", c}});
  j["per_level_constants"] = consts;
  j["drift"] = r.drift;
  j["drift_cap"] = r.drift_cap;
  j["pass"] = r.pass;
  j["sample_count"] = r.sample_count;
  Json det = Json::object();
  for (auto& [k, v] : r.details) det[k] = v;
  j["details"] = det;
  return j;
}

BoundReport report_from_json(const Json& j) {
  BoundReport r;
  r.estimate_id = j.at("estimate_id").get<std::string>();
  r.model = j.value("model", "");
  r.parameter = j.value("parameter", "");
  r.fitted_exponent = j.at("fitted_exponent").get<double>();
  r.target_exponent = j.at("target_exponent").get<double>();
  r.exponent_tolerance = j.at("exponent_tolerance").get<double>();
  for (const auto& c : j.at("per_level_constants"))
    r.per_level_constants.emplace_back(c.at("level").get<int>(),
                                       c.at("constant").get<double>());
  r.drift = j.at("drift").get<double>();
  r.drift_cap = j.at("drift_cap").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.sample_count = j.at("sample_count").get<long>();
  for (auto it = j.at("details").begin(); it != j.at("details").end(); ++it)
    r.details[it.key()] = it.value().get<double>();
  return r;
}

void write_reports_json(const Json& bundle, const std::string& path) {
  write_text_file(path, bundle.dump(2) + "\n");
}

void write_reports_csv(const std::vector<BoundReport>& reports, const std::string& path) {
  std::string out =
      "estimate_id,model,parameter,fitted_exponent,target_exponent,exponent_tolerance,"
      "drift,drift_cap,pass,sample_count\n";
  for (const BoundReport& r : reports) {
    out += r.estimate_id + "," + r.model + "," + r.parameter + "," +
           format_double(r.fitted_exponent) + "," + format_double(r.target_exponent) + "," +
           format_double(r.exponent_tolerance) + "," + format_double(r.drift) + "," +
           format_double(r.drift_cap) + "," + (r.pass ? "1" : "0") + "," +
           std::to_string(r.sample_count) + "\n";
  }
  write_text_file(path, out);
}

void write_plot_data(const std::vector<std::pair<double, double>>& rows,
                     const std::string& path) {
  std::string out;
  for (auto [a, b] : rows) out += format_double(a) + " " + format_double(b) + "\n";
  write_text_file(path, out);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  std::string s((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  os << content;
}

}  // namespace fraclap
