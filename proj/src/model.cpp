#include "fraclap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fraclap {

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

ModelName parse_model_name(const std::string& s) {
  if (s == "gasket") return ModelName::gasket;
  if (s == "interval") return ModelName::interval;
  throw DomainError("unknown model name: " + s);
}

std::string to_string(ModelName m) {
  return m == ModelName::gasket ? "gasket" : "interval";
}

IFSModel build_model(ModelName name) {
  IFSModel m;
  m.name = name;
  if (name == ModelName::gasket) {
    m.branch_count = 3;
    m.energy_weights.assign(3, Rational{3, 5});
    m.measure_weights.assign(3, Rational{1, 3});
    m.boundary_size = 3;
  } else {
    m.branch_count = 2;
    m.energy_weights.assign(2, Rational{1, 2});
    m.measure_weights.assign(2, Rational{1, 2});
    m.boundary_size = 2;
  }
  // d solves mu = r^d.
  m.resistance_dim = std::log(m.measure_weights[0].value()) /
                     std::log(m.energy_weights[0].value());
  return m;
}

IFSModel build_model(const std::string& name) { return build_model(parse_model_name(name)); }

std::string Word::str() const {
  std::string s;
  s.reserve(letters.size());
  for (auto l : letters) s.push_back(static_cast<char>('1' + l));
  return s;
}

namespace {

Index predicted_vertex_count(const IFSModel& model, int level) {
  if (model.name == ModelName::gasket) {
    Index p = 1;
    for (int i = 0; i <= level; ++i) p *= 3;
    return (p + 3) / 2;
  }
  return (Index{1} << level) + 1;
}

}  // namespace

ApproxGraph::ApproxGraph(IFSModel model, int level, Index vertex_cap)
    : model_(std::move(model)), level_(level) {
  if (level < 0) throw DomainError("level must be nonnegative");
  Index predicted = predicted_vertex_count(model_, level);
  if (predicted > vertex_cap)
    throw DomainError("level " + std::to_string(level) + " exceeds vertex cap (" +
                      std::to_string(predicted) + " > " + std::to_string(vertex_cap) + ")");

  const int n_bdry = model_.boundary_size;

  std::vector<Word> words = words_at_level(level);

  std::vector<double> measure_acc;
  auto vertex_of = [&](const Word& w, int corner) -> Index {
    auto key = address_key(w, corner);
    auto it = index_of_key_.find(key);
    if (it != index_of_key_.end()) return it->second;
    Index id = static_cast<Index>(keys_.size());
    index_of_key_.emplace(std::move(key), id);
    keys_.push_back(address_key(w, corner));
    addresses_.emplace_back();
    measure_acc.push_back(0.0);
    root_boundary_.push_back(0);
    return id;
  };

  for (const Word& w : words) {
    double mu_w = 1.0;
    double cond = 1.0;
    for (auto l : w.letters) {
      mu_w *= model_.measure_weights[l].value();
      cond /= model_.energy_weights[l].value();
    }
    std::vector<Index> corner_ids(n_bdry);
    for (int j = 0; j < n_bdry; ++j) {
      Index v = vertex_of(w, j);
      corner_ids[j] = v;
      addresses_[v].push_back(Address{w, j});
      measure_acc[v] += mu_w / n_bdry;
    }
    for (int a = 0; a < n_bdry; ++a)
      for (int b = a + 1; b < n_bdry; ++b)
        edges_.push_back(Edge{corner_ids[a], corner_ids[b], cond, w});
  }

  measure_ = Eigen::Map<Vector>(measure_acc.data(), static_cast<Index>(measure_acc.size()));

  // Root boundary points are the fixed points F_j^level(q_j).
  for (int j = 0; j < n_bdry; ++j) {
    Word w;
    w.letters.assign(level, static_cast<std::uint8_t>(j));
    Index v = find_vertex(w, j);
    root_boundary_[v] = 1;
  }

  adjacency_.assign(vertex_count(), {});
  for (const Edge& e : edges_) {
    adjacency_[e.p].push_back(e.q);
    adjacency_[e.q].push_back(e.p);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
}

std::vector<Word> ApproxGraph::words_at_level(int k) const {
  std::vector<Word> out;
  Word w;
  w.letters.assign(k, 0);
  // Lexicographic enumeration over the branch alphabet.
  while (true) {
    out.push_back(w);
    int i = k - 1;
    while (i >= 0 && w.letters[i] == model_.branch_count - 1) {
      w.letters[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++w.letters[i];
  }
  return out;
}

std::vector<std::int64_t> ApproxGraph::address_key(const Word& word, int corner) const {
  // Exact integer coordinates: barycentric for the gasket, dyadic for the
  // interval. Applying F_i halves and shifts; denominator is 2^|word| overall.
  if (model_.name == ModelName::gasket) {
    std::vector<std::int64_t> x(3, 0);
    x[corner] = 1;
    // Invariant: sum(x) == current denominator, so F_i is x[i] += sum(x).
    for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
      std::int64_t den = std::accumulate(x.begin(), x.end(), std::int64_t{0});
      x[*it] += den;
    }
    return x;
  }
  std::int64_t num = corner;  // q_0 = 0, q_1 = 1
  std::int64_t den = 1;
  for (auto it = word.letters.rbegin(); it != word.letters.rend(); ++it) {
    num = num + (*it == 1 ? den : 0);
    den *= 2;
  }
  return {num};
}

Index ApproxGraph::root_boundary_vertex(int corner) const {
  Word w;
  w.letters.assign(level_, static_cast<std::uint8_t>(corner));
  return find_vertex(w, corner);
}

Index ApproxGraph::find_vertex(const Word& word, int corner) const {
  auto it = index_of_key_.find(address_key(word, corner));
  return it == index_of_key_.end() ? Index{-1} : it->second;
}

std::vector<Index> ApproxGraph::cell_vertices(const Word& word) const {
  std::vector<Index> out;
  const auto& wl = word.letters;
  for (Index v = 0; v < vertex_count(); ++v) {
    for (const Address& a : addresses_[v]) {
      if (a.word.letters.size() < wl.size()) continue;
      if (std::equal(wl.begin(), wl.end(), a.word.letters.begin())) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

std::vector<Index> ApproxGraph::cell_boundary(const Word& word) const {
  if (word.length() > level_) throw DomainError("cell word deeper than graph level");
  std::vector<Index> out;
  for (int j = 0; j < model_.boundary_size; ++j) {
    Word w = word;
    w.letters.resize(level_, static_cast<std::uint8_t>(j));
    out.push_back(find_vertex(w, j));
  }
  return out;
}

ApproxGraph build_graph(const IFSModel& model, int level, Index vertex_cap) {
  return ApproxGraph(model, level, vertex_cap);
}

CellPartition cell_partition(const ApproxGraph& graph, double target_size,
                             double size_constant) {
  if (target_size <= 0) throw DomainError("target size must be positive");
  const double r = graph.model().r();
  const double x = std::log(target_size / size_constant) / std::log(r);
  const int k = static_cast<int>(std::ceil(x - 1e-9));
  if (k < 0) throw DomainError("target size exceeds the diameter bracket");
  if (k > graph.level()) throw DomainError("target size below the finest cell size");
  CellPartition part;
  part.target_size = target_size;
  part.size_constant = size_constant;
  part.cell_level = k;
  auto words = graph.words_at_level(k);
  part.cells.assign(words.begin(), words.end());
  return part;
}

}  // namespace fraclap
