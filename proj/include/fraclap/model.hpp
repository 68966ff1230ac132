#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fraclap/types.hpp"

namespace fraclap {

struct Rational {
  std::int64_t num{0};
  std::int64_t den{1};
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

enum class ModelName { gasket, interval };

ModelName parse_model_name(const std::string& s);
std::string to_string(ModelName m);

/// Iterated function system data: contraction count, energy weights r_i,
/// measure weights mu_i = r_i^d, boundary size and resistance dimension d.
struct IFSModel {
  ModelName name{ModelName::interval};
  int branch_count{0};
  std::vector<Rational> energy_weights;
  std::vector<Rational> measure_weights;
  int boundary_size{0};
  double resistance_dim{0.0};

  // Shipped models have equal weights across branches.
  double r() const { return energy_weights.at(0).value(); }
  double mu() const { return measure_weights.at(0).value(); }
  double beta() const { return resistance_dim / (resistance_dim + 1.0); }
};

IFSModel build_model(ModelName name);
IFSModel build_model(const std::string& name);

/// Finite word over the branch alphabet; letters stored 0-based, printed 1-based.
struct Word {
  std::vector<std::uint8_t> letters;

  int length() const { return static_cast<int>(letters.size()); }
  bool empty() const { return letters.empty(); }
  std::string str() const;
  bool operator==(const Word&) const = default;
  bool operator<(const Word& o) const { return letters < o.letters; }
};

/// A vertex address: the image F_word(q_corner) of a boundary point.
struct Address {
  Word word;
  int corner{0};
};

struct Edge {
  Index p{0};
  Index q{0};
  double conductance{1.0};
  Word cell;  // the level-m cell the edge lies in
};

/// Level-m graph approximation with identified shared vertices, lumped
/// probability measure and word-addressed cells.
class ApproxGraph {
 public:
  ApproxGraph(IFSModel model, int level, Index vertex_cap = default_vertex_cap);

  static constexpr Index default_vertex_cap = 5000;

  const IFSModel& model() const { return model_; }
  int level() const { return level_; }
  Index vertex_count() const { return static_cast<Index>(measure_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vector& vertex_measure() const { return measure_; }
  bool is_root_boundary(Index v) const { return root_boundary_[v] != 0; }
  Index root_boundary_vertex(int corner) const;

  const std::vector<std::vector<Index>>& adjacency() const { return adjacency_; }
  const std::vector<Address>& addresses(Index v) const { return addresses_[v]; }

  /// Exact integer address key; level-(m) keys double into level-(m+1) keys.
  const std::vector<std::int64_t>& key(Index v) const { return keys_[v]; }

  /// Vertex holding the given address, or -1.
  Index find_vertex(const Word& word, int corner) const;

  /// All level-m vertices lying in the cell F_word(K); |word| <= level.
  std::vector<Index> cell_vertices(const Word& word) const;
  /// The |V0| boundary vertices F_word(V0) of that cell.
  std::vector<Index> cell_boundary(const Word& word) const;

  std::vector<Word> words_at_level(int k) const;

 private:
  std::vector<std::int64_t> address_key(const Word& word, int corner) const;

  IFSModel model_;
  int level_;
  std::vector<Edge> edges_;
  Vector measure_;
  std::vector<char> root_boundary_;
  std::vector<std::vector<Index>> adjacency_;
  std::vector<std::vector<Address>> addresses_;
  std::vector<std::vector<std::int64_t>> keys_;
  std::map<std::vector<std::int64_t>, Index> index_of_key_;
};

ApproxGraph build_graph(const IFSModel& model, int level,
                        Index vertex_cap = ApproxGraph::default_vertex_cap);

/// All cells at the unique level whose size bracket contains target_size,
/// under the convention: a level-k cell has size R iff c1*r^k <= R < c1*r^(k-1).
struct CellPartition {
  double target_size{0.0};
  double size_constant{1.0};  // c1
  int cell_level{0};
  std::vector<Word> cells;
};

CellPartition cell_partition(const ApproxGraph& graph, double target_size,
                             double size_constant = 1.0);

}  // namespace fraclap
