#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fraclap/io.hpp"
#include "fraclap/model.hpp"

using namespace fraclap;

namespace {

// Independent route to the resistance dimension: bisection on mu = r^d.
double solve_dimension(double r, double mu) {
  double lo = 0.1, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (std::pow(r, mid) > mu ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Index gasket_vertex_count(int m) {
  Index p = 1;
  for (int i = 0; i <= m; ++i) p *= 3;
  return (p + 3) / 2;
}

}  // namespace

TEST_CASE("shipped models satisfy the measure-weight normalization") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    IFSModel m = build_model(name);
    double mu_sum = 0;
    for (int i = 0; i < m.branch_count; ++i) {
      mu_sum += m.measure_weights[i].value();
      CHECK(std::abs(m.measure_weights[i].value() -
                     std::pow(m.energy_weights[i].value(), m.resistance_dim)) < 1e-12);
    }
    CHECK(mu_sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("resistance dimension matches an independent bisection solve") {
  IFSModel g = build_model("gasket");
  CHECK(std::abs(g.resistance_dim - solve_dimension(0.6, 1.0 / 3.0)) < 1e-10);
  CHECK(g.resistance_dim == doctest::Approx(std::log(3.0) / std::log(5.0 / 3.0)).epsilon(1e-14));
  // Heat scaling exponent d/(d+1) collapses to log3/log5.
  CHECK(g.beta() == doctest::Approx(std::log(3.0) / std::log(5.0)).epsilon(1e-13));

  IFSModel i = build_model("interval");
  CHECK(i.resistance_dim == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(build_model("carpet"), DomainError);
}

TEST_CASE("vertex and edge counts follow the closed forms for levels 0..7") {
  IFSModel g = build_model(ModelName::gasket);
  for (int m = 0; m <= 7; ++m) {
    ApproxGraph graph(g, m, 50000);
    CHECK(graph.vertex_count() == gasket_vertex_count(m));
    Index p = 1;
    for (int i = 0; i <= m; ++i) p *= 3;
    CHECK(static_cast<Index>(graph.edges().size()) == p);
  }
  IFSModel iv = build_model(ModelName::interval);
  for (int m = 0; m <= 7; ++m) {
    ApproxGraph graph(iv, m);
    CHECK(graph.vertex_count() == (Index{1} << m) + 1);
    CHECK(graph.edges().size() == (std::size_t{1} << m));
  }
}

TEST_CASE("level-1 gasket matches a hand enumeration") {
  // Three half-scale triangles sharing pairwise midpoints: 6 vertices, 9 edges,
  // every conductance 5/3.
  IFSModel g = build_model(ModelName::gasket);
  ApproxGraph graph(g, 1);
  CHECK(graph.vertex_count() == 6);
  CHECK(graph.edges().size() == 9);
  for (const Edge& e : graph.edges())
    CHECK(e.conductance == doctest::Approx(5.0 / 3.0).epsilon(1e-15));

  // Each corner has degree 2, each midpoint degree 4.
  std::multiset<std::size_t> degrees;
  for (Index v = 0; v < 6; ++v) degrees.insert(graph.adjacency()[v].size());
  CHECK(degrees == std::multiset<std::size_t>({2, 2, 2, 4, 4, 4}));
}

TEST_CASE("interval level 3 is the dyadic subdivision") {
  IFSModel iv = build_model(ModelName::interval);
  ApproxGraph graph(iv, 3);
  CHECK(graph.vertex_count() == 9);
  CHECK(graph.edges().size() == 8);
  for (const Edge& e : graph.edges()) CHECK(e.conductance == doctest::Approx(8.0));
}

TEST_CASE("vertex measures are positive and sum to one at every level") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    IFSModel m = build_model(name);
    for (int level = 0; level <= 5; ++level) {
      ApproxGraph graph(m, level);
      CHECK(graph.vertex_measure().minCoeff() > 0);
      CHECK(std::abs(graph.vertex_measure().sum() - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("vertex sets are nested across levels under key doubling") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    IFSModel m = build_model(name);
    for (int level = 0; level <= 4; ++level) {
      ApproxGraph coarse(m, level);
      ApproxGraph fine(m, level + 1);
      std::set<std::vector<std::int64_t>> fine_keys;
      for (Index v = 0; v < fine.vertex_count(); ++v) fine_keys.insert(fine.key(v));
      for (Index v = 0; v < coarse.vertex_count(); ++v) {
        std::vector<std::int64_t> doubled = coarse.key(v);
        for (auto& c : doubled) c *= 2;
        CHECK(fine_keys.count(doubled) == 1);
      }
    }
  }
}

TEST_CASE("edges lie in exactly one cell; cells meet only at shared vertices") {
  IFSModel m = build_model(ModelName::gasket);
  ApproxGraph graph(m, 3);
  std::set<std::pair<Index, Index>> seen;
  for (const Edge& e : graph.edges()) {
    auto key = std::minmax(e.p, e.q);
    CHECK(seen.insert({key.first, key.second}).second);  // no duplicate edges
  }
  // Distinct level-3 cells intersect in at most one vertex.
  auto words = graph.words_at_level(3);
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b) {
      auto va = graph.cell_vertices(words[a]);
      auto vb = graph.cell_vertices(words[b]);
      std::set<Index> sa(va.begin(), va.end());
      int common = 0;
      for (Index v : vb) common += sa.count(v);
      CHECK(common <= 1);
    }
}

TEST_CASE("cell partition picks the unique level for a target size") {
  IFSModel g = build_model(ModelName::gasket);
  ApproxGraph graph(g, 4);
  double r = g.r();
  CellPartition part = cell_partition(graph, r * r);
  CHECK(part.cell_level == 2);
  CHECK(part.cells.size() == 9);

  IFSModel iv = build_model(ModelName::interval);
  ApproxGraph igraph(iv, 5);
  CellPartition ipart = cell_partition(igraph, 0.25);
  CHECK(ipart.cell_level == 2);
  CHECK(ipart.cells.size() == 4);

  CHECK_THROWS_AS(cell_partition(graph, 2.0), DomainError);   // beyond the diameter bracket
  CHECK_THROWS_AS(cell_partition(graph, 1e-9), DomainError);  // below finest resolution
}

TEST_CASE("level cap rejects oversized graphs") {
  IFSModel g = build_model(ModelName::gasket);
  CHECK_THROWS_AS(build_graph(g, 9, 5000), DomainError);
}

TEST_CASE("graph JSON serialization round-trips the structural fields") {
  IFSModel g = build_model(ModelName::gasket);
  ApproxGraph graph(g, 2);
  Json j = graph_to_json(graph);
  CHECK(j["model"] == "gasket");
  CHECK(j["level"] == 2);
  CHECK(j["vertices"].size() == static_cast<std::size_t>(graph.vertex_count()));
  CHECK(j["edges"].size() == graph.edges().size());
  CHECK(j["cells"].size() == 9);
  // Serializing twice yields identical bytes.
  CHECK(j.dump(2) == graph_to_json(graph).dump(2));
}
