#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fraclap/energy.hpp"
#include "fraclap/model.hpp"

using namespace fraclap;

namespace {

Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = ((rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
  return v;
}

}  // namespace

TEST_CASE("energy of simple functions") {
  IFSModel iv = build_model(ModelName::interval);
  ApproxGraph g1(iv, 1);
  EnergyLaplacian el1 = assemble(g1);
  Vector u(3);
  for (Index v = 0; v < 3; ++v) u[v] = g1.key(v)[0] / 2.0;  // 0, 1/2, 1 by position
  CHECK(energy(el1, u) == doctest::Approx(1.0).epsilon(1e-15));

  IFSModel gm = build_model(ModelName::gasket);
  ApproxGraph g0(gm, 0);
  EnergyLaplacian el0 = assemble(g0);
  Vector ind = Vector::Zero(3);
  ind[0] = 1.0;  // two unit-conductance edges meet each corner
  CHECK(energy(el0, ind) == doctest::Approx(2.0).epsilon(1e-15));

  Vector c = Vector::Constant(3, 4.2);
  CHECK(std::abs(energy(el0, c)) < 1e-14);
}

TEST_CASE("stiffness symmetry, zero row sums, PSD with constant null space") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    ApproxGraph g(build_model(name), 3);
    EnergyLaplacian el = assemble(g);
    CHECK((el.stiffness - el.stiffness.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Vector ones = Vector::Ones(g.vertex_count());
    CHECK((el.stiffness * ones).cwiseAbs().maxCoeff() < 1e-12 * el.stiffness.cwiseAbs().maxCoeff());
    for (int i = 0; i < 5; ++i) {
      Vector u = random_vector(g.vertex_count(), 100 + i);
      CHECK(energy(el, u) >= -1e-12);
    }
  }
}

TEST_CASE("summation by parts holds exactly for the lumped measure") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    ApproxGraph g(build_model(name), 4);
    EnergyLaplacian el = assemble(g);
    for (int i = 0; i < 10; ++i) {
      Vector u = random_vector(g.vertex_count(), 7 * i + 1);
      Vector v = random_vector(g.vertex_count(), 7 * i + 2);
      double lhs = energy(el, u, v);
      Vector du = laplacian_apply(el, u);
      double rhs = -(du.array() * v.array() * el.mass.array()).sum();
      CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("harmonic extension on the gasket follows the 1/5-2/5 averaging rule") {
  IFSModel gm = build_model(ModelName::gasket);
  ApproxGraph g(gm, 1);
  Vector bdry(3);
  bdry << 1.0, 0.0, 0.0;
  Vector ext = harmonic_extension(g, bdry);

  // Midpoint adjacent to corners i and j takes (2u_i + 2u_j + u_k)/5.
  for (Index v = 0; v < g.vertex_count(); ++v) {
    if (g.is_root_boundary(v)) continue;
    auto key = g.key(v);  // barycentric numerators over denominator 2
    double expect = 0;
    if (key[0] == 1 && key[1] == 1) expect = (2.0 * 1 + 2.0 * 0 + 0) / 5.0;
    if (key[0] == 1 && key[2] == 1) expect = (2.0 * 1 + 2.0 * 0 + 0) / 5.0;
    if (key[1] == 1 && key[2] == 1) expect = (2.0 * 0 + 2.0 * 0 + 1.0) / 5.0;
    CHECK(ext[v] == doctest::Approx(expect).epsilon(1e-13));
  }

  // Extension preserves energy across levels.
  ApproxGraph g0(gm, 0);
  EnergyLaplacian el0 = assemble(g0);
  Vector u0(3);
  u0 << 1.0, 0.0, 0.0;
  double e0 = energy(el0, u0);
  CHECK(e0 == doctest::Approx(2.0));
  for (int level = 1; level <= 4; ++level) {
    ApproxGraph gl(gm, level);
    EnergyLaplacian ell = assemble(gl);
    Vector ext_l = harmonic_extension(gl, bdry);
    CHECK(std::abs(energy(ell, ext_l) - e0) < 1e-12 * e0);
  }
}

TEST_CASE("harmonic extension on the interval is linear interpolation") {
  IFSModel iv = build_model(ModelName::interval);
  Vector bdry(2);
  bdry << 0.0, 1.0;
  for (int level : {1, 3, 5}) {
    ApproxGraph g(iv, level);
    Vector ext = harmonic_extension(g, bdry);
    for (Index v = 0; v < g.vertex_count(); ++v) {
      double x = static_cast<double>(g.key(v)[0]) / (1 << level);
      CHECK(ext[v] == doctest::Approx(x).epsilon(1e-13));
    }
  }
  // Constant boundary data extends to a constant with zero energy.
  ApproxGraph g(iv, 4);
  Vector cb = Vector::Constant(2, 3.3);
  Vector ext = harmonic_extension(g, cb);
  CHECK((ext.array() - 3.3).abs().maxCoeff() < 1e-13);
  EnergyLaplacian el = assemble(g);
  CHECK(std::abs(energy(el, ext)) < 1e-13);
}

TEST_CASE("effective resistance: interval endpoints and gasket corner pairs") {
  IFSModel iv = build_model(ModelName::interval);
  for (int level : {1, 4, 6}) {
    ApproxGraph g(iv, level);
    EnergyLaplacian el = assemble(g);
    Index a = g.root_boundary_vertex(0), b = g.root_boundary_vertex(1);
    CHECK(effective_resistance(el, a, b) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Unit triangle: direct edge in parallel with the two-edge path, 1*2/(1+2).
  IFSModel gm = build_model(ModelName::gasket);
  for (int level : {0, 1}) {
    ApproxGraph g(gm, level);
    EnergyLaplacian el = assemble(g);
    Index a = g.root_boundary_vertex(0), b = g.root_boundary_vertex(1);
    CHECK(std::abs(effective_resistance(el, a, b) - 2.0 / 3.0) < 1e-12);
  }

  ApproxGraph g(gm, 2);
  EnergyLaplacian el = assemble(g);
  CHECK(effective_resistance(el, 3, 3) == 0.0);
}

TEST_CASE("resistance matrix agrees across refinement levels") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    IFSModel m = build_model(name);
    for (int level = 0; level <= 3; ++level) {
      ApproxGraph coarse(m, level);
      ApproxGraph fine(m, level + 1);
      EnergyLaplacian elc = assemble(coarse);
      EnergyLaplacian elf = assemble(fine);
      Matrix Rc = resistance_matrix(elc);
      Matrix Rf = resistance_matrix(elf);
      for (Index a = 0; a < coarse.vertex_count(); ++a) {
        std::vector<std::int64_t> ka = coarse.key(a);
        for (auto& c : ka) c *= 2;
        for (Index b = 0; b < coarse.vertex_count(); ++b) {
          std::vector<std::int64_t> kb = coarse.key(b);
          for (auto& c : kb) c *= 2;
          Index fa = -1, fb = -1;
          for (Index v = 0; v < fine.vertex_count(); ++v) {
            if (fine.key(v) == ka) fa = v;
            if (fine.key(v) == kb) fb = v;
          }
          REQUIRE(fa >= 0);
          REQUIRE(fb >= 0);
          CHECK(std::abs(Rc(a, b) - Rf(fa, fb)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("resistance satisfies the triangle inequality on random triples") {
  IFSModel gm = build_model(ModelName::gasket);
  ApproxGraph g(gm, 4);
  EnergyLaplacian el = assemble(g);
  Matrix R = resistance_matrix(el);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    Index a = rng() % g.vertex_count(), b = rng() % g.vertex_count(),
          c = rng() % g.vertex_count();
    CHECK(R(a, b) <= R(a, c) + R(c, b) + 1e-12);
  }
}

TEST_CASE("cell Green function matches the classical 1D formula") {
  IFSModel iv = build_model(ModelName::interval);
  for (int level : {3, 5}) {
    ApproxGraph g(iv, level);
    EnergyLaplacian el = assemble(g);
    GreenCellOperator green(el, Word{});  // whole interval as the cell
    auto at = [&](double x) {
      for (Index v = 0; v < g.vertex_count(); ++v)
        if (g.key(v)[0] == static_cast<std::int64_t>(x * (1 << level))) return v;
      return Index{-1};
    };
    // min(x,y)(1 - max(x,y)) at dyadic points.
    CHECK(green.value(at(0.5), at(0.5)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(green.value(at(0.25), at(0.75)) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(green.value(at(0.25), at(0.25)) == doctest::Approx(0.25 * 0.75).epsilon(1e-12));
    CHECK(green.value(at(0.0), at(0.5)) == 0.0);  // Dirichlet boundary
  }
}

TEST_CASE("cell Green function is symmetric and positive inside cells") {
  IFSModel gm = build_model(ModelName::gasket);
  ApproxGraph g(gm, 4);
  EnergyLaplacian el = assemble(g);
  Word cell{{0}};  // one level-1 cell
  GreenCellOperator green(el, cell);
  const auto& interior = green.interior();
  REQUIRE(interior.size() > 3);
  for (std::size_t i = 0; i < interior.size(); i += 3)
    for (std::size_t j = 0; j < interior.size(); j += 3) {
      double gij = green.value(interior[i], interior[j]);
      CHECK(gij == green.value(interior[j], interior[i]));
      CHECK(gij > 0);
    }
}

TEST_CASE("interior identity f = h + G(Delta f) is exact in the discrete model") {
  IFSModel gm = build_model(ModelName::gasket);
  ApproxGraph g(gm, 4);
  EnergyLaplacian el = assemble(g);

  // Harmonic input: zero residual and zero Laplacian.
  Vector bdry(3);
  bdry << 0.3, -0.7, 1.1;
  Vector h = harmonic_extension(g, bdry);
  Vector lap = laplacian_apply(el, h);
  for (Index v = 0; v < g.vertex_count(); ++v)
    if (!g.is_root_boundary(v)) CHECK(std::abs(lap[v]) < 1e-10);
  CHECK(green_identity_residual(el, Word{}, h) < 1e-12);

  for (int i = 0; i < 20; ++i) {
    Vector f = random_vector(g.vertex_count(), 555 + i);
    CHECK(green_identity_residual(el, Word{}, f) < 1e-12);
    CHECK(green_identity_residual(el, Word{{static_cast<std::uint8_t>(i % 3)}}, f) < 1e-12);
  }

  IFSModel iv = build_model(ModelName::interval);
  ApproxGraph gi(iv, 5);
  EnergyLaplacian eli = assemble(gi);
  for (int i = 0; i < 20; ++i) {
    Vector f = random_vector(gi.vertex_count(), 777 + i);
    CHECK(green_identity_residual(eli, Word{}, f) < 1e-12);
    CHECK(green_identity_residual(eli, Word{{1}}, f) < 1e-12);
  }
}

TEST_CASE("level-1 interior Green values: 9/50 diagonal, 3/50 off") {
  // Series-parallel reduction of the level-1 gasket network with Dirichlet
  // corners gives these rationals.
  IFSModel gm = build_model(ModelName::gasket);
  ApproxGraph g(gm, 3);
  GreenSeries series(g);
  const Matrix& gmat = series.g_matrix();
  REQUIRE(gmat.rows() == 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      CHECK(gmat(i, j) == doctest::Approx(i == j ? 9.0 / 50.0 : 3.0 / 50.0).epsilon(1e-12));
  CHECK(series.g_constant() == doctest::Approx(0.9).epsilon(1e-12));

  // Interval: single interior point between two conductance-2 edges.
  IFSModel iv = build_model(ModelName::interval);
  ApproxGraph gi(iv, 3);
  GreenSeries si(gi);
  CHECK(si.g_matrix()(0, 0) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("Green series partial sums converge to the solve-route Green function") {
  for (auto name : {ModelName::gasket, ModelName::interval}) {
    IFSModel m = build_model(name);
    for (int level : {2, 3, 4}) {
      ApproxGraph g(m, level);
      EnergyLaplacian el = assemble(g);
      GreenCellOperator green(el, Word{});
      GreenSeries series(g);
      const auto& interior = green.interior();

      // Boundary points vanish at every truncation.
      Index bdry = g.root_boundary_vertex(0);
      for (int K = 0; K <= level; ++K)
        CHECK(series.partial(K, interior[0], bdry) == 0.0);

      // Monotone on the diagonal, exact once every scale is included.
      for (std::size_t i = 0; i < interior.size(); i += 2) {
        double prev = -1.0;
        for (int K = 0; K < level; ++K) {
          double s = series.partial(K, interior[i], interior[i]);
          CHECK(s >= prev - 1e-14);
          prev = s;
        }
        CHECK(std::abs(series.partial(level - 1, interior[i], interior[i]) -
                       green.value(interior[i], interior[i])) < 1e-10);
      }
      for (std::size_t i = 0; i < interior.size(); i += 3)
        for (std::size_t j = 0; j < interior.size(); j += 3)
          CHECK(std::abs(series.partial(level - 1, interior[i], interior[j]) -
                         green.value(interior[i], interior[j])) < 1e-10);
    }
  }
}
