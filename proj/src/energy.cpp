#include "fraclap/energy.hpp"

#include <algorithm>
#include <cmath>

#include "fraclap/par.hpp"

namespace fraclap {

namespace {

// Dense SPD solve with one step of iterative refinement.
Matrix solve_refined(const Matrix& A, const Matrix& B) {
  Eigen::LDLT<Matrix> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw NumericError("LDLT factorization failed");
  Matrix X = ldlt.solve(B);
  X += ldlt.solve(B - A * X);
  return X;
}

Matrix submatrix(const Matrix& A, const std::vector<Index>& rows,
                 const std::vector<Index>& cols) {
  Matrix S(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) S(i, j) = A(rows[i], cols[j]);
  return S;
}

// Values on `pinned` vertices held fixed, Laplace equation solved on the rest.
Vector solve_pinned(const Matrix& L, const std::vector<Index>& pinned,
                    const Vector& pinned_values) {
  const Index n = L.rows();
  std::vector<char> is_pinned(n, 0);
  for (Index v : pinned) is_pinned[v] = 1;
  std::vector<Index> free;
  free.reserve(n - pinned.size());
  for (Index v = 0; v < n; ++v)
    if (!is_pinned[v]) free.push_back(v);

  Vector out(n);
  for (std::size_t i = 0; i < pinned.size(); ++i) out[pinned[i]] = pinned_values[i];
  if (free.empty()) return out;

  Matrix Lff = submatrix(L, free, free);
  Matrix Lfp = submatrix(L, free, pinned);
  Matrix rhs = -Lfp * pinned_values;
  Matrix x = solve_refined(Lff, rhs);
  for (std::size_t i = 0; i < free.size(); ++i) out[free[i]] = x(i, 0);
  return out;
}

}  // namespace

EnergyLaplacian assemble(const ApproxGraph& graph) {
  const Index n = graph.vertex_count();
  EnergyLaplacian el;
  el.level = graph.level();
  el.graph = &graph;
  el.mass = graph.vertex_measure();
  el.stiffness = Matrix::Zero(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(graph.edges().size() * 4);
  for (const Edge& e : graph.edges()) {
    el.stiffness(e.p, e.p) += e.conductance;
    el.stiffness(e.q, e.q) += e.conductance;
    el.stiffness(e.p, e.q) -= e.conductance;
    el.stiffness(e.q, e.p) -= e.conductance;
    trips.emplace_back(e.p, e.p, e.conductance);
    trips.emplace_back(e.q, e.q, e.conductance);
    trips.emplace_back(e.p, e.q, -e.conductance);
    trips.emplace_back(e.q, e.p, -e.conductance);
  }
  el.stiffness_sparse.resize(n, n);
  el.stiffness_sparse.setFromTriplets(trips.begin(), trips.end());
  return el;
}

double energy(const EnergyLaplacian& el, const Vector& u) { return energy(el, u, u); }

double energy(const EnergyLaplacian& el, const Vector& u, const Vector& v) {
  return u.dot(el.stiffness_sparse * v);
}

Vector laplacian_apply(const EnergyLaplacian& el, const Vector& u) {
  Vector Lu = el.stiffness_sparse * u;
  return -(Lu.array() / el.mass.array()).matrix();
}

Vector harmonic_extension(const ApproxGraph& graph, const Vector& boundary_values) {
  if (boundary_values.size() != graph.model().boundary_size)
    throw DomainError("boundary value count must equal |V0|");
  EnergyLaplacian el = assemble(graph);
  std::vector<Index> pinned;
  for (int j = 0; j < graph.model().boundary_size; ++j)
    pinned.push_back(graph.root_boundary_vertex(j));
  return solve_pinned(el.stiffness, pinned, boundary_values);
}

Vector harmonic_extension(const IFSModel& model, const Vector& boundary_values, int to_level) {
  ApproxGraph g = build_graph(model, to_level);
  return harmonic_extension(g, boundary_values);
}

double effective_resistance(const EnergyLaplacian& el, Index x, Index y) {
  if (x == y) return 0.0;
  const Index n = el.stiffness.rows();
  std::vector<Index> keep;
  keep.reserve(n - 1);
  for (Index v = 0; v < n; ++v)
    if (v != x) keep.push_back(v);
  Matrix B = submatrix(el.stiffness, keep, keep);
  Vector rhs = Vector::Zero(n - 1);
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i] == y) rhs[i] = 1.0;
  Matrix v = solve_refined(B, rhs);
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i] == y) return v(i, 0);
  throw DomainError("vertex index out of range");
}

Matrix resistance_matrix(const EnergyLaplacian& el) {
  const Index n = el.stiffness.rows();
  // Ground vertex 0; X is the grounded inverse, R from its diagonal/cross terms.
  std::vector<Index> keep;
  keep.reserve(n - 1);
  for (Index v = 1; v < n; ++v) keep.push_back(v);
  Matrix B = submatrix(el.stiffness, keep, keep);
  Matrix X = solve_refined(B, Matrix::Identity(n - 1, n - 1));

  Matrix R(n, n);
  par::for_index(n, [&](Index x) {
    R(x, x) = 0.0;
    for (Index y = 0; y < x; ++y) {
      double v;
      if (x == 0)
        v = X(y - 1, y - 1);
      else if (y == 0)
        v = X(x - 1, x - 1);
      else
        v = X(x - 1, x - 1) + X(y - 1, y - 1) - 2.0 * X(x - 1, y - 1);
      R(x, y) = v;
    }
  });
  for (Index x = 0; x < n; ++x)
    for (Index y = x + 1; y < n; ++y) R(x, y) = R(y, x);
  return R;
}

GreenCellOperator::GreenCellOperator(const EnergyLaplacian& el, const Word& cell) {
  const ApproxGraph& g = *el.graph;
  cell_vertices_ = g.cell_vertices(cell);
  boundary_ = g.cell_boundary(cell);
  slot_.assign(g.vertex_count(), -1);
  std::vector<char> is_bdry(g.vertex_count(), 0);
  for (Index b : boundary_) is_bdry[b] = 1;
  for (Index v : cell_vertices_)
    if (!is_bdry[v]) interior_.push_back(v);
  std::sort(interior_.begin(), interior_.end());
  for (std::size_t i = 0; i < interior_.size(); ++i) slot_[interior_[i]] = static_cast<Index>(i);
  if (interior_.empty()) {
    inverse_.resize(0, 0);
    return;
  }
  Matrix Lii = submatrix(el.stiffness, interior_, interior_);
  inverse_ = solve_refined(Lii, Matrix::Identity(interior_.size(), interior_.size()));
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
}

bool GreenCellOperator::is_interior(Index x) const {
  return x >= 0 && x < static_cast<Index>(slot_.size()) && slot_[x] >= 0;
}

double GreenCellOperator::value(Index x, Index y) const {
  const bool xb = std::find(boundary_.begin(), boundary_.end(), x) != boundary_.end();
  const bool yb = std::find(boundary_.begin(), boundary_.end(), y) != boundary_.end();
  if (xb || yb) return 0.0;  // Dirichlet condition; degenerate query
  if (!is_interior(x) || !is_interior(y))
    throw DomainError("green_dirichlet: vertex outside the cell");
  return inverse_(slot_[x], slot_[y]);
}

double green_dirichlet(const EnergyLaplacian& el, const Word& cell, Index x, Index y) {
  return GreenCellOperator(el, cell).value(x, y);
}

double green_identity_residual(const EnergyLaplacian& el, const Word& cell, const Vector& f) {
  const ApproxGraph& g = *el.graph;
  GreenCellOperator green(el, cell);
  if (green.interior().empty()) return 0.0;

  // Harmonic part with the cell-boundary values of f.
  Vector hb(green.boundary().size());
  for (std::size_t i = 0; i < green.boundary().size(); ++i) hb[i] = f[green.boundary()[i]];
  Matrix Lii = submatrix(el.stiffness, green.interior(), green.interior());
  Matrix Lib = submatrix(el.stiffness, green.interior(), green.boundary());
  Matrix hi = solve_refined(Lii, -(Lib * hb));

  Vector lap = laplacian_apply(el, f);
  double worst = 0.0;
  for (std::size_t i = 0; i < green.interior().size(); ++i) {
    Index z = green.interior()[i];
    double conv = 0.0;
    for (std::size_t j = 0; j < green.interior().size(); ++j) {
      Index s = green.interior()[j];
      conv += green.value(z, s) * lap[s] * el.mass[s];
    }
    worst = std::max(worst, std::abs(f[z] - hi(i, 0) + conv));
  }
  return worst;
}

GreenSeries::GreenSeries(const ApproxGraph& graph) : graph_(&graph) {
  const IFSModel& model = graph.model();
  const int m = graph.level();
  for (int j = 0; j <= std::max(m, 1); ++j) levels_.push_back(build_graph(model, j));

  // Interior Green values of the level-1 network.
  const ApproxGraph& g1 = levels_[1];
  EnergyLaplacian el1 = assemble(g1);
  std::vector<Index> interior1;
  for (Index v = 0; v < g1.vertex_count(); ++v)
    if (!g1.is_root_boundary(v)) interior1.push_back(v);
  Matrix L11 = Matrix(interior1.size(), interior1.size());
  for (std::size_t i = 0; i < interior1.size(); ++i)
    for (std::size_t j = 0; j < interior1.size(); ++j)
      L11(i, j) = el1.stiffness(interior1[i], interior1[j]);
  g_ = solve_refined(L11, Matrix::Identity(interior1.size(), interior1.size()));

  const int n_spline = static_cast<int>(interior1.size());

  // psi_s on every vertex set: pin V1 values (delta at spline point s) and
  // extend harmonically.
  spline_.resize(levels_.size());
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    const ApproxGraph& gj = levels_[j];
    spline_[j] = Matrix::Zero(gj.vertex_count(), n_spline);
    if (j == 0) continue;  // psi vanishes on V0
    EnergyLaplacian elj = assemble(gj);
    std::vector<Index> pinned;
    std::vector<int> pin_spline;  // -1 for V0 points
    for (Index v1 = 0; v1 < g1.vertex_count(); ++v1) {
      const Address& a = g1.addresses(v1).front();
      Word w = a.word;
      w.letters.resize(j, static_cast<std::uint8_t>(a.corner));
      Index vj = gj.find_vertex(w, a.corner);
      pinned.push_back(vj);
      int s = -1;
      for (int k = 0; k < n_spline; ++k)
        if (interior1[k] == v1) s = k;
      pin_spline.push_back(s);
    }
    for (int s = 0; s < n_spline; ++s) {
      Vector vals = Vector::Zero(pinned.size());
      for (std::size_t i = 0; i < pinned.size(); ++i)
        if (pin_spline[i] == s) vals[i] = 1.0;
      spline_[j].col(s) = solve_pinned(elj.stiffness, pinned, vals);
    }
  }
}

double GreenSeries::partial(int K, Index y, Index z) const {
  const ApproxGraph& g = *graph_;
  const int m = g.level();
  const double r = g.model().r();
  double total = 0.0;
  for (int k = 0; k <= std::min(K, m); ++k) {
    const int j = m - k;  // rescaled points live on the level-j vertex set
    if (j == 0) continue;
    // Words of length k containing both y and z: common address prefixes.
    std::vector<std::vector<std::uint8_t>> prefixes;
    for (const Address& ay : g.addresses(y)) {
      std::vector<std::uint8_t> p(ay.word.letters.begin(), ay.word.letters.begin() + k);
      if (std::find(prefixes.begin(), prefixes.end(), p) != prefixes.end()) continue;
      bool z_in = false;
      for (const Address& az : g.addresses(z))
        if (std::equal(p.begin(), p.end(), az.word.letters.begin())) z_in = true;
      if (z_in) prefixes.push_back(std::move(p));
    }
    double rk = std::pow(r, k);
    for (const auto& p : prefixes) {
      auto rescale = [&](Index v) -> Index {
        for (const Address& a : g.addresses(v)) {
          if (!std::equal(p.begin(), p.end(), a.word.letters.begin())) continue;
          Word tail;
          tail.letters.assign(a.word.letters.begin() + k, a.word.letters.end());
          return levels_[j].find_vertex(tail, a.corner);
        }
        return -1;
      };
      Index yj = rescale(y), zj = rescale(z);
      const Matrix& psi = spline_[j];
      double term = 0.0;
      for (Index s = 0; s < g_.rows(); ++s)
        for (Index t = 0; t < g_.cols(); ++t)
          term += g_(s, t) * psi(yj, s) * psi(zj, t);
      total += rk * term;
    }
  }
  return total;
}

}  // namespace fraclap
