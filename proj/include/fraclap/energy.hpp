#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "fraclap/model.hpp"
#include "fraclap/types.hpp"

namespace fraclap {

/// Conductance-weighted graph Laplacian L with E_m(u,v) = u^T L v, plus the
/// diagonal mass matrix of lumped vertex measures. Discrete Laplacian is
/// Delta = -M^{-1} L, which makes the summation-by-parts identity
/// E(u,v) = -sum_x (Delta u)(x) v(x) m(x) exact.
struct EnergyLaplacian {
  Matrix stiffness;
  Eigen::SparseMatrix<double> stiffness_sparse;
  Vector mass;
  int level{0};
  const ApproxGraph* graph{nullptr};
};

EnergyLaplacian assemble(const ApproxGraph& graph);

double energy(const EnergyLaplacian& el, const Vector& u);
double energy(const EnergyLaplacian& el, const Vector& u, const Vector& v);

/// Delta u = -M^{-1} L u.
Vector laplacian_apply(const EnergyLaplacian& el, const Vector& u);

/// Energy-minimizing extension of values on V_0 (corner order) to V_m.
Vector harmonic_extension(const ApproxGraph& graph, const Vector& boundary_values);
Vector harmonic_extension(const IFSModel& model, const Vector& boundary_values, int to_level);

/// Effective resistance between two vertices; 0 by convention when x == y.
double effective_resistance(const EnergyLaplacian& el, Index x, Index y);

/// Full symmetric resistance matrix with zero diagonal.
Matrix resistance_matrix(const EnergyLaplacian& el);

/// Dirichlet Green operator of one cell: zero boundary values, interior
/// block equal to the inverse of the cell-interior stiffness.
class GreenCellOperator {
 public:
  GreenCellOperator(const EnergyLaplacian& el, const Word& cell);

  double value(Index x, Index y) const;        // 0 when x or y on the cell boundary
  bool is_interior(Index x) const;
  const std::vector<Index>& interior() const { return interior_; }
  const std::vector<Index>& boundary() const { return boundary_; }
  const std::vector<Index>& cell_vertices() const { return cell_vertices_; }

 private:
  std::vector<Index> cell_vertices_;
  std::vector<Index> boundary_;
  std::vector<Index> interior_;
  std::vector<Index> slot_;  // vertex -> interior slot or -1
  Matrix inverse_;
};

double green_dirichlet(const EnergyLaplacian& el, const Word& cell, Index x, Index y);

/// Max interior defect of f = h^C - G^C(Delta f) on the cell; zero up to
/// roundoff by construction of the discrete operators.
double green_identity_residual(const EnergyLaplacian& el, const Word& cell, const Vector& f);

/// Self-similar series data for the Dirichlet Green function of the whole
/// fractal: the level-1 interior Green values g(s,s') and the level-1
/// harmonic splines evaluated on every coarser vertex set.
class GreenSeries {
 public:
  explicit GreenSeries(const ApproxGraph& graph);

  const Matrix& g_matrix() const { return g_; }
  double g_constant() const { return g_.sum(); }  // depends only on the fractal

  /// Partial sum over words of length <= K of r_w * Psi(F_w^{-1} y, F_w^{-1} z).
  double partial(int K, Index y, Index z) const;

 private:
  const ApproxGraph* graph_;
  Matrix g_;                          // interior Green values of the level-1 network
  std::vector<Matrix> spline_;        // spline_[j](v, s) = psi_s on the level-j vertex set
  std::vector<ApproxGraph> levels_;   // graphs of level 0..m for address mapping
};

}  // namespace fraclap
