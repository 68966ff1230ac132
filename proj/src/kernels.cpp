#include "fraclap/kernels.hpp"

#include <vector>

#include "fraclap/par.hpp"

namespace fraclap {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-contiguous copy of the eigenvector array: row x holds phi_n(x) over n.
RowMajor by_vertex(const Matrix& phi) { return phi; }

template <bool Parallel>
Matrix mode_sum_real(const Matrix& phi, const Vector& w) {
  const Index n = phi.rows();
  const Index modes = phi.cols();
  RowMajor P = by_vertex(phi);
  RowMajor A = P;
  for (Index x = 0; x < n; ++x)
    for (Index k = 0; k < modes; ++k) A(x, k) *= w[k];

  Matrix K(n, n);
  auto row = [&](Index x) {
    const double* ax = A.data() + x * modes;
    for (Index y = 0; y <= x; ++y) {
      const double* py = P.data() + y * modes;
      double acc = 0.0;
      for (Index k = 0; k < modes; ++k) acc += ax[k] * py[k];
      K(x, y) = acc;
      K(y, x) = acc;
    }
  };
  if constexpr (Parallel)
    par::for_index(n, row);
  else
    for (Index x = 0; x < n; ++x) row(x);
  return K;
}

template <bool Parallel>
CMatrix mode_sum_cplx(const Matrix& phi, const CVector& w) {
  const Index n = phi.rows();
  const Index modes = phi.cols();
  RowMajor P = by_vertex(phi);
  RowMajor Ar = P, Ai = P;
  for (Index x = 0; x < n; ++x)
    for (Index k = 0; k < modes; ++k) {
      Ar(x, k) *= w[k].real();
      Ai(x, k) *= w[k].imag();
    }

  CMatrix K(n, n);
  auto row = [&](Index x) {
    const double* ar = Ar.data() + x * modes;
    const double* ai = Ai.data() + x * modes;
    for (Index y = 0; y <= x; ++y) {
      const double* py = P.data() + y * modes;
      double re = 0.0, im = 0.0;
      for (Index k = 0; k < modes; ++k) {
        re += ar[k] * py[k];
        im += ai[k] * py[k];
      }
      K(x, y) = Complex(re, im);
      K(y, x) = Complex(re, im);
    }
  };
  if constexpr (Parallel)
    par::for_index(n, row);
  else
    for (Index x = 0; x < n; ++x) row(x);
  return K;
}

template <bool Parallel>
CVector matvec(const CMatrix& K, const Vector& mass, const CVector& u) {
  const Index n = K.rows();
  CVector mu(n);
  for (Index y = 0; y < n; ++y) mu[y] = mass[y] * u[y];
  CVector out(n);
  auto row = [&](Index x) {
    Complex acc{0.0, 0.0};
    for (Index y = 0; y < n; ++y) acc += K(x, y) * mu[y];
    out[x] = acc;
  };
  if constexpr (Parallel)
    par::for_index(n, row);
  else
    for (Index x = 0; x < n; ++x) row(x);
  return out;
}

template <bool Parallel>
double frobenius(const CMatrix& K, const Vector& mass) {
  const Index n = K.rows();
  std::vector<double> row_sums(n);
  auto row = [&](Index x) {
    std::vector<double> terms(n);
    for (Index y = 0; y < n; ++y) terms[y] = std::norm(K(x, y)) * mass[y];
    row_sums[x] = mass[x] * par::pairwise_sum(terms.data(), terms.size());
  };
  if constexpr (Parallel)
    par::for_index(n, row);
  else
    for (Index x = 0; x < n; ++x) row(x);
  return std::sqrt(par::pairwise_sum(row_sums.data(), row_sums.size()));
}

}  // namespace

Matrix mode_sum(const Matrix& phi, const Vector& w) { return mode_sum_real<true>(phi, w); }
Matrix mode_sum_serial(const Matrix& phi, const Vector& w) { return mode_sum_real<false>(phi, w); }

CMatrix mode_sum(const Matrix& phi, const CVector& w) { return mode_sum_cplx<true>(phi, w); }
CMatrix mode_sum_serial(const Matrix& phi, const CVector& w) {
  return mode_sum_cplx<false>(phi, w);
}

CVector kernel_matvec(const CMatrix& K, const Vector& mass, const CVector& u) {
  return matvec<true>(K, mass, u);
}
CVector kernel_matvec_serial(const CMatrix& K, const Vector& mass, const CVector& u) {
  return matvec<false>(K, mass, u);
}

double weighted_frobenius(const CMatrix& K, const Vector& mass) {
  return frobenius<true>(K, mass);
}
double weighted_frobenius_serial(const CMatrix& K, const Vector& mass) {
  return frobenius<false>(K, mass);
}

}  // namespace fraclap
