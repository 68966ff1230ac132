#pragma once

#include "fraclap/types.hpp"

namespace fraclap {

// Dense mode-sum transforms K(x,y) = sum_n w_n phi(x,n) phi(y,n) and the
// kernel matvec (T u)(x) = sum_y K(x,y) m(y) u(y). The OpenMP versions
// parallelize over output rows; each entry keeps a fixed summation order, so
// they are bit-identical to the serial reference implementations kept for
// the tests and the benchmark.

Matrix mode_sum(const Matrix& phi, const Vector& w);
Matrix mode_sum_serial(const Matrix& phi, const Vector& w);

CMatrix mode_sum(const Matrix& phi, const CVector& w);
CMatrix mode_sum_serial(const Matrix& phi, const CVector& w);

CVector kernel_matvec(const CMatrix& K, const Vector& mass, const CVector& u);
CVector kernel_matvec_serial(const CMatrix& K, const Vector& mass, const CVector& u);

/// (sum_{x,y} |K(x,y)|^2 m(x) m(y))^{1/2} with a deterministic reduction.
double weighted_frobenius(const CMatrix& K, const Vector& mass);
double weighted_frobenius_serial(const CMatrix& K, const Vector& mass);

}  // namespace fraclap
