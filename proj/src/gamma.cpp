#include "fraclap/gamma.hpp"

#include <cmath>

namespace fraclap {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// Lanczos (g = 7, 9 terms).
constexpr int kG = 7;
constexpr double kCoef[kG + 2] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

Complex lanczos(Complex z) {
  z -= 1.0;
  Complex x = kCoef[0];
  for (int i = 1; i < kG + 2; ++i) x += kCoef[i] / (z + Complex(i, 0));
  Complex t = z + (kG + 0.5);
  return std::sqrt(2 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

}  // namespace

Complex complex_gamma(Complex z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw DomainError("gamma pole at nonpositive integer");
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * complex_gamma(1.0 - z));
  return lanczos(z);
}

}  // namespace fraclap
