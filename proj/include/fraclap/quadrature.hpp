#pragma once

#include <functional>
#include <vector>

#include "fraclap/types.hpp"

namespace fraclap {

struct QuadratureConfig {
  double rel_tol{1e-9};
  int panel_rule{16};     // Gauss-Legendre nodes per panel
  int max_panels{400000};
};

/// Gauss-Legendre nodes/weights on [-1, 1]; cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

/// Integral over (0, inf) evaluated on the log axis u = log t. The callee
/// supplies g(u) = f(e^u) * e^u. Panels are capped at pi/(4*freq) so an
/// oscillation e^{-i freq u} is resolved; the window expands from u_peak until
/// the panel mass falls to the machine floor, and the result is accepted only
/// if halving the panel width reproduces it to rel_tol.
Complex integrate_log_axis(const std::function<Complex(double)>& g, double u_peak,
                           double freq, const QuadratureConfig& cfg);

/// C_alpha * lambda * int e^{-lambda t} t^{-i alpha} dt with
/// C_alpha = 1/Gamma(1 - i alpha); equals lambda^{i alpha}. Primary self-test
/// of the quadrature engine.
Complex scalar_power_by_quadrature(double lambda, double alpha,
                                   const QuadratureConfig& cfg = {});

}  // namespace fraclap
