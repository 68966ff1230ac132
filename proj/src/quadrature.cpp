#include "fraclap/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "fraclap/gamma.hpp"
#include "fraclap/par.hpp"

namespace fraclap {

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double z1, pp;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    } while (std::abs(z - z1) > 1e-15);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace {

struct Panel {
  Complex integral;
  double l1;
};

Panel eval_panel(const std::function<Complex(double)>& g, double a, double h,
                 const std::vector<double>& nodes, const std::vector<double>& weights) {
  Panel p{Complex{0, 0}, 0.0};
  const double mid = a + 0.5 * h, half = 0.5 * h;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Complex v = g(mid + half * nodes[i]);
    p.integral += weights[i] * v;
    p.l1 += weights[i] * std::abs(v);
  }
  p.integral *= half;
  p.l1 *= half;
  return p;
}

Complex sweep(const std::function<Complex(double)>& g, double u_peak, double h,
              const QuadratureConfig& cfg) {
  const auto& [nodes, weights] = gauss_legendre(cfg.panel_rule);
  std::vector<Complex> parts;
  double max_l1 = 0.0;

  // Expand in one direction until the panel mass hits the machine floor.
  auto expand = [&](int dir) {
    int small_run = 0;
    int count = 0;
    for (double a = (dir > 0) ? u_peak : u_peak - h;; a += dir * h) {
      Panel p = eval_panel(g, a, h, nodes, weights);
      parts.push_back(p.integral);
      max_l1 = std::max(max_l1, p.l1);
      ++count;
      if (count >= 8 && p.l1 <= 1e-15 * max_l1) {
        if (++small_run >= 3) return;
      } else {
        small_run = 0;
      }
      if (static_cast<int>(parts.size()) > cfg.max_panels)
        throw NumericError("quadrature failed to converge within panel budget");
    }
  };
  expand(+1);
  expand(-1);
  return par::pairwise_sum(parts.data(), parts.size());
}

}  // namespace

Complex integrate_log_axis(const std::function<Complex(double)>& g, double u_peak,
                           double freq, const QuadratureConfig& cfg) {
  double h = 0.5;
  if (freq > 0) h = std::min(h, M_PI / (4.0 * freq));
  Complex coarse = sweep(g, u_peak, h, cfg);
  for (int attempt = 0; attempt < 3; ++attempt) {
    h *= 0.5;
    Complex fine = sweep(g, u_peak, h, cfg);
    double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) <= cfg.rel_tol * scale) return fine;
    coarse = fine;
  }
  throw NumericError("quadrature failed to converge to requested tolerance");
}

Complex scalar_power_by_quadrature(double lambda, double alpha, const QuadratureConfig& cfg) {
  if (lambda <= 0) throw DomainError("scalar power quadrature requires lambda > 0");
  auto g = [lambda, alpha](double u) -> Complex {
    double ex = u - lambda * std::exp(u);
    if (ex < -745.0) return {0.0, 0.0};
    return lambda * std::exp(ex) * std::polar(1.0, -alpha * u);
  };
  Complex integral = integrate_log_axis(g, -std::log(lambda), std::abs(alpha), cfg);
  return integral / complex_gamma(Complex(1.0, -alpha));
}

}  // namespace fraclap
