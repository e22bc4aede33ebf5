#include "invscat/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "invscat/errors.hpp"

namespace invscat {

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) throw ValidationError("Gauss-Legendre rule needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

SphereRule product_sphere_rule(int n_theta, int n_phi) {
  const auto gl = gauss_legendre(n_theta);
  SphereRule rule;
  rule.directions.reserve(n_theta * n_phi);
  rule.weights.reserve(n_theta * n_phi);
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = gl.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int k = 0; k < n_phi; ++k) {
      const double phi = (k + 0.5) * dphi;
      rule.directions.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      rule.weights.push_back(gl.weights[i] * dphi);
    }
  }
  return rule;
}

}  // namespace invscat
