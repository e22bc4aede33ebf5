#pragma once

#include <vector>

#include "invscat/special_functions.hpp"

namespace invscat {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes on [lo, hi].
QuadratureRule gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
// uniform rule in phi. Exact for polynomials of degree < min(2 n_theta, n_phi).
struct SphereRule {
  std::vector<Vec3> directions;
  std::vector<double> weights;
};
SphereRule product_sphere_rule(int n_theta, int n_phi);

}  // namespace invscat
