#pragma once

#include "invscat/quadrature.hpp"

namespace invscat {

// Product quadrature on the shell a1 <= |x| <= b: Gauss-Legendre in r and in
// cos(theta), uniform in phi. The polar axis is chosen by the caller.
struct ShellGrid {
  double a1 = 0.0;
  double b = 0.0;
  QuadratureRule radial;  // weights include nothing but dr
  QuadratureRule polar;   // cos(theta) in [-1, 1]
  int n_phi = 0;

  static ShellGrid build(double a1, double b, int n_radial, int n_polar, int n_phi);

  double volume() const;
  double weight_sum() const;
};

}  // namespace invscat
