#include "invscat/shell_grid.hpp"

#include <cmath>
#include <numbers>

#include "invscat/errors.hpp"

namespace invscat {

ShellGrid ShellGrid::build(double a1, double b, int n_radial, int n_polar, int n_phi) {
  if (!(a1 > 0.0) || !(b > a1))
    throw ValidationError("shell needs 0 < a1 < b");
  if (n_radial < 1 || n_polar < 1 || n_phi < 1)
    throw ValidationError("shell grid sizes must be positive");
  ShellGrid g;
  g.a1 = a1;
  g.b = b;
  g.radial = gauss_legendre(n_radial, a1, b);
  g.polar = gauss_legendre(n_polar);
  g.n_phi = n_phi;
  return g;
}

double ShellGrid::volume() const {
  return 4.0 * std::numbers::pi / 3.0 * (b * b * b - a1 * a1 * a1);
}

double ShellGrid::weight_sum() const {
  double sr = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < radial.nodes.size(); ++i)
    sr += radial.weights[i] * radial.nodes[i] * radial.nodes[i];
  for (double w : polar.weights) sx += w;
  return 2.0 * std::numbers::pi * sr * sx;
}

}  // namespace invscat
