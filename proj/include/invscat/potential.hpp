#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace invscat {

// Real radial potential supported in [0, a], sampled on a grid in (0, a] and
// evaluated between nodes by monotone cubic (Fritsch-Carlson) interpolation.
// Below the first node the potential is held constant.
class RadialPotential {
 public:
  RadialPotential() = default;
  RadialPotential(std::vector<double> radii, std::vector<double> values, double support);

  double operator()(double r) const;
  double support() const { return support_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }
  bool is_zero() const;

  // Integral of f(r) q(r) over [0, a], exact up to the accuracy of an
  // n-point Gauss rule on each interpolation interval.
  double integrate(const std::function<double(double)>& f, int nodes_per_interval = 8) const;

  RadialPotential scaled(double factor) const;

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  double support_ = 0.0;
};

RadialPotential make_zero_potential(double support);
RadialPotential make_square_well(double v0, double support, int grid_points = 2001);
// q(r) = v0 exp(-(r/width)^2) for r <= a.
RadialPotential make_truncated_gaussian(double v0, double width, double support,
                                        int grid_points = 2001);
// Linear interpolation of (r, q) knots, resampled on a uniform grid.
RadialPotential make_piecewise_linear(const std::vector<std::pair<double, double>>& knots,
                                      double support, int grid_points = 2001);
RadialPotential make_sampled(const std::function<double(double)>& q, double support,
                             int grid_points = 2001);

}  // namespace invscat
