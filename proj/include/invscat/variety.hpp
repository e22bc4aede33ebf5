#pragma once

#include <optional>

#include "invscat/special_functions.hpp"

namespace invscat {

// Pair (theta, theta') on M = {theta in C^3 : theta.theta = 1} with
// theta' - theta = xi, where the dot product is bilinear.
struct ThetaPair {
  Vec3c theta;
  Vec3c theta_prime;
  Vec3 xi;
  double s = 0.0;  // free parameter of the construction

  double magnitude() const { return theta.norm(); }
  double kappa() const { return theta.imag().norm(); }
  // (-theta, -theta') for -xi.
  ThetaPair mirrored() const;
};

// Smallest |theta| attainable on M with theta' - theta = xi.
double min_theta_magnitude(double xi_norm);

// In a frame where xi = t e3, theta = (i s, w, -t/2) and theta' = (i s, w, t/2)
// with w = sqrt(1 - t^2/4 + s^2); a Householder reflection maps e3 to xi/|xi|.
// The target magnitude fixes s = sqrt((|theta|^2 - 1)/2).
ThetaPair make_theta_pair(const Vec3& xi, double target_magnitude);
ThetaPair make_theta_pair_from_s(const Vec3& xi, double s);

// Rotation whose rows are an orthonormal frame adapted to theta:
// z along Im(theta), x along Re(theta). In that frame theta = (|Re|, 0, i|Im|).
Eigen::Matrix3d theta_frame(const Vec3c& theta);

}  // namespace invscat
