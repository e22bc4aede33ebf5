#include "invscat/variety.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "invscat/errors.hpp"

namespace invscat {

namespace {

Eigen::Matrix3d householder_to(const Vec3& dir) {
  const Vec3 e3(0.0, 0.0, 1.0);
  const Vec3 v = dir - e3;
  const double vv = v.squaredNorm();
  if (vv < 1e-30) return Eigen::Matrix3d::Identity();
  return Eigen::Matrix3d::Identity() - 2.0 * v * v.transpose() / vv;
}

ThetaPair build(const Vec3& xi, double s, cplx w) {
  const double t = xi.norm();
  const Eigen::Matrix3d h = t > 0.0 ? householder_to(xi / t) : Eigen::Matrix3d::Identity();
  const Vec3c th(cplx(0.0, s), w, -0.5 * t);
  const Vec3c thp(cplx(0.0, s), w, 0.5 * t);
  ThetaPair p;
  p.theta = h.cast<cplx>() * th;
  p.theta_prime = h.cast<cplx>() * thp;
  p.xi = xi;
  p.s = s;
  return p;
}

}  // namespace

ThetaPair ThetaPair::mirrored() const {
  ThetaPair p = *this;
  p.theta = -theta;
  p.theta_prime = -theta_prime;
  p.xi = -xi;
  return p;
}

double min_theta_magnitude(double xi_norm) {
  return std::sqrt(std::max(1.0, 0.5 * xi_norm * xi_norm - 1.0));
}

ThetaPair make_theta_pair(const Vec3& xi, double target_magnitude) {
  const double t = xi.norm();
  const double lo = min_theta_magnitude(t);
  if (!(target_magnitude >= lo * (1.0 - 1e-12)))
    throw InfeasibleError("target |theta| = " + std::to_string(target_magnitude) +
                          " is below the minimum " + std::to_string(lo) +
                          " for |xi| = " + std::to_string(t));
  const double s = std::sqrt(std::max(0.0, 0.5 * (target_magnitude * target_magnitude - 1.0)));
  const double w2 = 1.0 - 0.25 * t * t + s * s;
  return build(xi, s, std::sqrt(std::max(0.0, w2)));
}

ThetaPair make_theta_pair_from_s(const Vec3& xi, double s) {
  if (!(s >= 0.0)) throw DomainError("s must be non-negative");
  const double t = xi.norm();
  return build(xi, s, std::sqrt(cplx(1.0 - 0.25 * t * t + s * s, 0.0)));
}

Eigen::Matrix3d theta_frame(const Vec3c& theta) {
  const Vec3 re = theta.real();
  const Vec3 im = theta.imag();
  Vec3 ex = re.norm() > 0.0 ? Vec3(re.normalized()) : Vec3(1.0, 0.0, 0.0);
  Vec3 ez;
  if (im.norm() > 1e-14 * std::max(1.0, re.norm())) {
    ez = im.normalized();
    // Re and Im are orthogonal on M; remove rounding.
    ex = (ex - ex.dot(ez) * ez).normalized();
  } else {
    const Vec3 trial = std::abs(ex(2)) < 0.9 ? Vec3(0.0, 0.0, 1.0) : Vec3(1.0, 0.0, 0.0);
    ez = (trial - trial.dot(ex) * ex).normalized();
  }
  const Vec3 ey = ez.cross(ex);
  Eigen::Matrix3d rot;
  rot.row(0) = ex.transpose();
  rot.row(1) = ey.transpose();
  rot.row(2) = ez.transpose();
  return rot;
}

}  // namespace invscat
