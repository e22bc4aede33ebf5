#include <cmath>
#include <random>

#include "doctest.h"
#include "invscat/errors.hpp"
#include "invscat/variety.hpp"

using namespace invscat;

namespace {

void check_pair(const ThetaPair& p, double tol) {
  const double scale = std::max(1.0, p.theta.squaredNorm());
  CHECK(std::abs(bilinear_dot(p.theta, p.theta) - 1.0) <= tol * scale);
  CHECK(std::abs(bilinear_dot(p.theta_prime, p.theta_prime) - 1.0) <= tol * scale);
  CHECK((p.theta_prime - p.theta - p.xi.cast<cplx>()).norm() <= tol * std::sqrt(scale));
}

}  // namespace

TEST_CASE("real pair at unit magnitude") {
  const ThetaPair p = make_theta_pair(Vec3(0, 0, 1), 1.0);
  check_pair(p, 1e-12);
  CHECK(p.theta.imag().norm() < 1e-15);
  CHECK(p.magnitude() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("complex pair with prescribed magnitude") {
  const ThetaPair p = make_theta_pair(Vec3(3, 0, 0), 10.0);
  check_pair(p, 1e-12);
  CHECK(p.magnitude() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(p.kappa() == doctest::Approx(std::sqrt((100.0 - 1.0) / 2.0)).epsilon(1e-12));
}

TEST_CASE("xi equal to zero") {
  const ThetaPair p = make_theta_pair(Vec3::Zero(), 5.0);
  check_pair(p, 1e-12);
  CHECK((p.theta - p.theta_prime).norm() == 0.0);
}

TEST_CASE("magnitude below the geometric minimum is infeasible") {
  CHECK_THROWS_AS(make_theta_pair(Vec3(0, 0, 1), 0.5), InfeasibleError);
  // On M, |theta|^2 >= |xi|^2/2 - 1.
  CHECK_THROWS_AS(make_theta_pair(Vec3(0, 0, 10), 6.5), InfeasibleError);
  CHECK_NOTHROW(make_theta_pair(Vec3(0, 0, 10), 7.0));
}

TEST_CASE("feasibility over a range of xi and magnitudes") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> nd;
  double prev_kappa = -1.0;
  for (int k = 0; k < 500; ++k) {
    const double t = 10.0 * u(rng);
    const Vec3 xi = Vec3(nd(rng), nd(rng), nd(rng)).normalized() * t;
    const double lo = std::max(1.0, t);
    const double mag = lo + (100.0 - lo) * u(rng);
    const ThetaPair p = make_theta_pair(xi, mag);
    check_pair(p, 1e-12);
    CHECK(p.magnitude() == doctest::Approx(mag).epsilon(1e-12));
  }
  for (double mag : {2.0, 5.0, 10.0, 40.0}) {
    const double kappa = make_theta_pair(Vec3(0, 1, 0), mag).kappa();
    CHECK(kappa > prev_kappa);
    prev_kappa = kappa;
  }
}

TEST_CASE("construction from s") {
  const ThetaPair p = make_theta_pair_from_s(Vec3(0, 0, 6), 0.5);
  check_pair(p, 1e-12);
  CHECK(p.s == 0.5);
}

TEST_CASE("adapted frame") {
  const ThetaPair p = make_theta_pair(Vec3(1, 2, -0.5), 7.0);
  const Eigen::Matrix3d rot = theta_frame(p.theta);
  CHECK((rot * rot.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  const Vec3c t = rot.cast<cplx>() * p.theta;
  CHECK(std::abs(t(0) - p.theta.real().norm()) < 1e-12);
  CHECK(std::abs(t(1)) < 1e-12);
  CHECK(std::abs(t(2) - cplx(0.0, p.kappa())) < 1e-12);
}

TEST_CASE("mirrored pair") {
  const ThetaPair p = make_theta_pair(Vec3(0.3, 0, 1), 4.0);
  const ThetaPair m = p.mirrored();
  check_pair(m, 1e-12);
  CHECK((m.xi + p.xi).norm() == 0.0);
}
