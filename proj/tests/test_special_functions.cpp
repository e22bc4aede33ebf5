#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "invscat/errors.hpp"
#include "invscat/quadrature.hpp"
#include "invscat/special_functions.hpp"
#include "invscat/variety.hpp"

using namespace invscat;

namespace {

// Independent oracle: Miller recurrence in long double with a far start and
// normalization by the sum rule sum (2n+1) j_n^2 = 1.
long double miller_oracle(int l, long double r) {
  const int start = static_cast<int>(std::max<long double>(l, r)) + 120;
  std::vector<long double> f(start + 2, 0.0L);
  f[start] = 1e-40L;
  for (int n = start; n >= 1; --n) f[n - 1] = (2.0L * n + 1.0L) / r * f[n] - f[n + 1];
  long double sum = 0.0L;
  for (int n = 0; n <= start; ++n) sum += (2.0L * n + 1.0L) * f[n] * f[n];
  long double j0 = std::sin(r) / r;
  long double scale = 1.0L / std::sqrt(sum);
  if ((f[0] < 0) != (j0 < 0) && std::abs(j0) > 1e-10L) scale = -scale;
  return f[l] * scale;
}

// Y_lm(theta, phi) with complex angles from trigonometric functions of the
// angles, without the polynomial continuation used by the library.
cplx trig_harmonic(int l, int m, cplx theta, cplx phi) {
  const int am = std::abs(m);
  const cplx x = std::cos(theta), st = std::sin(theta);
  cplx pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int k = 1; k <= am; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * st;
  cplx p_prev = 0.0, p = pmm;
  for (int n = am + 1; n <= l; ++n) {
    const double a = std::sqrt((4.0 * n * n - 1.0) / (double(n) * n - double(am) * am));
    const double b = (n - 1 > am) ? std::sqrt(((n - 1.0) * (n - 1.0) - am * am) /
                                              (4.0 * (n - 1.0) * (n - 1.0) - 1.0))
                                  : 0.0;
    const cplx next = (n == am + 1) ? std::sqrt(2.0 * am + 3.0) * x * pmm
                                    : a * (x * p - b * p_prev);
    p_prev = p;
    p = next;
  }
  cplx y = p * std::exp(cplx(0.0, 1.0) * double(am) * phi);
  if (m < 0) y = ((am % 2) ? -1.0 : 1.0) * p * std::exp(-cplx(0.0, 1.0) * double(am) * phi);
  return y;
}

}  // namespace

TEST_CASE("riccati bessel examples") {
  CHECK(std::abs(riccati_bessel_u(0, std::numbers::pi)) < 1e-15);
  CHECK(riccati_bessel_u(0, 1.0) == doctest::Approx(0.8414709848).epsilon(1e-10));
  for (double x : {1e-3, 1e-4})
    CHECK(riccati_bessel_u(1, x) / (x * x / 3.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("j_l large order follows the small-argument asymptotic") {
  const int l = 20;
  const double approx = 1.0 / (2.0 * std::sqrt(2.0) * l) * std::pow(std::exp(1.0) / (2.0 * l), l);
  const double ratio = spherical_bessel_j(l, 1.0) / approx;
  CHECK(ratio > 1.0 / 1.2);
  CHECK(ratio < 1.2);

  // The ratio approaches 1 as l grows.
  double prev = 0.0;
  for (int k = 5; k <= 60; k += 5) {
    const double a = 1.0 / (2.0 * std::sqrt(2.0) * k) * std::pow(std::exp(1.0) / (2.0 * k), k);
    const double d = std::abs(spherical_bessel_j(k, 1.0) / a - 1.0);
    if (k > 5) CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("j_l against extended precision Miller oracle and libstdc++") {
  CHECK(spherical_bessel_j(5, 10.0) ==
        doctest::Approx(static_cast<double>(miller_oracle(5, 10.0L))).epsilon(1e-12));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rr(0.05, 50.0);
  for (int k = 0; k < 200; ++k) {
    const double r = rr(rng);
    const int l = static_cast<int>(rng() % 40);
    const double got = spherical_bessel_j(l, r);
    const double want = static_cast<double>(miller_oracle(l, r));
    CHECK(std::abs(got - want) <= 1e-12 * std::max(std::abs(want), 1e-3 / r));
  }
}

TEST_CASE("riccati u equals r j_l") {
  for (int l = 0; l <= 50; l += 7)
    for (double r : {0.5, 3.0, 17.0, 50.0}) {
      const double want = r * static_cast<double>(miller_oracle(l, r));
      CHECK(std::abs(riccati_bessel_u(l, r) - want) <= 1e-12 * std::max(1e-300, std::abs(want)) + 1e-15);
    }
}

TEST_CASE("wronskian r^2 (j y' - j' y) = 1") {
  for (double r : {0.5, 1.0, 2.5, 10.0, 33.0, 50.0}) {
    const int lmax = 30;
    const auto j = spherical_bessel_j_all(lmax, r);
    const auto y = spherical_bessel_y_all(lmax, r);
    const auto dj = spherical_bessel_j_derivative_all(lmax, r);
    const auto dy = spherical_bessel_y_derivative_all(lmax, r);
    for (int l = 0; l <= lmax; ++l)
      CHECK(r * r * (j[l] * dy[l] - dj[l] * y[l]) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("hankel far field") {
  // h_l(r) r e^{-ir} = 1 + i l(l+1)/(2r) + O(l^4/r^2).
  for (int l = 0; l <= 5; ++l) {
    const double r = 100.0;
    const cplx ratio = spherical_hankel_h(l, r) * r * std::exp(cplx(0.0, -r));
    const cplx first_order = 1.0 + cplx(0.0, l * (l + 1.0) / (2.0 * r));
    CHECK(std::abs(ratio - first_order) <= std::pow(l * (l + 1.0), 2) / (8.0 * r * r) + 1e-12);
    if (l <= 3) CHECK(std::abs(ratio - 1.0) <= 0.1);
  }
  const double r = 0.7;
  CHECK(std::abs(spherical_hankel_h(0, r) - std::exp(cplx(0.0, r)) / r) < 1e-14);
}

TEST_CASE("range errors") {
  CHECK_THROWS_AS(spherical_bessel_j(201, 1.0), RangeError);
  CHECK_THROWS_AS(spherical_bessel_j(3, 1e4), RangeError);
  CHECK_THROWS_AS(spherical_bessel_j(200, 1e-3), RangeError);
  CHECK_THROWS_AS(spherical_harmonic(61, 0, Vec3(0, 0, 1)), RangeError);
  CHECK_THROWS_AS(spherical_bessel_y(2, 0.0), DomainError);
}

TEST_CASE("legendre polynomials") {
  CHECK(legendre_p(2, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  const double x = 0.3;
  const double explicit_p10 =
      (46189 * std::pow(x, 10) - 109395 * std::pow(x, 8) + 90090 * std::pow(x, 6) -
       30030 * std::pow(x, 4) + 3465 * x * x - 63) / 256.0;
  CHECK(std::abs(legendre_p(10, x) - explicit_p10) < 1e-13);
}

TEST_CASE("spherical harmonics against libstdc++ sph_legendre") {
  for (int l = 0; l <= 20; ++l)
    for (int m = 0; m <= l; ++m)
      for (double th : {0.1, 0.9, 2.0, 3.0}) {
        const double phi = 0.37;
        const Vec3 v(std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi), std::cos(th));
        const cplx want = std::sph_legendre(l, m, th) * std::exp(cplx(0.0, m * phi));
        CHECK(std::abs(spherical_harmonic(l, m, v) - want) < 1e-12);
        const cplx want_neg = ((m % 2) ? -1.0 : 1.0) * std::conj(want);
        CHECK(std::abs(spherical_harmonic(l, -m, v) - want_neg) < 1e-12);
      }
}

TEST_CASE("gram matrix of spherical harmonics is the identity") {
  const int lmax = 10;
  const auto rule = product_sphere_rule(16, 32);
  const int n = lm_count(lmax);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < rule.directions.size(); ++k) {
    const auto y = spherical_harmonics_all(lmax, rule.directions[k]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) += rule.weights[k] * y[i] * std::conj(y[j]);
  }
  CHECK((g - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("addition theorem") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 a = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    const Vec3 b = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    const auto ya = spherical_harmonics_all(20, a);
    const auto yb = spherical_harmonics_all(20, b);
    const auto p = legendre_p_all(20, a.dot(b));
    for (int l = 0; l <= 20; ++l) {
      cplx s = 0.0;
      for (int m = -l; m <= l; ++m) s += ya[lm_index(l, m)] * std::conj(yb[lm_index(l, m)]);
      CHECK(std::abs(s - (2.0 * l + 1.0) / (4.0 * std::numbers::pi) * p[l]) < 1e-10);
    }
  }
}

TEST_CASE("complex continuation agrees with trigonometric evaluation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    const ComplexAngle ang{cplx(1.0 + 0.5 * u(rng), u(rng)), cplx(3.0 * u(rng), u(rng))};
    const Vec3c v = ang.direction();
    CHECK(std::abs(bilinear_dot(v, v) - 1.0) <= 1e-12);
    const auto y = spherical_harmonics_all(12, v);
    for (int l = 0; l <= 12; ++l)
      for (int m = -l; m <= l; ++m) {
        const cplx want = trig_harmonic(l, m, ang.theta, ang.phi);
        CHECK(std::abs(y[lm_index(l, m)] - want) <= 1e-10 * std::max(1.0, std::abs(want)));
      }
  }
}

TEST_CASE("harmonics stay finite where sin(theta) vanishes on M") {
  // theta = (i, sqrt(2), 0) rotated so that theta_3 = 1 while theta != e3.
  const Vec3c v(cplx(0.0, 1.0), cplx(1.0, 0.0), cplx(1.0, 0.0));
  CHECK(std::abs(bilinear_dot(v, v) - 1.0) < 1e-15);
  const auto y = spherical_harmonics_all(10, v);
  for (const cplx& c : y) CHECK(std::isfinite(std::abs(c)));
}

TEST_CASE("growth bound for harmonics on M") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 xi = Vec3(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5).normalized() * (3.0 * u(rng));
    const double mag = min_theta_magnitude(xi.norm()) + 8.0 * u(rng);
    const ThetaPair pair = make_theta_pair(xi, mag);
    const int l = static_cast<int>(rng() % 13);
    const double r = std::array<double, 3>{1.0, 5.0, 10.0}[rng() % 3];
    const double bound = std::exp(r * pair.kappa()) /
                         (std::sqrt(4.0 * std::numbers::pi) * std::abs(spherical_bessel_j(l, r)));
    const auto y = spherical_harmonics_all(l, pair.theta);
    for (int m = -l; m <= l; ++m)
      if (std::abs(y[lm_index(l, m)]) > bound) ++violations;
  }
  CHECK(violations == 0);
}
