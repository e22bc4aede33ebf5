#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "invscat/errors.hpp"
#include "invscat/newton_sabatier.hpp"

using namespace invscat;
using boost::math::quadrature::gauss_kronrod;

namespace {

double u_ref(int l, double x) { return x * std::sph_bessel(l, x); }

double du_ref(int l, double x) {
  const double dj = l == 0 ? -std::sph_bessel(1, x)
                           : std::sph_bessel(l - 1, x) - (l + 1) / x * std::sph_bessel(l, x);
  return std::sph_bessel(l, x) + x * dj;
}

double sinc2_integral(double r) {
  auto g = [](double t) { return t < 1e-8 ? 1.0 : std::pow(std::sin(t) / t, 2); };
  return gauss_kronrod<double, 61>::integrate(g, 0.0, r, 15, 1e-15);
}

std::vector<double> uniform(double lo, double hi, double h) {
  std::vector<double> g;
  for (int k = 0; lo + k * h <= hi + 1e-12; ++k) g.push_back(lo + k * h);
  return g;
}

}  // namespace

TEST_CASE("f is the finite bilinear sum") {
  CHECK(build_f({{0.0, 0.0}}, 1.3, 2.1) == 0.0);
  CHECK(build_f({{1.0}}, 1.3, 2.1) == doctest::Approx(std::sin(1.3) * std::sin(2.1)).epsilon(1e-14));
  const NSCoefficients c{{0.4, -0.2, 0.7, 0.05}};
  const NSCoefficients d{{-0.1, 0.3, 0.0, 1.5}};
  NSCoefficients sum = c;
  for (int l = 0; l < 4; ++l) sum.c[l] += 2.0 * d.c[l];
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 30.0);
  for (int k = 0; k < 100; ++k) {
    const double r = u(rng), s = u(rng);
    CHECK(std::abs(build_f(c, r, s) - build_f(c, s, r)) <= 1e-14);
    CHECK(std::abs(build_f(sum, r, s) - build_f(c, r, s) - 2.0 * build_f(d, r, s)) <= 1e-13);
    double ref = 0.0;
    for (int l = 0; l < 4; ++l) ref += c.c[l] * u_ref(l, r) * u_ref(l, s);
    CHECK(build_f(c, r, s) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("zero coefficients give a zero kernel") {
  const KernelRow row = solve_kernel_equation({{0.0}}, 3.0);
  CHECK(row.solvable);
  CHECK(row.diag == 0.0);
  for (double v : row.k) CHECK(v == 0.0);
  const DiagonalBound b = ns_diagonal_boundedness({{0.0}}, 25.0);
  CHECK(b.sup == 0.0);
  const auto q = ns_potential({{}}, uniform(0.1, 2.0, 0.1));
  for (double v : q) CHECK(v == 0.0);
}

TEST_CASE("rank-one kernel matches the closed form") {
  const double c0 = 0.5;
  for (double r : {0.3, 1.0, 4.0, 12.0, 40.0}) {
    const KernelRow row = solve_kernel_equation({{c0}}, r);
    REQUIRE(row.solvable);
    CHECK(row.residual <= 1e-8);
    const double alpha = c0 * std::sin(r) / (1.0 + c0 * sinc2_integral(r));
    for (std::size_t j = 0; j < row.s.size(); ++j)
      CHECK(std::abs(row.k[j] - alpha * std::sin(row.s[j])) <= 1e-10);
    CHECK(std::abs(row.diag - alpha * std::sin(r)) <= 1e-10);
  }
}

TEST_CASE("small coefficients follow the two-term Neumann series") {
  const NSCoefficients c{{1e-3, 5e-4, 2e-4}};
  for (double r : {0.5, 2.0, 6.0}) {
    const KernelRow row = solve_kernel_equation(c, r);
    REQUIRE(row.solvable);
    for (std::size_t j = 0; j < row.s.size(); j += 5) {
      const double s = row.s[j];
      auto integrand = [&](double t) {
        if (t < 1e-12) return 0.0;
        return build_f(c, r, t) * build_f(c, t, s) / (t * t);
      };
      const double oracle =
          build_f(c, r, s) - gauss_kronrod<double, 61>::integrate(integrand, 0.0, r, 15, 1e-14);
      CHECK(std::abs(row.k[j] - oracle) <= 1e-8);
    }
  }
}

TEST_CASE("kernel diagonal converges under node doubling") {
  const NSCoefficients c{{0.5, 0.3, 0.1}};
  NSOptions coarse;
  NSOptions fine = coarse;
  fine.n_quad *= 2;
  fine.nodes_per_unit *= 2;
  for (double r : {1.0, 5.0, 15.0}) {
    const double a = solve_kernel_equation(c, r, coarse).diag;
    const double b = solve_kernel_equation(c, r, fine).diag;
    CHECK(std::abs(a - b) <= 1e-6);
  }
  NSOptions bad;
  bad.n_quad = 15;
  CHECK_THROWS_AS(solve_kernel_equation(c, 1.0, bad), ValidationError);
}

TEST_CASE("residual bound on solvable rows") {
  const NSCoefficients c{{0.8, -0.3, 0.2, 0.1}};
  const KernelSolution sol = solve_kernel(c, uniform(0.25, 20.0, 0.25));
  for (const auto& row : sol.rows)
    if (row.solvable) CHECK(row.residual <= 1e-8);
}

TEST_CASE("manufactured singular radius is flagged") {
  const double r_star = 3.0;
  const NSCoefficients c{{-1.0 / sinc2_integral(r_star)}};
  const KernelRow row = solve_kernel_equation(c, r_star);
  CHECK(row.min_singular < 1e-10);
  CHECK_FALSE(row.solvable);
  CHECK(row.k.empty());
  CHECK(std::isnan(row.diag));
  CHECK(solve_kernel_equation(c, r_star - 0.1).min_singular > 1e-10);

  bool thrown = false;
  try {
    ns_potential(c, {2.9, 2.95, 3.0, 3.05});
  } catch (const NonSolvableError& e) {
    thrown = true;
    REQUIRE(e.radii.size() == 1);
    CHECK(e.radii[0] == r_star);
  }
  CHECK(thrown);
}

TEST_CASE("weak coefficients give the first-order potential") {
  const NSCoefficients c{{1e-4, 5e-5}};
  const auto grid = uniform(0.5, 8.0, 0.01);
  const auto q = ns_potential(c, grid);
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    double d = 0.0;  // d/dr (f(r,r)/r)
    for (int l = 0; l < 2; ++l) {
      const double u = u_ref(l, r);
      d += c.c[l] * (2.0 * u * du_ref(l, r) / r - u * u / (r * r));
    }
    const double born = -2.0 / r * d;
    scale = std::max(scale, std::abs(born));
    err = std::max(err, std::abs(q[i] - born));
  }
  CHECK(err <= 1e-3 * scale);
}

TEST_CASE("potential is stable under grid refinement") {
  const NSCoefficients c{{0.5, 0.2}};
  const auto coarse = uniform(0.5, 10.0, 0.02);
  const auto fine = uniform(0.5, 10.0, 0.01);
  const auto qc = ns_potential(c, coarse);
  const auto qf = ns_potential(c, fine);
  for (std::size_t i = 2; i + 2 < coarse.size(); ++i) CHECK(std::abs(qc[i] - qf[2 * i]) <= 1e-4);
}

TEST_CASE("diagonal and potential satisfy the trace relation") {
  const NSCoefficients c{{0.5, 0.2}};
  const auto grid = uniform(0.005, 6.0, 0.005);
  const KernelSolution sol = solve_kernel(c, grid);
  REQUIRE(sol.solvable());
  // K(r,r)/r - K(r0,r0)/r0 = -(1/2) int_r0^r s q_N ds, trapezoid in s.
  const double g0 = sol.diag[0] / grid[0];
  double acc = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    acc += 0.5 * (grid[i] * sol.q_n[i] + grid[i - 1] * sol.q_n[i - 1]) * (grid[i] - grid[i - 1]);
    if (i % 50 == 0) CHECK(std::abs(sol.diag[i] / grid[i] - g0 + 0.5 * acc) <= 1e-5);
  }
}

TEST_CASE("trace identity growth") {
  const auto grid = uniform(1.0, 50.0, 0.5);
  CHECK(check_trace_identity(make_zero_potential(1.0), grid).slope == 0.0);
  const RadialPotential well = make_square_well(-1.0, 1.0);
  const TraceGrowth t = check_trace_identity(well, grid);
  CHECK(t.slope == doctest::Approx(-l_functional(well) / 2.0).epsilon(1e-10));
  CHECK(t.slope == doctest::Approx(0.25).epsilon(1e-10));
  const RadialPotential gauss = make_truncated_gaussian(-3.0, 0.4, 1.0);
  CHECK(check_trace_identity(gauss, grid).slope ==
        doctest::Approx(-l_functional(gauss) / 2.0).epsilon(1e-8));
  CHECK(std::abs(t.k_diag.back()) > 12.0);
}

TEST_CASE("finite coefficients keep the diagonal bounded") {
  const DiagonalBound b = ns_diagonal_boundedness({{0.5}}, 50.0);
  CHECK(b.flagged.empty());
  CHECK(std::abs(b.slope) <= 0.02);
  CHECK(b.sup <= 0.5);
}

TEST_CASE("regeneration from the NS potential") {
  const PhaseShiftSet zero = compute_phase_shifts(make_zero_potential(1.0), 5);
  CHECK(regenerate_and_compare({{0.0}}, zero).max_discrepancy == 0.0);

  const NSCoefficients c{{0.3, 0.1}};
  RegenerationOptions fine;
  fine.step = 0.005;
  const PhaseShiftSet self = compute_phase_shifts(truncated_ns_potential(c, fine), 5);
  CHECK(regenerate_and_compare(c, self).max_discrepancy <= 1e-3);
}
