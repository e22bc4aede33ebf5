#include "invscat/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "invscat/experiments.hpp"
#include "invscat/forward_solver.hpp"
#include "invscat/ramm_exact.hpp"
#include "invscat/special_functions.hpp"
#include "invscat/variety.hpp"

namespace invscat {

namespace {

std::string fmt(const char* label, double v) {
  std::ostringstream o;
  o << label << '=' << v;
  return o.str();
}

SelftestCheck addition_theorem() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vec3 a = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    const Vec3 b = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    const auto ya = spherical_harmonics_all(20, a);
    const auto yb = spherical_harmonics_all(20, b);
    const auto p = legendre_p_all(20, a.dot(b));
    for (int l = 0; l <= 20; ++l) {
      cplx s = 0.0;
      for (int m = -l; m <= l; ++m) s += ya[lm_index(l, m)] * std::conj(yb[lm_index(l, m)]);
      worst = std::max(worst, std::abs(s - (2.0 * l + 1.0) / (4.0 * std::numbers::pi) * p[l]));
    }
  }
  return {"addition theorem", worst <= 1e-10, fmt("max_error", worst)};
}

SelftestCheck wronskian() {
  // Riccati pair: W(u_l, v_l) = 1. Regular solution against v_l outside the
  // support: constant in r.
  double worst_free = 0.0, worst_pot = 0.0;
  for (int l = 0; l <= 10; ++l)
    for (double r : {0.5, 1.0, 3.0, 10.0, 40.0}) {
      const double j = spherical_bessel_j(l, r), y = spherical_bessel_y(l, r);
      const auto dj = spherical_bessel_j_derivative_all(l, r);
      const auto dy = spherical_bessel_y_derivative_all(l, r);
      const double u = r * j, du = j + r * dj[l], v = r * y, dv = y + r * dy[l];
      worst_free = std::max(worst_free, std::abs(u * dv - du * v - 1.0));
    }
  const RadialPotential q = make_square_well(-1.0, 1.0);
  const std::vector<double> grid{1.5, 3.0, 6.0, 10.0};
  for (int l = 0; l <= 10; ++l) {
    const RegularSolution sol = compute_regular_solution(q, l, grid);
    std::vector<double> w;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = grid[i];
      const double y = spherical_bessel_y(l, r);
      const double dy = spherical_bessel_y_derivative_all(l, r)[l];
      const double v = r * y, dv = y + r * dy;
      w.push_back(sol.value[i] * dv - sol.derivative[i] * v);
    }
    for (double x : w) worst_pot = std::max(worst_pot, std::abs(x / w[0] - 1.0));
  }
  const bool ok = worst_free <= 1e-10 && worst_pot <= 1e-7;
  return {"Wronskian constancy", ok, fmt("free", worst_free) + " " + fmt("potential", worst_pot)};
}

SelftestCheck born() {
  const RadialPotential q = make_truncated_gaussian(1.0, 0.5, 1.0);
  double worst_ratio = 0.0;
  bool ok = true;
  for (int l = 0; l <= 4; ++l) {
    auto dev = [&](double eps) {
      const RadialPotential qe = q.scaled(eps);
      return std::abs(compute_phase_shifts(qe, l).delta[l] - born_phase_shift(qe, l));
    };
    const double ratio = dev(2e-2) / dev(1e-2);
    worst_ratio = std::max(worst_ratio, std::abs(ratio - 4.0));
    ok = ok && ratio > 3.5 && ratio < 4.5;
    const RadialPotential small = q.scaled(1e-3);
    const double rel = std::abs(compute_phase_shifts(small, l).delta[l] / born_phase_shift(small, l) - 1.0);
    ok = ok && rel < 1e-2;
  }
  return {"Born consistency", ok, fmt("max_|eps^2_ratio-4|", worst_ratio)};
}

ExactParams small_geometry() {
  ExactParams p;
  p.a = 0.25;
  p.a1 = 0.3;
  p.b = 0.4;
  p.l_nu = 12;
  return p;
}

SelftestCheck zero_reconstruction() {
  const RadialPotential q = make_zero_potential(1.0);
  const AmplitudeData amp = amplitude_from_phase_shifts(compute_phase_shifts(q, 10));
  ExactParams p;
  double worst = 0.0;
  for (double t : {3.0, 5.0}) {
    const auto r = invert_exact_single(amp, make_theta_pair(Vec3(0.3, 0.0, 0.9), t), p, &q);
    worst = std::max(worst, r.abs_error);
  }
  return {"q = 0 end-to-end", worst <= 1e-10, fmt("max_abs_error", worst)};
}

SelftestCheck conjugation() {
  const RadialPotential q = make_truncated_gaussian(16.0, 0.125, 0.25);
  const AmplitudeData amp = amplitude_from_phase_shifts(compute_phase_shifts(q, 12));
  const ExactParams p = small_geometry();
  double worst = 0.0;
  for (const Vec3& xi : {Vec3(0, 0, 1), Vec3(0.6, -0.3, 0.5)}) {
    const ThetaPair pair = make_theta_pair(xi, 5.0);
    const cplx plus = invert_exact_single(amp, pair, p).q_hat;
    const cplx minus = invert_exact_single(amp, pair.mirrored(), p).q_hat;
    worst = std::max(worst, std::abs(minus - std::conj(plus)));
  }
  return {"conjugation symmetry", worst <= 1e-6, fmt("max_deviation", worst)};
}

SelftestCheck reproducibility(int threads) {
  ExperimentConfig cfg;
  cfg.exact = small_geometry();
  cfg.noisy.exact = cfg.exact;
  cfg.potential.kind = "gaussian_truncated";
  cfg.potential.v0 = 16.0;
  cfg.potential.width = 0.125;
  cfg.l_amp = 12;
  cfg.xi = {Vec3(0, 0, 0.5), Vec3(0, 0, 1)};
  cfg.theta = {3.0, 5.0};
  const ForwardRun data = run_forward_data(cfg);
  const std::string hash = config_hash(cfg);
  const std::string a = exact_csv(run_exact_sweep(cfg, data, 1), hash);
  const std::string b = exact_csv(run_exact_sweep(cfg, data, std::max(2, threads)), hash);
  const AmplitudeData n1 = corrupt_amplitude(data.amp, 1e-4, 11);
  const AmplitudeData n2 = corrupt_amplitude(data.amp, 1e-4, 11);
  const bool noise_same = n1.partial_wave() == n2.partial_wave();
  const bool ok = a == b && noise_same && config_hash(cfg) == hash;
  return {"reproducibility", ok,
          std::string("csv_identical=") + (a == b ? "1" : "0") + " noise_identical=" +
              (noise_same ? "1" : "0")};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(int threads) {
  const std::vector<std::pair<std::string, std::function<SelftestCheck()>>> suites{
      {"addition theorem", addition_theorem},
      {"Wronskian constancy", wronskian},
      {"Born consistency", born},
      {"q = 0 end-to-end", zero_reconstruction},
      {"conjugation symmetry", conjugation},
      {"reproducibility", [threads] { return reproducibility(threads); }}};
  std::vector<SelftestCheck> out;
  for (const auto& [name, suite] : suites) {
    const auto t0 = std::chrono::steady_clock::now();
    SelftestCheck c;
    try {
      c = suite();
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("exception: ") + e.what();
    }
    c.name = name;
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(c);
  }
  return out;
}

}  // namespace invscat
