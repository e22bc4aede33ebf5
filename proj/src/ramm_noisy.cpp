#include "invscat/ramm_noisy.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "invscat/errors.hpp"

namespace invscat {

int truncation_N(double delta) {
  if (!(delta > 0.0) || !(delta < std::exp(-std::numbers::e)))
    throw DomainError("noise level " + std::to_string(delta) +
                      " outside (0, e^{-e}); N(delta) is undefined");
  const double L = std::abs(std::log(delta));
  return static_cast<int>(std::lround(L / std::log(L)));
}

double noisy_error_rate(double delta) {
  const double L = std::abs(std::log(delta));
  return std::pow(std::log(L), 2) / L;
}

AmplitudeData corrupt_amplitude(const AmplitudeData& amp, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw DomainError("noise level must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const int L = amp.l_max();
  if (amp.isotropic()) {
    std::vector<cplx> a = amp.partial_wave();
    for (int l = 0; l <= L; ++l) {
      const double mag = delta / (2.0 * (L + 1.0) * (2.0 * l + 1.0));
      a[l] += std::polar(mag, phase(rng));
    }
    return AmplitudeData::from_partial_waves(std::move(a));
  }
  // |Y_lm| <= sqrt((2l+1)/(4 pi)) bounds every term of the harmonic sum.
  const int n = lm_count(L);
  const double ymax2 = (2.0 * L + 1.0) / (4.0 * std::numbers::pi);
  const double mag = delta / (2.0 * double(n) * double(n) * ymax2);
  Eigen::MatrixXcd t = amp.coeffs();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) t(i, j) += std::polar(mag, phase(rng));
  return AmplitudeData::from_tensor(std::move(t));
}

void NoisyParams::validate() const {
  exact.validate();
  if (!(theta_max > 1.0)) throw ValidationError("noisy.theta_max must exceed 1");
  if (theta_scan_points < 2) throw ValidationError("noisy.theta_scan_points must be >= 2");
  if (bisection_iterations < 0 || bisection_iterations > 30)
    throw ValidationError("noisy.bisection_iterations must lie in [0, 30]");
  if (c_constraint && !(*c_constraint > 0.0))
    throw ValidationError("noisy.c_constraint must be positive");
  if (!(c_factor > 0.0)) throw ValidationError("noisy.c_factor must be positive");
}

double NoisyParams::gamma() const { return std::log(exact.a1 / exact.a); }

RhoBasis assemble_noisy(const AmplitudeData& amp_delta, const ThetaPair& pair,
                        const NoisyParams& p, int n_trunc) {
  const int n = std::min(n_trunc, amp_delta.l_max());
  const ShellGrid grid = shell_grid_for(p.exact, pair, n);
  return assemble_rho_basis(amp_delta, pair, grid, p.exact.l_nu, n, p.exact.force_dense);
}

NoisyObjective minimize_noisy(const RhoBasis& basis, double penalty_weight) {
  const RhoSolver solver(basis, Penalty::Plain);
  auto objective = [&](double log_lambda) {
    const auto [res, nrm] = solver.residual_and_norm(std::exp(log_lambda));
    return res + penalty_weight * nrm;
  };

  NuCoefficients zero;
  zero.l_max = basis.l_nu;
  zero.frame = basis.frame;
  zero.c = Eigen::VectorXcd::Zero(lm_count(basis.l_nu));
  NoisyObjective best;
  best.nu = zero;
  best.residual = rho_norm(basis, zero);
  best.value = best.residual;
  best.lambda = INFINITY;

  // The minimizer of ||rho|| + w ||c|| solves a Tikhonov problem with
  // lambda = w ||rho|| / ||c||, so a search along lambda suffices.
  const double smax2 = std::max(solver.sigma_max() * solver.sigma_max(), 1e-300);
  const double hi = std::log(smax2) + 4.0 * std::log(10.0);
  const double lo = std::log(smax2) - 36.0 * std::log(10.0);
  const int n = 161;
  const double step = (hi - lo) / (n - 1);
  int arg = -1;
  double fmin = best.value;
  for (int k = 0; k < n; ++k) {
    const double f = objective(hi - k * step);
    if (f < fmin) {
      fmin = f;
      arg = k;
    }
  }
  if (arg < 0) return best;

  double a = hi - (arg + 1) * step, b = hi - (arg - 1) * step;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = objective(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = objective(x2);
    }
  }
  double ll = f1 < f2 ? x1 : x2;
  if (std::min(f1, f2) > fmin) ll = hi - arg * step;

  const RhoSolution sol = solver.solve(std::exp(ll));
  best.nu = sol.nu;
  best.residual = sol.residual;
  best.nu_norm = sol.nu.norm();
  best.lambda = sol.lambda;
  best.value = best.residual + penalty_weight * best.nu_norm;
  return best;
}

namespace {

struct ThetaEval {
  ThetaPair pair;
  NoisyObjective obj;
  double g = 0.0;
  cplx q_hat;
};

ThetaEval evaluate_theta(const AmplitudeData& amp, const Vec3& xi, double theta, int n_trunc,
                         double mu, const NoisyParams& p) {
  ThetaEval e;
  e.pair = make_theta_pair(xi, theta);
  const RhoBasis basis = assemble_noisy(amp, e.pair, p, n_trunc);
  const double w = std::exp(e.pair.kappa() * p.exact.b) * mu;
  e.obj = minimize_noisy(basis, w);
  e.g = theta * e.obj.value;
  e.q_hat = reconstruct_q_hat(basis, e.obj.nu).value;
  return e;
}

double theta_floor(const Vec3& xi) { return std::max(1.0, min_theta_magnitude(xi.norm())); }

}  // namespace

double noisy_constraint_value(const AmplitudeData& amp, const ThetaPair& pair,
                              const NoisyParams& p, double delta) {
  const int n = truncation_N(delta);
  const double mu = std::exp(-p.gamma() * n);
  const RhoBasis basis = assemble_noisy(amp, pair, p, n);
  return pair.magnitude() * minimize_noisy(basis, std::exp(pair.kappa() * p.exact.b) * mu).value;
}

double default_noisy_constraint(const AmplitudeData& clean, const Vec3& xi, double delta,
                                const NoisyParams& p) {
  const double theta = std::max(p.reference_theta, theta_floor(xi));
  return p.c_factor * noisy_constraint_value(clean, make_theta_pair(xi, theta), p, delta);
}

NoisyResult solve_constrained(const AmplitudeData& amp_delta, const Vec3& xi, double delta,
                              double c_constraint, const NoisyParams& p) {
  p.validate();
  NoisyResult out;
  out.xi = xi;
  out.delta = delta;
  out.n_trunc = truncation_N(delta);
  out.mu = std::exp(-p.gamma() * out.n_trunc);
  out.c_constraint = c_constraint;

  const double lo = theta_floor(xi);
  if (!(p.theta_max > lo))
    throw InfeasibleError("theta_max is below the smallest admissible |theta|");
  auto eval = [&](double t) { return evaluate_theta(amp_delta, xi, t, out.n_trunc, out.mu, p); };

  ThetaEval best = eval(lo);
  if (best.g > c_constraint)
    throw InfeasibleError("constraint |theta| F <= c infeasible at the smallest |theta|: " +
                          std::to_string(best.g) + " > " + std::to_string(c_constraint));
  double t_ok = lo, t_bad = -1.0;
  const int n = p.theta_scan_points;
  const double ratio = std::pow(p.theta_max / lo, 1.0 / (n - 1));
  double t = lo;
  for (int k = 1; k < n; ++k) {
    t = (k == n - 1) ? p.theta_max : t * ratio;
    ThetaEval e = eval(t);
    if (e.g <= c_constraint) {
      best = std::move(e);
      t_ok = t;
      t_bad = -1.0;
    } else if (t_bad < 0.0) {
      t_bad = t;
    }
  }
  // t_bad is the first infeasible point above the last feasible one.
  if (t_bad < 0.0) {
    out.reached_cap = true;
  } else {
    for (int it = 0; it < p.bisection_iterations; ++it) {
      const double mid = 0.5 * (t_ok + t_bad);
      ThetaEval e = eval(mid);
      if (e.g <= c_constraint) {
        best = std::move(e);
        t_ok = mid;
      } else {
        t_bad = mid;
      }
      if (t_bad - t_ok < 1e-6 * t_ok) break;
    }
  }
  out.theta_magnitude = t_ok;
  out.objective = best.obj;
  out.g = best.g;
  out.slack = c_constraint - best.g;
  out.q_hat = best.q_hat;
  return out;
}

cplx reconstruct_noisy(const AmplitudeData& amp_delta, const NoisyResult& res,
                       const NoisyParams& p) {
  const ThetaPair pair = make_theta_pair(res.xi, res.theta_magnitude);
  const RhoBasis basis = assemble_noisy(amp_delta, pair, p, res.n_trunc);
  return reconstruct_q_hat(basis, res.objective.nu).value;
}

}  // namespace invscat
