#pragma once

#include <cstdint>
#include <optional>

#include "invscat/ramm_exact.hpp"

namespace invscat {

// N(delta) = nearest integer to |ln delta| / ln|ln delta|; needs delta < e^{-e}.
int truncation_N(double delta);

// (ln|ln delta|)^2 / |ln delta|, the rate of the stability estimate.
double noisy_error_rate(double delta);

// A_delta with sup |A_delta - A| <= delta/2 over S^2 x S^2. Partial-wave data
// stay rotation invariant: a_l gets |eta_l| = delta / (2 (L+1) (2l+1)) with a
// seeded random phase. Deterministic for a given seed.
AmplitudeData corrupt_amplitude(const AmplitudeData& amp, double delta, std::uint64_t seed);

struct NoisyParams {
  ExactParams exact;
  double theta_max = 40.0;
  int theta_scan_points = 40;
  int bisection_iterations = 30;
  // Constraint |theta| F(theta) <= c. Unset means c_factor times the value at
  // reference_theta on clean data.
  std::optional<double> c_constraint;
  double c_factor = 10.0;
  double reference_theta = 2.0;

  void validate() const;
  double gamma() const;  // ln(a1 / a)
};

// min over nu of ||rho_delta(nu)|| + a(nu) e^{kappa b} mu at a single pair.
struct NoisyObjective {
  double value = 0.0;
  double residual = 0.0;
  double nu_norm = 0.0;
  double lambda = 0.0;
  NuCoefficients nu;
};

RhoBasis assemble_noisy(const AmplitudeData& amp_delta, const ThetaPair& pair,
                        const NoisyParams& p, int n_trunc);

NoisyObjective minimize_noisy(const RhoBasis& basis, double penalty_weight);

double noisy_constraint_value(const AmplitudeData& amp, const ThetaPair& pair,
                              const NoisyParams& p, double delta);

struct NoisyResult {
  Vec3 xi;
  double delta = 0.0;
  int n_trunc = 0;
  double mu = 0.0;
  double c_constraint = 0.0;
  double theta_magnitude = 0.0;
  bool reached_cap = false;
  NoisyObjective objective;
  double g = 0.0;  // |theta| F(theta) at the selected pair
  double slack = 0.0;
  cplx q_hat;
};

// Largest |theta| in [min, theta_max] with |theta| F(theta) <= c, by a
// geometric scan followed by bisection. Infeasible at the smallest |theta|
// throws InfeasibleError.
NoisyResult solve_constrained(const AmplitudeData& amp_delta, const Vec3& xi, double delta,
                              double c_constraint, const NoisyParams& p);

double default_noisy_constraint(const AmplitudeData& clean, const Vec3& xi, double delta,
                                const NoisyParams& p);

// q_hat_delta = -4 pi sum over l, l' <= N(delta) with the selected nu.
cplx reconstruct_noisy(const AmplitudeData& amp_delta, const NoisyResult& res,
                       const NoisyParams& p);

}  // namespace invscat
