#pragma once

#include <vector>

#include "invscat/amplitude.hpp"
#include "invscat/potential.hpp"
#include "invscat/special_functions.hpp"

namespace invscat {

inline constexpr int kMaxPartialWave = 60;

struct OdeOptions {
  double rtol = 1e-10;
  // Start radius as a fraction of the support radius.
  double start_fraction = 1e-4;
};

// Regular solution of phi'' + (1 - l(l+1)/r^2 - q) phi = 0 normalized so that
// phi ~ r^{l+1}/(2l+1)!! at the origin. Values are stored scaled:
// phi(r) = value * exp(log_scale), and likewise for the derivative.
struct RegularSolution {
  int l = 0;
  std::vector<double> r;
  std::vector<double> value;
  std::vector<double> derivative;
  double log_scale = 0.0;

  double phi(std::size_t i) const;
  double dphi(std::size_t i) const;
};

RegularSolution compute_regular_solution(const RadialPotential& q, int l,
                                         const std::vector<double>& r_grid,
                                         const OdeOptions& opt = {});

struct PhaseShiftSet {
  std::vector<double> delta;      // principal branch (-pi/2, pi/2]
  std::vector<double> tan_delta;  // kept separately so that tiny shifts stay exact
  std::vector<double> jost_modulus;

  int l_max() const { return static_cast<int>(delta.size()) - 1; }
  // a_l = e^{i delta} sin(delta).
  cplx partial_wave(int l) const;
};

PhaseShiftSet compute_phase_shifts(const RadialPotential& q, int l_max,
                                   const OdeOptions& opt = {});

AmplitudeData amplitude_from_phase_shifts(const PhaseShiftSet& shifts);

// A(a', a) = sum (2l+1) a_l P_l(a'.a).
cplx amplitude_pointwise(const std::vector<cplx>& partial_wave, double cos_angle);

// u(x, alpha) = e^{i alpha.x} + sum A_l'm'(alpha) Y_l'm'(x/|x|) h_l'(|x|), |x| > a.
cplx scattering_solution_exterior(const AmplitudeData& amp, double support, const Vec3& x,
                                  const Vec3& alpha);

// Radial Fourier transform q~(xi) = int q(x) e^{-i xi.x} dx.
double fourier_transform_radial(const RadialPotential& q, double xi_norm);

// L(q) = int_0^a r q(r) dr.
double l_functional(const RadialPotential& q);

// First Born approximation to the phase shift, -int q u_l^2 dr.
double born_phase_shift(const RadialPotential& q, int l);

}  // namespace invscat
