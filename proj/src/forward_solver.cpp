#include "invscat/forward_solver.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "invscat/errors.hpp"

namespace invscat {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;

double log_double_factorial_odd(int l) {
  // ln((2l+1)!!) = ln((2l+2)!) - (l+1) ln 2 - ln((l+1)!)
  return std::lgamma(2.0 * l + 3.0) - (l + 1.0) * std::log(2.0) - std::lgamma(l + 2.0);
}

template <class System>
void integrate_segment(System sys, State& x, double r_from, const std::vector<double>& stops,
                       double rtol, std::vector<State>& out) {
  std::vector<double> times;
  times.reserve(stops.size() + 1);
  times.push_back(r_from);
  times.insert(times.end(), stops.begin(), stops.end());
  double reached = r_from;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-20, rtol);
  auto observer = [&](const State& s, double r) {
    reached = r;
    if (r > r_from) out.push_back(s);
  };
  try {
    const double dt0 = std::min(1e-3, 0.1 * (times.back() - r_from) + 1e-12);
    odeint::integrate_times(stepper, sys, x, times.begin(), times.end(), dt0, observer,
                            odeint::max_step_checker(2000000));
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("radial integration failed: ") + e.what(), reached);
  }
}

}  // namespace

double RegularSolution::phi(std::size_t i) const { return value[i] * std::exp(log_scale); }
double RegularSolution::dphi(std::size_t i) const {
  return derivative[i] * std::exp(log_scale);
}

RegularSolution compute_regular_solution(const RadialPotential& q, int l,
                                         const std::vector<double>& r_grid,
                                         const OdeOptions& opt) {
  if (l < 0 || l > kMaxPartialWave)
    throw RangeError("partial wave " + std::to_string(l) + " outside [0, 60]");
  const double a = q.support();
  const double r0 = opt.start_fraction * a;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > r0))
      throw DomainError("solution grid must lie above the start radius " + std::to_string(r0));
    if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
      throw ValidationError("solution grid must be strictly increasing");
  }

  const double ll = l * (l + 1.0);
  const double c2 = (q(r0) - 1.0) / (2.0 * (2.0 * l + 3.0));
  State x{1.0 + c2 * r0 * r0, (l + 1.0) / r0 + (l + 3.0) * c2 * r0};

  RegularSolution sol;
  sol.l = l;
  sol.r = r_grid;
  sol.log_scale = (l + 1.0) * std::log(r0) - log_double_factorial_odd(l);

  std::vector<double> inner, outer;
  for (double r : r_grid) (r <= a ? inner : outer).push_back(r);

  std::vector<State> states;
  auto inside = [&](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = (ll / (r * r) + q(r) - 1.0) * s[0];
  };
  auto outside = [&](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = (ll / (r * r) - 1.0) * s[0];
  };

  std::vector<double> stops = inner;
  const bool need_outer = !outer.empty();
  if (need_outer && (stops.empty() || stops.back() < a)) stops.push_back(a);
  integrate_segment(inside, x, r0, stops, opt.rtol, states);
  if (need_outer && inner.size() < stops.size()) states.pop_back();
  if (need_outer) integrate_segment(outside, x, a, outer, opt.rtol, states);

  for (const State& s : states) {
    sol.value.push_back(s[0]);
    sol.derivative.push_back(s[1]);
  }
  return sol;
}

cplx PhaseShiftSet::partial_wave(int l) const {
  const double t = tan_delta[l];
  if (std::isinf(t)) return cplx(0.0, 1.0);
  return t / cplx(1.0, -t);
}

PhaseShiftSet compute_phase_shifts(const RadialPotential& q, int l_max, const OdeOptions& opt) {
  if (l_max < 0 || l_max > kMaxPartialWave)
    throw RangeError("L_max " + std::to_string(l_max) + " outside [0, 60]");
  const double a = q.support();
  const auto j = spherical_bessel_j_all(l_max, a);
  const auto y = spherical_bessel_y_all(l_max, a);
  const auto dj = spherical_bessel_j_derivative_all(l_max, a);
  const auto dy = spherical_bessel_y_derivative_all(l_max, a);

  PhaseShiftSet out;
  if (q.is_zero()) {
    out.delta.assign(l_max + 1, 0.0);
    out.tan_delta.assign(l_max + 1, 0.0);
    out.jost_modulus.assign(l_max + 1, 1.0);
    return out;
  }
  for (int l = 0; l <= l_max; ++l) {
    const auto sol = compute_regular_solution(q, l, {a}, opt);
    double chi = sol.value[0], dchi = sol.derivative[0];
    const double s = std::abs(chi) + a * std::abs(dchi);
    chi /= s;
    dchi /= s;
    const double log_scale = sol.log_scale + std::log(s);

    const double u = a * j[l], du = j[l] + a * dj[l];
    const double v = a * y[l], dv = y[l] + a * dy[l];
    // phi = alpha u + beta v, using W(u, v) = 1.
    const double alpha = chi * dv - dchi * v;
    const double beta = u * dchi - du * chi;
    const double t = -beta / alpha;
    out.tan_delta.push_back(t);
    out.delta.push_back(alpha == 0.0 ? std::numbers::pi / 2 : std::atan(t));
    out.jost_modulus.push_back(std::hypot(alpha, beta) * std::exp(log_scale));
  }
  return out;
}

AmplitudeData amplitude_from_phase_shifts(const PhaseShiftSet& shifts) {
  std::vector<cplx> a(shifts.delta.size());
  for (int l = 0; l <= shifts.l_max(); ++l) a[l] = shifts.partial_wave(l);
  return AmplitudeData::from_partial_waves(std::move(a));
}

cplx amplitude_pointwise(const std::vector<cplx>& partial_wave, double cos_angle) {
  const int lmax = static_cast<int>(partial_wave.size()) - 1;
  const auto p = legendre_p_all(lmax, cos_angle);
  cplx sum = 0.0;
  for (int l = 0; l <= lmax; ++l) sum += (2.0 * l + 1.0) * partial_wave[l] * p[l];
  return sum;
}

cplx scattering_solution_exterior(const AmplitudeData& amp, double support, const Vec3& x,
                                  const Vec3& alpha) {
  const double r = x.norm();
  if (!(r > support))
    throw DomainError("exterior solution requested at |x| = " + std::to_string(r) +
                      " inside the support radius");
  const int lmax = amp.l_max();
  const auto h = spherical_hankel_h_all(lmax, r);
  const Vec3 xhat = x / r;
  cplx u = std::exp(cplx(0.0, alpha.dot(x)));
  if (amp.isotropic()) {
    const auto p = legendre_p_all(lmax, xhat.dot(alpha));
    for (int l = 0; l <= lmax; ++l)
      u += (2.0 * l + 1.0) * amp.partial_wave()[l] * p[l] * h[l];
    return u;
  }
  const auto yx = spherical_harmonics_all(lmax, xhat);
  const auto ya = spherical_harmonics_all(lmax, alpha);
  const int n = lm_count(lmax);
  Eigen::VectorXcd ca(n), yh(n);
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) {
      ca(lm_index(l, m)) = std::conj(ya[lm_index(l, m)]);
      yh(lm_index(l, m)) = yx[lm_index(l, m)] * h[l];
    }
  return u + (yh.transpose() * amp.coeffs() * ca).value();
}

double fourier_transform_radial(const RadialPotential& q, double xi_norm) {
  const double t = std::abs(xi_norm);
  const double four_pi = 4.0 * std::numbers::pi;
  if (t < 1e-8) return four_pi * q.integrate([](double r) { return r * r; });
  return four_pi * q.integrate([t](double r) { return r * std::sin(t * r) / t; });
}

double l_functional(const RadialPotential& q) {
  return q.integrate([](double r) { return r; }, 4);
}

double born_phase_shift(const RadialPotential& q, int l) {
  return -q.integrate([l](double r) {
    const double u = riccati_bessel_u(l, r);
    return u * u;
  });
}

}  // namespace invscat
