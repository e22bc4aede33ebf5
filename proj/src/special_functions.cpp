#include "invscat/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "invscat/errors.hpp"

namespace invscat {

namespace {

constexpr double kPi = std::numbers::pi;

void check_bessel_args(int lmax, double r) {
  if (lmax < 0 || lmax > kMaxBesselOrder)
    throw RangeError("spherical Bessel order " + std::to_string(lmax) +
                     " outside [0, " + std::to_string(kMaxBesselOrder) + "]");
  if (!(r >= 0.0) || r > kMaxBesselArgument)
    throw RangeError("spherical Bessel argument " + std::to_string(r) +
                     " outside [0, 1e3]");
}

std::string pair_text(int l, double r) {
  return "(l=" + std::to_string(l) + ", r=" + std::to_string(r) + ")";
}

}  // namespace

std::vector<double> spherical_bessel_j_all(int lmax, double r) {
  check_bessel_args(lmax, r);
  std::vector<double> out(lmax + 1, 0.0);
  if (r == 0.0) {
    out[0] = 1.0;
    return out;
  }

  const double big = std::max<double>(lmax, std::ceil(r));
  const int start = static_cast<int>(big + 40.0 + 2.0 * std::sqrt(big));

  double f_next = 0.0;  // f_{n+1}
  double f = 1e-30;     // f_n
  for (int n = start; n >= 1; --n) {
    const double f_prev = (2.0 * n + 1.0) / r * f - f_next;
    f_next = f;
    f = f_prev;
    if (n - 1 <= lmax) out[n - 1] = f;
    if (std::abs(f) > 1e250) {
      f *= 1e-250;
      f_next *= 1e-250;
      for (int k = std::max(n - 1, 0); k <= lmax; ++k) out[k] *= 1e-250;
    }
  }
  const double f0 = f;
  const double f1 = f_next;

  double j0, j1;
  if (r < 0.1) {
    const double r2 = r * r;
    j0 = 1.0 - r2 / 6.0 * (1.0 - r2 / 20.0 * (1.0 - r2 / 42.0));
    j1 = r / 3.0 * (1.0 - r2 / 10.0 * (1.0 - r2 / 28.0 * (1.0 - r2 / 54.0)));
  } else {
    j0 = std::sin(r) / r;
    j1 = (std::sin(r) / r - std::cos(r)) / r;
  }
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / f0 : j1 / f1;
  for (int l = 0; l <= lmax; ++l) {
    out[l] *= scale;
    if (r < l && std::abs(out[l]) < 1e-300)
      throw RangeError("spherical Bessel j underflows at " + pair_text(l, r));
  }
  return out;
}

double spherical_bessel_j(int l, double r) {
  return spherical_bessel_j_all(l, r)[l];
}

std::vector<double> spherical_bessel_y_all(int lmax, double r) {
  check_bessel_args(lmax, r);
  if (r == 0.0) throw DomainError("spherical Bessel y is singular at r = 0");
  std::vector<double> out(lmax + 1);
  out[0] = -std::cos(r) / r;
  if (lmax >= 1) out[1] = -std::cos(r) / (r * r) - std::sin(r) / r;
  for (int n = 1; n < lmax; ++n) {
    out[n + 1] = (2.0 * n + 1.0) / r * out[n] - out[n - 1];
    if (!std::isfinite(out[n + 1]) || std::abs(out[n + 1]) > 1e300)
      throw RangeError("spherical Bessel y overflows at " + pair_text(n + 1, r));
  }
  return out;
}

double spherical_bessel_y(int l, double r) {
  return spherical_bessel_y_all(l, r)[l];
}

double riccati_bessel_u(int l, double r) {
  return r * spherical_bessel_j(l, r);
}

double riccati_bessel_v(int l, double r) {
  return r * spherical_bessel_y(l, r);
}

std::vector<cplx> spherical_hankel_h_all(int lmax, double r) {
  const auto j = spherical_bessel_j_all(lmax, r);
  const auto y = spherical_bessel_y_all(lmax, r);
  std::vector<cplx> out(lmax + 1);
  cplx phase(0.0, 1.0);  // i^(l+1)
  for (int l = 0; l <= lmax; ++l) {
    out[l] = phase * cplx(j[l], y[l]);
    phase *= cplx(0.0, 1.0);
  }
  return out;
}

cplx spherical_hankel_h(int l, double r) {
  return spherical_hankel_h_all(l, r)[l];
}

cplx spherical_hankel_h_derivative(int l, double r) {
  const auto h = spherical_hankel_h_all(l, r);
  if (l == 0) return (cplx(0.0, 1.0) - 1.0 / r) * h[0];
  return cplx(0.0, 1.0) * h[l - 1] - (l + 1.0) / r * h[l];
}

std::vector<double> spherical_bessel_j_derivative_all(int lmax, double r) {
  if (r == 0.0) {
    std::vector<double> d(lmax + 1, 0.0);
    if (lmax >= 1) d[1] = 1.0 / 3.0;
    return d;
  }
  const auto j = spherical_bessel_j_all(lmax + 1, r);
  std::vector<double> d(lmax + 1);
  d[0] = -j[1];
  for (int l = 1; l <= lmax; ++l) d[l] = j[l - 1] - (l + 1.0) / r * j[l];
  return d;
}

std::vector<double> spherical_bessel_y_derivative_all(int lmax, double r) {
  const auto y = spherical_bessel_y_all(lmax + 1, r);
  std::vector<double> d(lmax + 1);
  d[0] = -y[1];
  for (int l = 1; l <= lmax; ++l) d[l] = y[l - 1] - (l + 1.0) / r * y[l];
  return d;
}

std::vector<double> legendre_p_all(int lmax, double x) {
  if (lmax < 0) throw RangeError("negative Legendre degree");
  std::vector<double> p(lmax + 1);
  p[0] = 1.0;
  if (lmax >= 1) p[1] = x;
  for (int n = 1; n < lmax; ++n)
    p[n + 1] = ((2.0 * n + 1.0) * x * p[n] - n * p[n - 1]) / (n + 1.0);
  return p;
}

double legendre_p(int l, double x) { return legendre_p_all(l, x)[l]; }

std::vector<double> normalized_legendre_all(int lmax, double x) {
  if (lmax < 0 || lmax > kMaxHarmonicDegree)
    throw RangeError("harmonic degree " + std::to_string(lmax) +
                     " outside [0, 60]");
  const double st = std::sqrt(std::max(0.0, 1.0 - x * x));
  std::vector<double> p(plm_index(lmax, lmax) + 1);
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st;
    p[plm_index(m, m)] = pmm;
    if (m + 1 <= lmax) p[plm_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= lmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                                 (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p[plm_index(l, m)] = a * (x * p[plm_index(l - 1, m)] - b * p[plm_index(l - 2, m)]);
    }
  }
  return p;
}

Vec3c ComplexAngle::direction() const {
  const cplx st = std::sin(theta);
  return Vec3c(st * std::cos(phi), st * std::sin(phi), std::cos(theta));
}

std::vector<cplx> spherical_harmonics_all(int lmax, const Vec3c& v) {
  if (lmax < 0 || lmax > kMaxHarmonicDegree)
    throw RangeError("harmonic degree " + std::to_string(lmax) +
                     " outside [0, 60]");
  // Y_lm = Q_l^m(v3) (v1 + i v2)^m for m >= 0, where Q is the polynomial
  // part of the orthonormal associated Legendre function.
  constexpr double kLogLimit = 690.0;  // ln(1e300)
  const cplx x = v(2);
  const cplx wp = v(0) + cplx(0.0, 1.0) * v(1);
  const cplx wm = v(0) - cplx(0.0, 1.0) * v(1);
  std::vector<cplx> out(lm_count(lmax));

  double qmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) qmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    // Powers of wp and wm as log-magnitude plus unit phase.
    const double log_wp = std::abs(wp) > 0.0 ? m * std::log(std::abs(wp)) : 0.0;
    const double log_wm = std::abs(wm) > 0.0 ? m * std::log(std::abs(wm)) : 0.0;
    const bool zero_wp = m > 0 && std::abs(wp) == 0.0;
    const bool zero_wm = m > 0 && std::abs(wm) == 0.0;
    const cplx ph_p = zero_wp ? 1.0 : std::pow(wp / std::abs(wp), m);
    const cplx ph_m = zero_wm ? 1.0 : std::pow(wm / std::abs(wm), m);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;

    cplx q_prev2 = 0.0, q_prev = 0.0, q = qmm;
    double lscale = 0.0;
    for (int l = m; l <= lmax; ++l) {
      if (l == m + 1) {
        q = std::sqrt(2.0 * m + 3.0) * x * q_prev;
      } else if (l >= m + 2) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - double(m) * m) /
                                   (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        q = a * (x * q_prev - b * q_prev2);
      }
      const double aq = std::abs(q);
      if (aq > 1e200) {
        q *= 1e-200;
        q_prev *= 1e-200;
        lscale += 200.0 * std::log(10.0);
      }
      const double mag_q = std::abs(q);
      auto assemble = [&](double logw, bool zero, cplx phase) -> cplx {
        if (zero || mag_q == 0.0) return 0.0;
        const double logmag = std::log(mag_q) + lscale + logw;
        if (logmag > kLogLimit)
          throw RangeError("spherical harmonic magnitude exceeds 1e300 at l=" +
                           std::to_string(l));
        return (q / mag_q) * phase * std::exp(logmag);
      };
      out[lm_index(l, m)] = assemble(log_wp, zero_wp, ph_p);
      if (m > 0) out[lm_index(l, -m)] = sign * assemble(log_wm, zero_wm, ph_m);
      q_prev2 = q_prev;
      q_prev = q;
    }
  }
  return out;
}

std::vector<cplx> spherical_harmonics_all(int lmax, const Vec3& v) {
  return spherical_harmonics_all(lmax, Vec3c(v.cast<cplx>()));
}

cplx spherical_harmonic(int l, int m, const Vec3c& v) {
  if (std::abs(m) > l) throw DomainError("|m| > l in spherical harmonic");
  return spherical_harmonics_all(l, v)[lm_index(l, m)];
}

cplx spherical_harmonic(int l, int m, const ComplexAngle& angle) {
  return spherical_harmonic(l, m, angle.direction());
}

cplx spherical_harmonic(int l, int m, const Vec3& v) {
  return spherical_harmonic(l, m, Vec3c(v.cast<cplx>()));
}

}  // namespace invscat
