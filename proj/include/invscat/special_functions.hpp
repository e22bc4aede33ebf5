#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace invscat {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Matrix<cplx, 3, 1>;

inline constexpr int kMaxBesselOrder = 200;
inline constexpr double kMaxBesselArgument = 1e3;
inline constexpr int kMaxHarmonicDegree = 60;

// Flat index of (l, m) in coefficient vectors, m = -l..l.
inline constexpr int lm_index(int l, int m) { return l * l + l + m; }
inline constexpr int lm_count(int lmax) { return (lmax + 1) * (lmax + 1); }

// Bilinear (non-Hermitian) dot product used on the complex variety.
inline cplx bilinear_dot(const Vec3c& u, const Vec3c& v) {
  return u(0) * v(0) + u(1) * v(1) + u(2) * v(2);
}

// j_0..j_lmax at r >= 0, Miller downward recurrence.
std::vector<double> spherical_bessel_j_all(int lmax, double r);
double spherical_bessel_j(int l, double r);

// y_0..y_lmax at r > 0, upward recurrence.
std::vector<double> spherical_bessel_y_all(int lmax, double r);
double spherical_bessel_y(int l, double r);

// u_l = r j_l and v_l = r y_l.
double riccati_bessel_u(int l, double r);
double riccati_bessel_v(int l, double r);

// h_l(r) = i^(l+1) (j_l(r) + i y_l(r)), so h_l(r) ~ e^{ir}/r as r grows.
std::vector<cplx> spherical_hankel_h_all(int lmax, double r);
cplx spherical_hankel_h(int l, double r);
cplx spherical_hankel_h_derivative(int l, double r);

// Derivatives from the recurrences j'_l = j_{l-1} - (l+1)/r j_l.
std::vector<double> spherical_bessel_j_derivative_all(int lmax, double r);
std::vector<double> spherical_bessel_y_derivative_all(int lmax, double r);

double legendre_p(int l, double x);
std::vector<double> legendre_p_all(int lmax, double x);

// Orthonormal associated Legendre functions with Condon-Shortley phase,
// P̄_l^m(x) for 0 <= m <= l <= lmax, stored at l(l+1)/2 + m.
// Y_lm(theta, phi) = P̄_l^m(cos theta) e^{i m phi}.
std::vector<double> normalized_legendre_all(int lmax, double x);
inline constexpr int plm_index(int l, int m) { return l * (l + 1) / 2 + m; }

struct ComplexAngle {
  cplx theta;
  cplx phi;
  // (sin t cos p, sin t sin p, cos t), satisfies v.v = 1 bilinearly.
  Vec3c direction() const;
};

// Y_lm evaluated as the harmonic polynomial in the components of v, which is
// the analytic continuation to complex directions including the points where
// sin(theta) vanishes.
cplx spherical_harmonic(int l, int m, const Vec3c& v);
cplx spherical_harmonic(int l, int m, const ComplexAngle& angle);
cplx spherical_harmonic(int l, int m, const Vec3& v);

// All Y_lm(v) for l <= lmax at lm_index(l, m).
std::vector<cplx> spherical_harmonics_all(int lmax, const Vec3c& v);
std::vector<cplx> spherical_harmonics_all(int lmax, const Vec3& v);

}  // namespace invscat
