#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "invscat/amplitude.hpp"
#include "invscat/potential.hpp"
#include "invscat/special_functions.hpp"

namespace invscat {

inline constexpr int kMaxDnTruncation = 40;

// Dirichlet data on the sphere |x| = radius, f = sum f_lm Y_lm.
struct DirichletData {
  double radius = 1.0;
  Eigen::VectorXcd f;  // indexed by lm_index

  DirichletData() = default;
  DirichletData(double radius, int l_max);
  int l_max() const;
  cplx& at(int l, int m) { return f(lm_index(l, m)); }
  cplx at(int l, int m) const { return f(lm_index(l, m)); }
  // Coefficients padded with zeros or cut to degree l.
  Eigen::VectorXcd resized(int l) const;
};

// Radiating solution sum f_lm Y_lm(x/r) h_l(r)/h_l(a) for r >= a.
cplx exterior_solution(const DirichletData& f, double r, const Vec3& direction);

// Exterior normal derivative on the sphere: f_lm h'_l(a)/h_l(a).
Eigen::VectorXcd exterior_normal_derivative(const DirichletData& f);

// Free-space map on the sphere, j'_l(a)/j_l(a).
std::vector<double> free_dn_coefficients(int l_max, double radius);

// Modal map of a spherically symmetric potential supported in the ball,
// (phi_l/r)' / (phi_l/r) at r = radius from the regular solution.
std::vector<double> dn_coefficients_from_potential(const RadialPotential& q, int l_max,
                                                   double radius);

enum class SigmaSolve { None, Direct, TruncatedSvd };

// Dense system for the layer density sigma with rows (l, m) and columns
// (l', m'), both up to degree L:
//   a^2 (-1)^l [4 pi i^l j_l(a) delta + A[(l'm'), (lm)] h_l'(a)] sigma = 4 pi f_lm / h_l(a),
// where A[(l'm'), (lm)] = (-1)^(m+m') T[(l',-m'), (l,-m)] is the projection of
// the amplitude with the conjugate-linear second slot.
struct SigmaSystem {
  int L = 0;
  double radius = 0.0;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
  std::optional<Eigen::VectorXcd> sigma;
  Eigen::VectorXd singular_values;
  double cond = 0.0;
  double residual = 0.0;  // relative, when sigma is present
  double sigma_norm = 0.0;
  int rank = 0;
  bool singular = false;  // numerically rank deficient; Direct solve withheld
};

SigmaSystem assemble_sigma_system(const AmplitudeData& data, const DirichletData& f, int L,
                                  SigmaSolve solve = SigmaSolve::Direct, double tsvd_rtol = 1e-12);

// Interior normal derivative w_N^- + sigma, i.e. the DN map applied to f.
Eigen::VectorXcd dn_apply(const DirichletData& f, const SigmaSystem& sys);

}  // namespace invscat
