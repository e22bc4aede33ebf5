#include "invscat/dn_map.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "invscat/errors.hpp"
#include "invscat/forward_solver.hpp"

namespace invscat {

namespace {

cplx i_pow(int l) {
  static const cplx table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return table[((l % 4) + 4) % 4];
}

void check_truncation(int L) {
  if (L < 0 || L > kMaxDnTruncation)
    throw RangeError("DN truncation " + std::to_string(L) + " outside [0, 40]");
}

}  // namespace

DirichletData::DirichletData(double radius, int l_max)
    : radius(radius), f(Eigen::VectorXcd::Zero(lm_count(l_max))) {
  if (!(radius > 0.0)) throw ValidationError("Dirichlet sphere radius must be positive");
  check_truncation(l_max);
}

int DirichletData::l_max() const {
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(f.size())))) - 1;
}

Eigen::VectorXcd DirichletData::resized(int l) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(lm_count(l));
  const int n = std::min<int>(out.size(), f.size());
  out.head(n) = f.head(n);
  return out;
}

cplx exterior_solution(const DirichletData& f, double r, const Vec3& direction) {
  if (!(r >= f.radius)) throw DomainError("exterior solution needs r >= a");
  const int lmax = f.l_max();
  const auto ha = spherical_hankel_h_all(lmax, f.radius);
  const auto hr = spherical_hankel_h_all(lmax, r);
  const auto y = spherical_harmonics_all(lmax, Vec3(direction.normalized()));
  cplx w = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    const cplx ratio = r == f.radius ? cplx(1.0) : hr[l] / ha[l];
    for (int m = -l; m <= l; ++m) w += f.at(l, m) * y[lm_index(l, m)] * ratio;
  }
  return w;
}

Eigen::VectorXcd exterior_normal_derivative(const DirichletData& f) {
  const int lmax = f.l_max();
  Eigen::VectorXcd out(f.f.size());
  for (int l = 0; l <= lmax; ++l) {
    const cplx ratio = spherical_hankel_h_derivative(l, f.radius) / spherical_hankel_h(l, f.radius);
    for (int m = -l; m <= l; ++m) out(lm_index(l, m)) = f.at(l, m) * ratio;
  }
  return out;
}

std::vector<double> free_dn_coefficients(int l_max, double radius) {
  const auto j = spherical_bessel_j_all(l_max, radius);
  const auto dj = spherical_bessel_j_derivative_all(l_max, radius);
  std::vector<double> out(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    if (j[l] == 0.0) throw DomainError("j_l vanishes on the sphere; free DN map undefined");
    out[l] = dj[l] / j[l];
  }
  return out;
}

std::vector<double> dn_coefficients_from_potential(const RadialPotential& q, int l_max,
                                                   double radius) {
  if (radius < q.support()) throw DomainError("DN sphere must enclose the potential support");
  std::vector<double> out(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    const auto sol = compute_regular_solution(q, l, {radius});
    out[l] = sol.derivative[0] / sol.value[0] - 1.0 / radius;
  }
  return out;
}

SigmaSystem assemble_sigma_system(const AmplitudeData& data, const DirichletData& f, int L,
                                  SigmaSolve solve, double tsvd_rtol) {
  check_truncation(L);
  const double a = f.radius;
  const int n = lm_count(L);
  const auto j = spherical_bessel_j_all(L, a);
  const auto h = spherical_hankel_h_all(L, a);
  const double four_pi = 4.0 * std::numbers::pi;

  SigmaSystem sys;
  sys.L = L;
  sys.radius = a;
  sys.matrix = Eigen::MatrixXcd::Zero(n, n);
  sys.rhs.resize(n);
  const Eigen::VectorXcd fl = f.resized(L);
  const int lt = std::min(L, data.l_max());

  for (int l = 0; l <= L; ++l) {
    const double row_scale = a * a * (l % 2 == 0 ? 1.0 : -1.0);
    for (int m = -l; m <= l; ++m) {
      const int row = lm_index(l, m);
      sys.rhs(row) = four_pi * fl(row) / h[l];
      sys.matrix(row, row) += row_scale * four_pi * i_pow(l) * j[l];
      if (l > lt) continue;
      for (int lp = 0; lp <= lt; ++lp)
        for (int mp = -lp; mp <= lp; ++mp) {
          const cplx t = data.coeff(lp, -mp, l, -m);
          if (t == 0.0) continue;
          const double sign = (m + mp) % 2 == 0 ? 1.0 : -1.0;
          sys.matrix(row, lm_index(lp, mp)) += row_scale * sign * t * h[lp];
        }
    }
  }

  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  sys.singular_values = svd.singularValues();
  const double smax = sys.singular_values(0);
  const double smin = sys.singular_values(n - 1);
  sys.cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  const double eps = std::numeric_limits<double>::epsilon();
  sys.rank = 0;
  for (int k = 0; k < n; ++k)
    if (sys.singular_values(k) > n * eps * smax) ++sys.rank;
  sys.singular = sys.rank < n;

  if (solve == SigmaSolve::None) return sys;
  if (solve == SigmaSolve::Direct && sys.singular) return sys;
  const double cut = solve == SigmaSolve::TruncatedSvd ? tsvd_rtol * smax : 0.0;
  Eigen::VectorXcd proj = svd.matrixU().adjoint() * sys.rhs;
  for (int k = 0; k < n; ++k) {
    const double s = sys.singular_values(k);
    proj(k) = s > cut && s > 0.0 ? proj(k) / s : cplx(0.0);
  }
  Eigen::VectorXcd sigma = svd.matrixV() * proj;
  const double rn = sys.rhs.norm();
  sys.residual = (sys.matrix * sigma - sys.rhs).norm() / (rn > 0.0 ? rn : 1.0);
  sys.sigma_norm = sigma.norm();
  sys.sigma = std::move(sigma);
  return sys;
}

Eigen::VectorXcd dn_apply(const DirichletData& f, const SigmaSystem& sys) {
  if (!sys.sigma) throw InfeasibleError("sigma system was not solved at L = " + std::to_string(sys.L));
  if (std::abs(f.radius - sys.radius) > 1e-14 * sys.radius)
    throw ValidationError("Dirichlet data and sigma system use different spheres");
  DirichletData padded = f;
  padded.f = f.resized(sys.L);
  return exterior_normal_derivative(padded) + *sys.sigma;
}

}  // namespace invscat
