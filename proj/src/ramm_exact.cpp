#include "invscat/ramm_exact.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "invscat/errors.hpp"
#include "invscat/forward_solver.hpp"
#include "invscat/parallel.hpp"

namespace invscat {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

cplx i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return 1.0;
    case 1: return kI;
    case 2: return -1.0;
    default: return -kI;
  }
}

int degree_of(int lm) { return static_cast<int>(std::sqrt(static_cast<double>(lm) + 0.5)); }

void assemble_decoupled(RhoBasis& basis, const AmplitudeData& amp, const ShellGrid& grid) {
  const ThetaPair& pair = basis.pair;
  const int L = basis.l_nu;
  const Eigen::Matrix3d rot = theta_frame(pair.theta);
  basis.frame = rot;
  basis.m_decoupled = true;
  const Vec3c thp = rot.cast<cplx>() * pair.theta_prime;
  const double s = pair.theta.imag().norm();
  const double p = pair.theta.real().norm();

  const int nr = static_cast<int>(grid.radial.nodes.size());
  const int nx = static_cast<int>(grid.polar.nodes.size());
  const int rows = nr * nx;
  if (rows < L + 1) throw ValidationError("shell grid too coarse for l_nu");

  std::vector<cplx> radial(nr * (L + 1));
  for (int i = 0; i < nr; ++i) {
    const double r = grid.radial.nodes[i];
    const auto j = spherical_bessel_j_all(L, r);
    const auto h = spherical_hankel_h_all(L, r);
    for (int l = 0; l <= L; ++l) {
      cplx v = i_pow(l) * j[l];
      if (l <= basis.l_data) v += amp.partial_wave()[l] * h[l];
      radial[i * (L + 1) + l] = 4.0 * kPi * v;
    }
  }
  std::vector<std::vector<double>> plm(nx);
  for (int k = 0; k < nx; ++k) plm[k] = normalized_legendre_all(L, grid.polar.nodes[k]);

  std::vector<double> sqw(rows), grow(rows), z(rows);
  double weight_total = 0.0;
  for (int i = 0; i < nr; ++i)
    for (int k = 0; k < nx; ++k) {
      const double r = grid.radial.nodes[i];
      const double x = grid.polar.nodes[k];
      const double w = 2.0 * kPi * grid.radial.weights[i] * r * r * grid.polar.weights[k];
      const int row = i * nx + k;
      sqw[row] = std::sqrt(w);
      grow[row] = std::exp(s * r * x);
      z[row] = p * r * std::sqrt(std::max(0.0, 1.0 - x * x));
      weight_total += w;
    }

  const auto yth = spherical_harmonics_all(L, thp);
  double covered = 0.0;
  basis.blocks.reserve(2 * L + 1);
  for (int m = -L; m <= L; ++m) {
    const int am = std::abs(m);
    const int ncol = L - am + 1;
    const double msign = (m < 0 && (am % 2 == 1)) ? -1.0 : 1.0;
    RhoBlock blk;
    blk.design.resize(rows, ncol);
    blk.target.resize(rows);
    blk.beta = Eigen::VectorXcd::Zero(ncol);
    for (int c = 0; c < ncol; ++c) {
      const int l = am + c;
      blk.columns.push_back(lm_index(l, m));
      if (l <= basis.l_data)
        blk.beta(c) = -16.0 * kPi * kPi * amp.partial_wave()[l] * yth[lm_index(l, m)];
    }
    const cplx im = i_pow(m);
    for (int i = 0; i < nr; ++i)
      for (int k = 0; k < nx; ++k) {
        const int row = i * nx + k;
        const double f = sqw[row] * grow[row] * msign;
        for (int c = 0; c < ncol; ++c) {
          const int l = am + c;
          blk.design(row, c) = f * radial[i * (L + 1) + l] * plm[k][plm_index(l, am)];
        }
        const double jm = std::cyl_bessel_j(static_cast<double>(am), z[row]) * msign;
        blk.target(row) = sqw[row] * im * jm;
      }
    covered += blk.target.squaredNorm();
    basis.blocks.push_back(std::move(blk));
  }
  basis.unresolved = std::max(0.0, weight_total - covered);
}

void assemble_dense(RhoBasis& basis, const AmplitudeData& amp, const ShellGrid& grid) {
  const ThetaPair& pair = basis.pair;
  const int L = basis.l_nu;
  const int ld = basis.l_data;
  const int lmax = std::max(L, ld);
  const Eigen::Matrix3d rot = theta_frame(pair.theta);
  basis.frame = Eigen::Matrix3d::Identity();
  basis.m_decoupled = false;

  const int ncol = lm_count(L);
  const int ndat = lm_count(ld);
  const int lamp = amp.l_max();
  Eigen::MatrixXcd tsub = Eigen::MatrixXcd::Zero(ndat, ncol);
  {
    const int rr = std::min(ndat, lm_count(lamp));
    const int cc = std::min(ncol, lm_count(lamp));
    tsub.topLeftCorner(rr, cc) = amp.coeffs().topLeftCorner(rr, cc);
  }

  const int nr = static_cast<int>(grid.radial.nodes.size());
  const int nx = static_cast<int>(grid.polar.nodes.size());
  const int np = grid.n_phi;
  const int rows = nr * nx * np;
  Eigen::MatrixXcd incoming(rows, ncol), outgoing(rows, ndat);
  Eigen::VectorXcd rowscale(rows);
  RhoBlock blk;
  blk.target.resize(rows);

  const double dphi = 2.0 * kPi / np;
  int row = 0;
  for (int i = 0; i < nr; ++i) {
    const double r = grid.radial.nodes[i];
    const auto j = spherical_bessel_j_all(L, r);
    const auto h = spherical_hankel_h_all(ld, r);
    for (int k = 0; k < nx; ++k) {
      const double x = grid.polar.nodes[k];
      const double st = std::sqrt(std::max(0.0, 1.0 - x * x));
      for (int q = 0; q < np; ++q, ++row) {
        const double phi = (q + 0.5) * dphi;
        const Vec3 xf(r * st * std::cos(phi), r * st * std::sin(phi), r * x);
        const Vec3 pos = rot.transpose() * xf;
        const auto y = spherical_harmonics_all(lmax, Vec3(pos / r));
        const double w = grid.radial.weights[i] * r * r * grid.polar.weights[k] * dphi;
        const cplx arg = -kI * bilinear_dot(pair.theta, pos.cast<cplx>());
        rowscale(row) = std::sqrt(w) * std::exp(arg);
        blk.target(row) = std::sqrt(w);
        for (int l = 0; l <= L; ++l)
          for (int m = -l; m <= l; ++m)
            incoming(row, lm_index(l, m)) = 4.0 * kPi * i_pow(l) * j[l] * y[lm_index(l, m)];
        for (int l = 0; l <= ld; ++l)
          for (int m = -l; m <= l; ++m)
            outgoing(row, lm_index(l, m)) = y[lm_index(l, m)] * h[l];
      }
    }
  }
  blk.design = rowscale.asDiagonal() * (incoming + outgoing * tsub);
  for (int c = 0; c < ncol; ++c) blk.columns.push_back(c);

  const auto yth = spherical_harmonics_all(ld, pair.theta_prime);
  Eigen::VectorXcd yv(ndat);
  for (int k = 0; k < ndat; ++k) yv(k) = yth[k];
  blk.beta = -4.0 * kPi * (yv.transpose() * tsub).transpose();
  basis.blocks.push_back(std::move(blk));
  basis.unresolved = 0.0;
}

}  // namespace

std::vector<double> ExactParams::default_lambda_path() {
  std::vector<double> path;
  for (int e = -2; e >= -30; --e) path.push_back(std::pow(10.0, e));
  path.push_back(0.0);
  return path;
}

void ExactParams::validate() const {
  if (!(a > 0.0)) throw ValidationError("geometry.a must be positive");
  if (!(a1 > a)) throw ValidationError("geometry.a1 must exceed geometry.a");
  if (!(b > a1)) throw ValidationError("geometry.b must exceed geometry.a1");
  if (l_nu < 0 || l_nu > kMaxHarmonicDegree)
    throw ValidationError("l_nu must lie in [0, 60]");
  if (n_radial < 1) throw ValidationError("n_radial must be positive");
  if (lambda_path.empty()) throw ValidationError("lambda_path must not be empty");
  for (double l : lambda_path)
    if (!(l >= 0.0)) throw ValidationError("lambda_path entries must be non-negative");
  if (!(acceptance_factor >= 1.0)) throw ValidationError("acceptance_factor must be >= 1");
}

ShellGrid shell_grid_for(const ExactParams& p, const ThetaPair& pair, int l_data) {
  const int L = std::max(p.l_nu, l_data);
  const double kappa = pair.kappa();
  const int n_polar = L + static_cast<int>(std::ceil(2.0 * kappa * p.b)) + p.polar_margin;
  const double re = pair.theta.real().norm();
  const int n_phi =
      2 * (p.l_nu + l_data + static_cast<int>(std::ceil(re * p.b))) + 16;
  return ShellGrid::build(p.a1, p.b, p.n_radial, n_polar, n_phi);
}

cplx NuCoefficients::operator()(const Vec3& alpha) const {
  const auto y = spherical_harmonics_all(l_max, Vec3(frame * alpha));
  cplx s = 0.0;
  for (int k = 0; k < c.size(); ++k) s += c(k) * y[k];
  return s;
}

RhoBasis assemble_rho_basis(const AmplitudeData& amp, const ThetaPair& pair,
                            const ShellGrid& grid, int l_nu, int n_data, bool force_dense) {
  if (l_nu < 0 || l_nu > kMaxHarmonicDegree)
    throw RangeError("l_nu " + std::to_string(l_nu) + " outside [0, 60]");
  RhoBasis basis;
  basis.pair = pair;
  basis.l_nu = l_nu;
  basis.l_data = n_data < 0 ? amp.l_max() : std::min(n_data, amp.l_max());
  basis.shell_volume = grid.volume();
  if (amp.isotropic() && !force_dense) assemble_decoupled(basis, amp, grid);
  else assemble_dense(basis, amp, grid);
  return basis;
}

RhoSolver::RhoSolver(const RhoBasis& basis, Penalty penalty, double tsvd_rtol)
    : basis_(&basis) {
  factors_.reserve(basis.blocks.size());
  for (const RhoBlock& blk : basis.blocks) {
    Factor f;
    const int ncol = static_cast<int>(blk.design.cols());
    f.columns = blk.columns;
    f.scale = Eigen::VectorXd::Ones(ncol);
    if (penalty == Penalty::Scaled)
      for (int c = 0; c < ncol; ++c) {
        const double nrm = blk.design.col(c).norm();
        f.scale(c) = nrm > 0.0 ? nrm : 1.0;
      }
    const Eigen::MatrixXcd scaled = blk.design * f.scale.cwiseInverse().asDiagonal();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(scaled);
    const Eigen::VectorXcd qt = qr.householderQ().adjoint() * blk.target;
    const int k = std::min<int>(ncol, static_cast<int>(scaled.rows()));
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(k, ncol);
    r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    f.sigma = svd.singularValues();
    f.v = svd.matrixV().leftCols(f.sigma.size());
    f.proj = svd.matrixU().adjoint() * qt.head(k);
    f.outside = qt.tail(qt.size() - k).squaredNorm();
    if (f.sigma.size() > 0) sigma_max_ = std::max(sigma_max_, f.sigma(0));
    factors_.push_back(std::move(f));
  }
  cutoff_ = tsvd_rtol * sigma_max_;
}

double RhoSolver::condition() const {
  double worst = 1.0;
  for (const Factor& f : factors_) {
    if (f.sigma.size() == 0) continue;
    const double lo = f.sigma(f.sigma.size() - 1);
    worst = std::max(worst, lo > 0.0 ? f.sigma(0) / lo : INFINITY);
  }
  return worst;
}

RhoSolution RhoSolver::solve(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be non-negative");
  RhoSolution sol;
  sol.lambda = lambda;
  sol.tsvd_cutoff = lambda == 0.0 ? cutoff_ : 0.0;
  sol.nu.l_max = basis_->l_nu;
  sol.nu.frame = basis_->frame;
  sol.nu.c = Eigen::VectorXcd::Zero(lm_count(basis_->l_nu));
  double res2 = basis_->unresolved;
  for (const Factor& f : factors_) {
    Eigen::VectorXcd y(f.sigma.size());
    for (int i = 0; i < f.sigma.size(); ++i) {
      const double s = f.sigma(i);
      double filt;
      if (lambda > 0.0) filt = s / (s * s + lambda);
      else filt = s > cutoff_ ? 1.0 / s : 0.0;
      y(i) = filt * f.proj(i);
      res2 += std::norm((1.0 - s * filt) * f.proj(i));
    }
    res2 += f.outside;
    const Eigen::VectorXcd c = f.scale.cwiseInverse().asDiagonal() * (f.v * y);
    for (std::size_t k = 0; k < f.columns.size(); ++k) sol.nu.c(f.columns[k]) = c(k);
  }
  sol.residual = std::sqrt(std::max(0.0, res2));
  return sol;
}

std::pair<double, double> RhoSolver::residual_and_norm(double lambda) const {
  const RhoSolution s = solve(lambda);
  return {s.residual, s.nu.norm()};
}

double RhoSolver::residual(double lambda) const {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be non-negative");
  double res2 = basis_->unresolved;
  for (const Factor& f : factors_) {
    for (int i = 0; i < f.sigma.size(); ++i) {
      const double s = f.sigma(i);
      const double keep = lambda > 0.0 ? lambda / (s * s + lambda) : (s > cutoff_ ? 0.0 : 1.0);
      res2 += std::norm(keep * f.proj(i));
    }
    res2 += f.outside;
  }
  return std::sqrt(std::max(0.0, res2));
}

RhoSolution minimize_rho(const RhoBasis& basis, double lambda, Penalty penalty,
                         double tsvd_rtol) {
  return RhoSolver(basis, penalty, tsvd_rtol).solve(lambda);
}

double normal_equation_residual(const RhoBasis& basis, const RhoSolution& sol,
                                Penalty penalty) {
  double num = 0.0, den = 0.0;
  for (const RhoBlock& blk : basis.blocks) {
    const int ncol = static_cast<int>(blk.design.cols());
    Eigen::VectorXcd c(ncol);
    for (int k = 0; k < ncol; ++k) c(k) = sol.nu.c(blk.columns[k]);
    Eigen::VectorXcd g = blk.design.adjoint() * (blk.design * c - blk.target);
    for (int k = 0; k < ncol; ++k) {
      const double d2 = penalty == Penalty::Scaled ? blk.design.col(k).squaredNorm() : 1.0;
      g(k) += sol.lambda * d2 * c(k);
    }
    num += g.squaredNorm();
    den += (blk.design.adjoint() * blk.target).squaredNorm();
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double rho_norm(const RhoBasis& basis, const NuCoefficients& nu) {
  double res2 = basis.unresolved;
  for (const RhoBlock& blk : basis.blocks) {
    Eigen::VectorXcd c(blk.design.cols());
    for (int k = 0; k < c.size(); ++k) c(k) = nu.c(blk.columns[k]);
    res2 += (blk.design * c - blk.target).squaredNorm();
  }
  return std::sqrt(res2);
}

PathSearch search_lambda_path(const RhoSolver& solver, const std::vector<double>& path,
                              double acceptance_factor) {
  PathSearch out;
  out.lambdas = path;
  out.d_estimate = INFINITY;
  for (double l : path) {
    out.residuals.push_back(solver.residual(l));
    out.d_estimate = std::min(out.d_estimate, out.residuals.back());
  }
  int best = -1;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (out.residuals[k] > acceptance_factor * out.d_estimate) continue;
    if (best < 0 || path[k] > path[best]) best = static_cast<int>(k);
  }
  out.chosen = solver.solve(path[best]);
  return out;
}

void check_residual_ratio(double residual, double d_estimate, double factor) {
  if (residual > factor * d_estimate * (1.0 + 1e-12))
    throw RejectedRunError("residual " + std::to_string(residual) + " exceeds " +
                               std::to_string(factor) + " times d = " + std::to_string(d_estimate),
                           d_estimate, residual);
}

QHatEstimate reconstruct_q_hat(const RhoBasis& basis, const NuCoefficients& nu) {
  QHatEstimate est{0.0, 0.0};
  const int ltop = std::min(basis.l_nu, basis.l_data);
  cplx top = 0.0;
  for (const RhoBlock& blk : basis.blocks)
    for (std::size_t k = 0; k < blk.columns.size(); ++k) {
      const cplx term = blk.beta(k) * nu.c(blk.columns[k]);
      est.value += term;
      if (degree_of(blk.columns[k]) == ltop) top += term;
    }
  est.tail = std::abs(top);
  return est;
}

InversionResult invert_exact_single(const AmplitudeData& amp, const ThetaPair& pair,
                                    const ExactParams& p, const RadialPotential* oracle) {
  p.validate();
  const ShellGrid grid = shell_grid_for(p, pair, amp.l_max());
  const RhoBasis basis = assemble_rho_basis(amp, pair, grid, p.l_nu, -1, p.force_dense);
  const RhoSolver solver(basis, Penalty::Scaled, p.tsvd_rtol);
  const PathSearch search = search_lambda_path(solver, p.lambda_path, p.acceptance_factor);

  InversionResult res;
  res.xi = pair.xi;
  res.theta_magnitude = pair.magnitude();
  res.d_estimate = search.d_estimate;
  res.residual = search.chosen.residual;
  res.lambda = search.chosen.lambda;
  res.residual_ratio = res.d_estimate > 0.0 ? res.residual / res.d_estimate : 1.0;
  res.nu_norm = search.chosen.nu.norm();
  res.condition = solver.condition();
  check_residual_ratio(res.residual, res.d_estimate, p.acceptance_factor);
  const QHatEstimate q = reconstruct_q_hat(basis, search.chosen.nu);
  res.q_hat = q.value;
  res.tail = q.tail;
  if (oracle) {
    res.q_tilde = fourier_transform_radial(*oracle, pair.xi.norm());
    res.abs_error = std::abs(res.q_hat - *res.q_tilde);
  }
  return res;
}

std::vector<InversionResult> invert_exact(const AmplitudeData& amp, const std::vector<Vec3>& xis,
                                          const std::vector<double>& theta_magnitudes,
                                          const ExactParams& p, const RadialPotential* oracle,
                                          int threads) {
  p.validate();
  const int nt = static_cast<int>(theta_magnitudes.size());
  const int n = static_cast<int>(xis.size()) * nt;
  std::vector<InversionResult> out(n);
  parallel_for(n, threads, [&](int k) {
    const ThetaPair pair = make_theta_pair(xis[k / nt], theta_magnitudes[k % nt]);
    out[k] = invert_exact_single(amp, pair, p, oracle);
  });
  return out;
}

}  // namespace invscat
