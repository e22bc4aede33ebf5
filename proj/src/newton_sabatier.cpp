#include "invscat/newton_sabatier.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "invscat/errors.hpp"
#include "invscat/parallel.hpp"
#include "invscat/quadrature.hpp"
#include "invscat/special_functions.hpp"

namespace invscat {

bool NSCoefficients::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
}

double NSCoefficients::l1_norm() const {
  double s = 0.0;
  for (double v : c) s += std::abs(v);
  return s;
}

void NSOptions::validate() const {
  if (n_quad < 16) throw ValidationError("ns.n_quad must be at least 16");
  if (!(nodes_per_unit >= 0.0)) throw ValidationError("ns.nodes_per_unit must be non-negative");
  if (!(singular_threshold > 0.0)) throw ValidationError("ns.singular_threshold must be positive");
}

int NSOptions::nodes_for(double r) const {
  return n_quad + static_cast<int>(std::ceil(nodes_per_unit * r));
}

namespace {

// u_l(x) for l = 0..lmax.
std::vector<double> riccati_all(int lmax, double x) {
  std::vector<double> j = spherical_bessel_j_all(lmax, x);
  for (double& v : j) v *= x;
  return j;
}

}  // namespace

double build_f(const NSCoefficients& c, double r, double s) {
  if (c.c.empty()) return 0.0;
  const auto ur = riccati_all(c.l_max(), r);
  const auto us = riccati_all(c.l_max(), s);
  double f = 0.0;
  for (int l = 0; l <= c.l_max(); ++l) f += c.c[l] * ur[l] * us[l];
  return f;
}

KernelRow solve_kernel_equation(const NSCoefficients& c, double r, const NSOptions& opt) {
  opt.validate();
  if (!(r > 0.0)) throw DomainError("kernel equation needs r > 0");
  KernelRow row;
  row.r = r;
  const int n = opt.nodes_for(r);
  const QuadratureRule rule = gauss_legendre(n, 0.0, r);
  row.s = rule.nodes;
  row.weights = rule.weights;

  if (c.is_zero()) {
    row.k.assign(n, 0.0);
    row.min_singular = 1.0;
    row.solvable = true;
    return row;
  }

  const int nl = c.l_max() + 1;
  Eigen::MatrixXd u(n, nl);
  for (int j = 0; j < n; ++j) {
    const auto uj = riccati_all(c.l_max(), rule.nodes[j]);
    for (int l = 0; l < nl; ++l) u(j, l) = uj[l];
  }
  const auto ur = riccati_all(c.l_max(), r);
  Eigen::VectorXd cu(nl);
  for (int l = 0; l < nl; ++l) cu(l) = c.c[l] * ur[l];

  const Eigen::VectorXd cvec = Eigen::Map<const Eigen::VectorXd>(c.c.data(), nl);
  const Eigen::MatrixXd g = u * cvec.asDiagonal() * u.transpose();  // f(t_i, t_j)
  Eigen::VectorXd wt(n);
  for (int j = 0; j < n; ++j) wt(j) = rule.weights[j] / (rule.nodes[j] * rule.nodes[j]);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + g * wt.asDiagonal();
  const Eigen::VectorXd rhs = u * cu;  // f(r, t_i)

  const Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  row.min_singular = svd.singularValues()(n - 1);
  if (!(row.min_singular >= opt.singular_threshold)) {
    row.diag = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  const Eigen::VectorXd k = m.partialPivLu().solve(rhs);
  row.residual = (m * k - rhs).cwiseAbs().maxCoeff();
  row.k.assign(k.data(), k.data() + n);
  row.diag = cu.dot(Eigen::Map<const Eigen::VectorXd>(ur.data(), nl)) - rhs.cwiseProduct(wt).dot(k);
  row.solvable = true;
  return row;
}

KernelSolution solve_kernel(const NSCoefficients& c, const std::vector<double>& r_grid,
                            const NSOptions& opt) {
  opt.validate();
  KernelSolution sol;
  sol.r_grid = r_grid;
  sol.rows.resize(r_grid.size());
  parallel_for(static_cast<int>(r_grid.size()), opt.threads,
               [&](int i) { sol.rows[i] = solve_kernel_equation(c, r_grid[i], opt); });
  for (const auto& row : sol.rows) {
    sol.diag.push_back(row.diag);
    sol.min_singular.push_back(row.min_singular);
    if (!row.solvable) sol.flagged.push_back(row.r);
  }
  if (sol.solvable() && r_grid.size() >= 3) sol.q_n = potential_from_diagonal(r_grid, sol.diag);
  return sol;
}

std::vector<double> potential_from_diagonal(const std::vector<double>& r,
                                            const std::vector<double>& diag) {
  const std::size_t n = r.size();
  if (n < 3 || diag.size() != n) throw ValidationError("need at least three radii");
  std::vector<double> g(n), dg(n), q(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = diag[i] / r[i];
  auto weights = [](double h1, double h2) {
    return std::array<double, 3>{-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2),
                                 h1 / (h2 * (h1 + h2))};
  };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto w = weights(r[i] - r[i - 1], r[i + 1] - r[i]);
    dg[i] = w[0] * g[i - 1] + w[1] * g[i] + w[2] * g[i + 1];
  }
  {
    const double h1 = r[1] - r[0], h2 = r[2] - r[1];
    dg[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * g[0] + (h1 + h2) / (h1 * h2) * g[1] -
            h1 / (h2 * (h1 + h2)) * g[2];
  }
  {
    const double h1 = r[n - 2] - r[n - 3], h2 = r[n - 1] - r[n - 2];
    dg[n - 1] = h2 / (h1 * (h1 + h2)) * g[n - 3] - (h1 + h2) / (h1 * h2) * g[n - 2] +
                (2 * h2 + h1) / (h2 * (h1 + h2)) * g[n - 1];
  }
  for (std::size_t i = 0; i < n; ++i) q[i] = -2.0 / r[i] * dg[i];
  return q;
}

std::vector<double> ns_potential(const NSCoefficients& c, const std::vector<double>& r_grid,
                                 const NSOptions& opt) {
  KernelSolution sol = solve_kernel(c, r_grid, opt);
  if (!sol.solvable()) {
    std::ostringstream msg;
    msg << "kernel equation not solvable at r =";
    for (double r : sol.flagged) msg << ' ' << r;
    throw NonSolvableError(msg.str(), sol.flagged);
  }
  return sol.q_n;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ValidationError("line fit needs two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

TraceGrowth check_trace_identity(const RadialPotential& q, const std::vector<double>& r_grid) {
  if (r_grid.size() < 3) throw ValidationError("trace identity needs at least three radii");
  if (!std::is_sorted(r_grid.begin(), r_grid.end()) || !(r_grid.front() > 0.0))
    throw ValidationError("trace identity radii must be positive and increasing");
  const QuadratureRule unit = gauss_legendre(8, 0.0, 1.0);
  auto integrate = [&](double lo, double hi) {
    double s = 0.0;
    if (hi <= lo) return s;
    for (std::size_t k = 0; k < unit.nodes.size(); ++k) {
      const double x = lo + (hi - lo) * unit.nodes[k];
      s += (hi - lo) * unit.weights[k] * x * q(x);
    }
    return s;
  };
  // Breakpoints at the potential nodes keep the Gauss rule on smooth pieces.
  std::vector<double> knots = q.radii();
  knots.push_back(q.support());
  const double a = q.support();

  TraceGrowth out;
  out.r = r_grid;
  double acc = 0.0, prev = 0.0;
  std::size_t next_knot = 0;
  for (double r : r_grid) {
    const double stop = std::min(r, a);
    while (next_knot < knots.size() && knots[next_knot] <= stop) {
      acc += integrate(prev, knots[next_knot]);
      prev = knots[next_knot++];
    }
    acc += integrate(prev, stop);
    prev = std::max(prev, stop);
    out.k_diag.push_back(-0.5 * r * acc);
  }
  const std::size_t from = 2 * r_grid.size() / 3;
  out.slope = fit_line({r_grid.begin() + from, r_grid.end()},
                       {out.k_diag.begin() + from, out.k_diag.end()})
                  .slope;
  return out;
}

DiagonalBound ns_diagonal_boundedness(const NSCoefficients& c, double r_max, const NSOptions& opt,
                                      double step, double fit_from) {
  if (!(step > 0.0) || !(r_max > fit_from)) throw ValidationError("bad boundedness window");
  std::vector<double> grid;
  for (int k = 1; k * step <= r_max * (1 + 1e-12); ++k) grid.push_back(k * step);
  const KernelSolution sol = solve_kernel(c, grid, opt);
  DiagonalBound out;
  out.r = grid;
  out.diag = sol.diag;
  out.min_singular = sol.min_singular;
  out.flagged = sol.flagged;
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!sol.rows[i].solvable) continue;
    out.sup = std::max(out.sup, std::abs(sol.diag[i]));
    if (grid[i] >= fit_from) {
      fx.push_back(grid[i]);
      fy.push_back(sol.diag[i]);
    }
  }
  if (fx.size() >= 2) out.slope = fit_line(fx, fy).slope;
  return out;
}

RadialPotential truncated_ns_potential(const NSCoefficients& c, const RegenerationOptions& opt) {
  if (!(opt.step > 0.0) || !(opt.r_cut > 2 * opt.step))
    throw ValidationError("regeneration grid needs r_cut > 2 step");
  const int n = static_cast<int>(std::lround(opt.r_cut / opt.step));
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k) grid[k] = (k + 1) * opt.r_cut / n;
  std::vector<double> q = ns_potential(c, grid, opt.ns);
  return RadialPotential(grid, q, opt.r_cut);
}

Regeneration regenerate_and_compare(const NSCoefficients& c, const PhaseShiftSet& reference,
                                    const RegenerationOptions& opt) {
  const int l_max = static_cast<int>(reference.delta.size()) - 1;
  if (l_max < 0) throw ValidationError("reference phase shifts are empty");
  Regeneration out;
  out.shifts = compute_phase_shifts(truncated_ns_potential(c, opt), l_max);
  for (int l = 0; l <= l_max; ++l) {
    // Phase shifts are defined modulo pi.
    const double d = std::abs(std::remainder(out.shifts.delta[l] - reference.delta[l], M_PI));
    out.discrepancy.push_back(d);
    out.max_discrepancy = std::max(out.max_discrepancy, d);
  }
  return out;
}

}  // namespace invscat
