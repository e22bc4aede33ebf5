#pragma once

#include <vector>

#include "invscat/forward_solver.hpp"
#include "invscat/potential.hpp"

namespace invscat {

// Finitely many real constants c_l of the Newton-Sabatier ansatz.
struct NSCoefficients {
  std::vector<double> c;

  int l_max() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const;
  double l1_norm() const;
};

struct NSOptions {
  int n_quad = 48;               // base node count, must be >= 16
  double nodes_per_unit = 3.0;   // extra nodes per unit of r
  double singular_threshold = 1e-10;
  int threads = 1;

  void validate() const;
  int nodes_for(double r) const;
};

// f(r, s) = sum c_l u_l(r) u_l(s).
double build_f(const NSCoefficients& c, double r, double s);

// One row K(r, .) of the kernel equation, discretized by Gauss-Legendre
// Nystrom on (0, r]. When the smallest singular value of I + F falls below
// the threshold the row is flagged and k, diag are left empty / NaN.
struct KernelRow {
  double r = 0.0;
  std::vector<double> s;
  std::vector<double> weights;
  std::vector<double> k;
  double diag = 0.0;
  double min_singular = 0.0;
  double residual = 0.0;
  bool solvable = false;
};

KernelRow solve_kernel_equation(const NSCoefficients& c, double r, const NSOptions& opt = {});

struct KernelSolution {
  std::vector<double> r_grid;
  std::vector<KernelRow> rows;
  std::vector<double> diag;
  std::vector<double> min_singular;
  std::vector<double> q_n;  // empty unless every row was solvable
  std::vector<double> flagged;

  bool solvable() const { return flagged.empty(); }
};

// Scan mode: solves every radius, records flags, never throws on singularity.
KernelSolution solve_kernel(const NSCoefficients& c, const std::vector<double>& r_grid,
                            const NSOptions& opt = {});

// q_N = -(2/r) d/dr (K(r,r)/r) by second-order finite differences.
std::vector<double> potential_from_diagonal(const std::vector<double>& r,
                                            const std::vector<double>& diag);

// Throws NonSolvableError listing the flagged radii.
std::vector<double> ns_potential(const NSCoefficients& c, const std::vector<double>& r_grid,
                                 const NSOptions& opt = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// -(r/2) int_0^r s q(s) ds on the grid, with the slope over its last third.
struct TraceGrowth {
  std::vector<double> r;
  std::vector<double> k_diag;
  double slope = 0.0;
};
TraceGrowth check_trace_identity(const RadialPotential& q, const std::vector<double>& r_grid);

struct DiagonalBound {
  std::vector<double> r;
  std::vector<double> diag;  // NaN at flagged radii
  std::vector<double> min_singular;
  std::vector<double> flagged;
  double sup = 0.0;
  double slope = 0.0;  // fitted over [fit_from, r_max]
};
DiagonalBound ns_diagonal_boundedness(const NSCoefficients& c, double r_max,
                                      const NSOptions& opt = {}, double step = 0.25,
                                      double fit_from = 20.0);

struct RegenerationOptions {
  double r_cut = 10.0;  // q_N is truncated here before the forward solve
  double step = 0.01;
  NSOptions ns;
};

struct Regeneration {
  PhaseShiftSet shifts;
  std::vector<double> discrepancy;  // |delta_l(q_N) - delta_l(reference)|
  double max_discrepancy = 0.0;
};

RadialPotential truncated_ns_potential(const NSCoefficients& c, const RegenerationOptions& opt);
Regeneration regenerate_and_compare(const NSCoefficients& c, const PhaseShiftSet& reference,
                                    const RegenerationOptions& opt = {});

}  // namespace invscat
