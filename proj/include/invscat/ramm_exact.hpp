#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "invscat/amplitude.hpp"
#include "invscat/potential.hpp"
#include "invscat/shell_grid.hpp"
#include "invscat/variety.hpp"

namespace invscat {

struct ExactParams {
  double a = 1.0;
  double a1 = 1.2;
  double b = 2.0;
  int l_nu = 12;
  int n_radial = 16;
  // Polar nodes: max(l_nu, L_data) + ceil(2 kappa b) + polar_margin.
  int polar_margin = 40;
  // Tikhonov weights in units of the column-scaled system; 0 means truncated SVD.
  std::vector<double> lambda_path = default_lambda_path();
  double acceptance_factor = 2.0;
  // Relative singular value cutoff of the truncated SVD endpoint.
  double tsvd_rtol = 1e-15;
  bool force_dense = false;

  static std::vector<double> default_lambda_path();
  void validate() const;
};

ShellGrid shell_grid_for(const ExactParams& p, const ThetaPair& pair, int l_data);

// Coefficients of nu(alpha) = sum c_lm Y_lm(frame * alpha).
struct NuCoefficients {
  int l_max = 0;
  Eigen::VectorXcd c;
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();

  double norm() const { return c.norm(); }  // a(nu), the L2 norm on S^2
  cplx operator()(const Vec3& alpha) const;
};

// Weighted least-squares pieces of ||rho||^2. Each block is independent:
// ||rho||^2 = sum ||design c_block - target||^2 + unresolved.
struct RhoBlock {
  Eigen::MatrixXcd design;
  Eigen::VectorXcd target;
  std::vector<int> columns;  // lm_index of each column
  Eigen::VectorXcd beta;     // q_hat = sum beta . c
};

struct RhoBasis {
  ThetaPair pair;
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
  int l_nu = 0;
  int l_data = 0;
  bool m_decoupled = false;
  std::vector<RhoBlock> blocks;
  double unresolved = 0.0;  // squared residual no coefficient can reach
  double shell_volume = 0.0;
};

// Builds the least-squares system for rho(x) = e^{-i theta.x} int u(x,a) nu(a) da - 1
// on the shell, using data with l <= n_data. A rotation invariant tensor
// decouples the azimuthal orders in a frame adapted to theta.
RhoBasis assemble_rho_basis(const AmplitudeData& amp, const ThetaPair& pair,
                            const ShellGrid& grid, int l_nu, int n_data = -1,
                            bool force_dense = false);

enum class Penalty {
  Scaled,  // lambda ||D c||^2 with D the column norms
  Plain,   // lambda ||c||^2
};

struct RhoSolution {
  NuCoefficients nu;
  double lambda = 0.0;
  double residual = 0.0;  // ||rho(nu)||
  double tsvd_cutoff = 0.0;
};

// Factorizes every block once; solves for any penalty weight afterwards.
class RhoSolver {
 public:
  RhoSolver(const RhoBasis& basis, Penalty penalty, double tsvd_rtol = 1e-15);

  RhoSolution solve(double lambda) const;
  double residual(double lambda) const;
  // (residual, ||c||) without forming c.
  std::pair<double, double> residual_and_norm(double lambda) const;
  double condition() const;
  double sigma_max() const { return sigma_max_; }

 private:
  struct Factor {
    Eigen::VectorXd scale;
    Eigen::VectorXd sigma;
    Eigen::MatrixXcd v;
    Eigen::VectorXcd proj;  // U^H target
    double outside = 0.0;   // part of the target orthogonal to range
    std::vector<int> columns;
  };
  const RhoBasis* basis_;
  std::vector<Factor> factors_;
  double sigma_max_ = 0.0;
  double cutoff_ = 0.0;
};

RhoSolution minimize_rho(const RhoBasis& basis, double lambda,
                         Penalty penalty = Penalty::Scaled, double tsvd_rtol = 1e-15);

// Residual of the normal equations of the penalized problem, relative to ||M^H T||.
double normal_equation_residual(const RhoBasis& basis, const RhoSolution& sol, Penalty penalty);

// Directly evaluated ||rho(nu)|| (no use of the factorization).
double rho_norm(const RhoBasis& basis, const NuCoefficients& nu);

struct PathSearch {
  std::vector<double> lambdas;
  std::vector<double> residuals;
  double d_estimate = 0.0;
  RhoSolution chosen;
};

// Scans the lambda path; d is the best residual seen and the chosen solution
// is the most regularized one within acceptance_factor of it.
PathSearch search_lambda_path(const RhoSolver& solver, const std::vector<double>& path,
                              double acceptance_factor);

// Throws RejectedRunError when residual > factor * d.
void check_residual_ratio(double residual, double d_estimate, double factor);

struct QHatEstimate {
  cplx value;
  double tail = 0.0;  // size of the last retained l-shell of the sum
};

// q_hat = -4 pi sum T[(l'm'),(lm)] Y_l'm'(theta') c_lm.
QHatEstimate reconstruct_q_hat(const RhoBasis& basis, const NuCoefficients& nu);

struct InversionResult {
  Vec3 xi;
  double theta_magnitude = 0.0;
  cplx q_hat;
  std::optional<double> q_tilde;
  double abs_error = 0.0;
  double d_estimate = 0.0;
  double residual = 0.0;
  double lambda = 0.0;
  double residual_ratio = 0.0;
  double nu_norm = 0.0;
  double tail = 0.0;
  double condition = 0.0;
};

// One (xi, |theta|) estimate; throws RejectedRunError when the chosen fit is
// more than acceptance_factor above the best residual on the path.
InversionResult invert_exact_single(const AmplitudeData& amp, const ThetaPair& pair,
                                    const ExactParams& p,
                                    const RadialPotential* oracle = nullptr);

std::vector<InversionResult> invert_exact(const AmplitudeData& amp, const std::vector<Vec3>& xis,
                                          const std::vector<double>& theta_magnitudes,
                                          const ExactParams& p,
                                          const RadialPotential* oracle = nullptr,
                                          int threads = 1);

}  // namespace invscat
