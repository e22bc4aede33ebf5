#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invscat/config.hpp"
#include "invscat/dn_map.hpp"
#include "invscat/newton_sabatier.hpp"
#include "invscat/ramm_exact.hpp"
#include "invscat/ramm_noisy.hpp"

namespace invscat {

struct Artifact {
  std::string name;  // file name relative to the output directory
  std::string content;
};

// Everything a subcommand produced. Task failures are collected, not thrown.
struct RunOutput {
  std::vector<Artifact> artifacts;
  std::vector<std::string> errors;
  std::vector<std::pair<std::string, double>> summary;
};

// Deterministic number formatting shared by every CSV writer.
std::string format_number(double v);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ForwardRun {
  RadialPotential q;
  PhaseShiftSet shifts;
  AmplitudeData amp;
};
ForwardRun run_forward_data(const ExperimentConfig& cfg);

struct ExactTask {
  Vec3 xi;
  double theta = 0.0;
  std::optional<InversionResult> result;
  std::string error;
};

struct ExactSweep {
  std::vector<ExactTask> tasks;
  std::vector<double> theta;          // sorted distinct magnitudes
  std::vector<double> max_abs_error;  // over xi, per theta
  std::vector<double> max_rel_error;
  std::vector<double> max_d_theta;    // max over xi of d(theta) |theta|
  double error_slope = 0.0;
  double d_theta_slope = 0.0;
  bool complete = false;  // every task succeeded
};
ExactSweep run_exact_sweep(const ExperimentConfig& cfg, const ForwardRun& data, int threads);

struct NoisyTask {
  Vec3 xi;
  double delta = 0.0;
  std::uint64_t seed = 0;
  double c_constraint = 0.0;
  std::optional<NoisyResult> result;
  double q_tilde = 0.0;
  double abs_error = 0.0;
  std::string error;
};

struct NoisySweep {
  std::vector<NoisyTask> tasks;
  std::vector<double> deltas;       // in configured order
  std::vector<double> mean_error;   // max over xi of the seed mean
  std::vector<double> mean_theta;   // mean selected |theta| over xi and seeds
  std::vector<double> mean_relative_error;
  std::vector<double> rate;         // (ln|ln d|)^2 / |ln d|
  bool complete = false;
};
NoisySweep run_noisy_sweep(const ExperimentConfig& cfg, const ForwardRun& data, int threads);

struct NSScan {
  DiagonalBound diagonal;
  std::vector<double> q_n;  // empty when a flagged radius prevents it
  TraceGrowth trace;
  double l_functional = 0.0;
  std::optional<Regeneration> self_regeneration;
  std::optional<Regeneration> naive_regeneration;
  std::vector<double> naive_c;
  std::vector<double> naive_flagged;
  std::vector<std::string> errors;
};
NSScan run_ns_scan(const ExperimentConfig& cfg, const ForwardRun& data, int threads);

struct DNRow {
  int L = 0;
  double cond = 0.0;
  int rank = 0;
  bool singular = false;
  double residual = 0.0;    // truncated SVD solve
  double sigma_norm = 0.0;
};
std::vector<DNRow> run_dn_conditioning(const ExperimentConfig& cfg, const ForwardRun& data);

std::string forward_csv(const ForwardRun& run, const std::string& hash);
std::string amplitude_csv(const ForwardRun& run, const std::string& hash, int n_angles = 181);
std::string exact_csv(const ExactSweep& sweep, const std::string& hash);
std::string noisy_csv(const NoisySweep& sweep, const std::string& hash);
std::string ns_csv(const NSScan& scan, const std::string& hash);
std::string trace_csv(const NSScan& scan, const std::string& hash);
std::string dn_csv(const std::vector<DNRow>& rows, const std::string& hash);

// Subcommand drivers: forward, invert-exact, invert-noisy, ns-scan, dn-cond.
RunOutput run_subcommand(const std::string& name, const ExperimentConfig& cfg, int threads);

}  // namespace invscat
