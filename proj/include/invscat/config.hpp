#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "invscat/forward_solver.hpp"
#include "invscat/newton_sabatier.hpp"
#include "invscat/potential.hpp"
#include "invscat/ramm_exact.hpp"
#include "invscat/ramm_noisy.hpp"

namespace invscat {

// Units: k = 1, lengths in 1/k, potentials in k^2.
struct PotentialSpec {
  std::string kind = "gaussian_truncated";  // square_well | gaussian_truncated | piecewise_linear | table
  double v0 = -3.0;
  double width = 0.5;
  std::vector<std::pair<double, double>> knots;  // piecewise_linear
  std::vector<double> radii, values;             // table
  int grid_points = 2001;
};

RadialPotential build_potential(const PotentialSpec& spec, double support);

struct ExperimentConfig {
  ExactParams exact;  // geometry, L_nu and the exact solver
  int l_amp = 25;
  PotentialSpec potential;
  OdeOptions ode;

  std::vector<Vec3> xi{Vec3(0, 0, 0.5), Vec3(0, 0, 1), Vec3(0, 0, 2)};  // a bare number m in the file means m e3
  std::vector<double> theta{5, 10, 20, 40};

  NoisyParams noisy;  // noisy.exact is kept equal to exact
  std::vector<double> deltas{1e-2, 1e-4, 1e-6, 1e-8};
  std::vector<std::uint64_t> seeds{1, 2, 3};

  NSCoefficients ns_c{{0.5}};
  NSOptions ns;
  double ns_r_max = 50.0;
  double ns_step = 0.25;
  double ns_fit_from = 20.0;
  RegenerationOptions regen;
  int ns_naive_l_c = 6;  // naive c_l = (2/pi) delta_l fit of the configured potential

  std::vector<int> dn_L{10, 20, 30};
  int dn_f_lmax = 2;

  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = "out";

  void validate() const;
};

// Parses JSON text. Geometry a, a1, b are required; everything else has a
// default. Errors are ValidationError naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Pretty JSON with every field filled in; parse_config(config_to_json(c)) == c.
std::string config_to_json(const ExperimentConfig& cfg);
std::string default_config_json();

// FNV-1a 64 of the normalized configuration, as 16 hex digits. Thread count
// and output directory do not change results and are left out.
std::string config_hash(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace invscat
