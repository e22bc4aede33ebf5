#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "invscat/config.hpp"
#include "invscat/errors.hpp"
#include "invscat/experiments.hpp"

using namespace invscat;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg = parse_config(default_config_json());
  cfg.exact.a = 0.25;
  cfg.exact.a1 = 1.0;
  cfg.exact.b = 1.2;
  cfg.exact.l_nu = 8;
  cfg.potential.v0 = -4.0;
  cfg.potential.width = 0.125;
  cfg.l_amp = 12;
  cfg.xi = {Vec3(0, 0, 0.5), Vec3(0, 0, 1)};
  cfg.theta = {3.0, 5.0};
  cfg.deltas = {1e-2, 1e-4};
  cfg.seeds = {1, 2};
  cfg.noisy.theta_max = 12.0;
  cfg.noisy.theta_scan_points = 12;
  cfg.ns_r_max = 25.0;
  cfg.dn_L = {4, 8};
  return cfg;
}

std::string only_artifact(const RunOutput& out) {
  REQUIRE(out.artifacts.size() == 1);
  return out.artifacts[0].content;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1e-8) == "1e-08");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("log-log slope of a power law") {
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 1.5, 0.75, 0.375}) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("artifacts are byte-identical across thread counts") {
  const ExperimentConfig cfg = small_config();
  for (const std::string sub : {"invert-exact", "invert-noisy"}) {
    const RunOutput one = run_subcommand(sub, cfg, 1);
    const RunOutput two = run_subcommand(sub, cfg, 2);
    CHECK(one.errors.empty());
    CHECK(only_artifact(one) == only_artifact(two));
    CHECK(only_artifact(one).rfind("# invscat ", 0) == 0);
    CHECK(only_artifact(one).find(config_hash(cfg)) != std::string::npos);
  }
}

TEST_CASE("the base seed changes the noise and nothing else") {
  ExperimentConfig cfg = small_config();
  const std::string a = only_artifact(run_subcommand("invert-noisy", cfg, 1));
  cfg.seed = 7;
  const std::string b = only_artifact(run_subcommand("invert-noisy", cfg, 1));
  CHECK(a != b);
  CHECK(only_artifact(run_subcommand("invert-noisy", cfg, 1)) == b);
}

TEST_CASE("every subcommand produces its artifacts") {
  const ExperimentConfig cfg = small_config();
  CHECK(run_subcommand("forward", cfg, 1).artifacts.size() == 2);
  CHECK(run_subcommand("ns-scan", cfg, 1).artifacts.size() == 2);
  const RunOutput dn = run_subcommand("dn-cond", cfg, 1);
  REQUIRE(dn.summary.size() == 2);
  CHECK(dn.summary[1].second > 10.0 * dn.summary[0].second);
  CHECK_THROWS_AS(run_subcommand("nope", cfg, 1), ValidationError);
}

TEST_CASE("exact sweep summary") {
  const ExperimentConfig cfg = small_config();
  const ExactSweep s = run_exact_sweep(cfg, run_forward_data(cfg), 1);
  CHECK(s.complete);
  REQUIRE(s.theta.size() == 2);
  CHECK(s.theta[0] == 3.0);
  for (double e : s.max_rel_error) CHECK(e < 0.5);
  CHECK(std::isfinite(s.error_slope));
}
