#include <string>

#include "doctest.h"
#include "invscat/config.hpp"
#include "invscat/errors.hpp"

using namespace invscat;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("defaults round-trip") {
  const std::string text = default_config_json();
  const ExperimentConfig cfg = parse_config(text);
  CHECK(config_to_json(cfg) == text);
  CHECK(cfg.exact.a == 1.0);
  CHECK(cfg.exact.a1 == 1.2);
  CHECK(cfg.exact.b == 2.0);
  CHECK(cfg.exact.l_nu == 12);
  CHECK(cfg.l_amp == 25);
  CHECK(cfg.noisy.c_factor == 10.0);
  CHECK_FALSE(cfg.noisy.c_constraint.has_value());
  CHECK(config_hash(cfg) == config_hash(parse_config(text)));
  CHECK(config_hash(cfg).size() == 16);
}

TEST_CASE("minimal config fills defaults") {
  const ExperimentConfig cfg = parse_config(R"({"geometry": {"a": 0.25, "a1": 0.3, "b": 0.4},
      "exact": {"xi": [1.0, [0, 0.6, 0.8]]}})");
  CHECK(cfg.exact.a == 0.25);
  CHECK(cfg.noisy.exact.b == 0.4);
  REQUIRE(cfg.xi.size() == 2);
  CHECK(cfg.xi[0] == Vec3(0, 0, 1));
  CHECK(cfg.xi[1] == Vec3(0, 0.6, 0.8));
  CHECK(cfg.theta == std::vector<double>{5, 10, 20, 40});
}

TEST_CASE("validation errors name the field") {
  CHECK(contains(error_of(R"({"geometry": {"a": 1, "b": 2}})"), "geometry.a1"));
  CHECK(contains(error_of(R"({})"), "geometry"));
  CHECK(contains(error_of(R"({"geometry": {"a": 1, "a1": 0.9, "b": 2}})"), "geometry.a1"));
  CHECK(contains(error_of(R"({"geometry": {"a": 1, "a1": "x", "b": 2}})"), "geometry.a1"));
  CHECK(contains(error_of(R"({"geometry": {"a": 1, "a1": 1.2, "b": 2}, "exact": {"thetas": [5]}})"),
                 "exact.thetas"));
  CHECK(contains(error_of(R"({"geometry": {"a": 1, "a1": 1.2, "b": 2}, "truncations": {"L_dn": [41]}})"),
                 "L_dn"));
  CHECK(contains(error_of(R"({"geometry": {"a": 1, "a1": 1.2, "b": 2}, "noisy": {"delta": [0.5]}})"),
                 "noisy.delta"));
  CHECK(contains(error_of(R"({"geometry": {"a": 1, "a1": 1.2, "b": 2}, "potential": {"kind": "cubic"}})"),
                 "potential.kind"));
  CHECK(contains(error_of("{not json"), "JSON"));
}

TEST_CASE("potential kinds") {
  PotentialSpec s;
  s.kind = "square_well";
  s.v0 = -1.0;
  CHECK(build_potential(s, 1.0)(0.5) == doctest::Approx(-1.0));
  s.kind = "gaussian_truncated";
  s.v0 = 2.0;
  s.width = 0.5;
  CHECK(build_potential(s, 1.0)(0.5) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-6));
  s.kind = "piecewise_linear";
  s.knots = {{0.0, -1.0}, {1.0, 0.0}};
  CHECK(build_potential(s, 1.0)(0.5) == doctest::Approx(-0.5).epsilon(1e-6));
  s.kind = "table";
  s.radii = {0.25, 0.5, 0.75, 1.0};
  s.values = {1.0, 1.0, 1.0, 1.0};
  CHECK(build_potential(s, 1.0)(0.6) == doctest::Approx(1.0));
  CHECK(build_potential(s, 1.0)(1.5) == 0.0);
  s.values.pop_back();
  CHECK_THROWS_AS(build_potential(s, 1.0), ValidationError);
}

TEST_CASE("hash tracks content") {
  const std::string base = R"({"geometry": {"a": 1, "a1": 1.2, "b": 2}, "seed": 1})";
  const std::string other = R"({"geometry": {"a": 1, "a1": 1.2, "b": 2}, "seed": 2})";
  const std::string same = R"({"seed": 1, "geometry": {"b": 2.0, "a1": 1.2, "a": 1.0}})";
  CHECK(config_hash(parse_config(base)) != config_hash(parse_config(other)));
  CHECK(config_hash(parse_config(base)) == config_hash(parse_config(same)));
  const std::string threaded =
      R"({"geometry": {"a": 1, "a1": 1.2, "b": 2}, "seed": 1, "threads": 4, "output_dir": "x"})";
  CHECK(config_hash(parse_config(base)) == config_hash(parse_config(threaded)));
}
