#include "invscat/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <thread>

#include "invscat/dn_map.hpp"
#include "invscat/errors.hpp"
#include "invscat/forward_solver.hpp"
#include "json.hpp"

namespace invscat {

using nlohmann::json;

namespace {

constexpr const char* kUnits = "k = 1; lengths in 1/k; potentials in k^2";

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ValidationError(path + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ValidationError(join(path, k) + ": unknown field");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ValidationError(path + ": expected an integer");
  return v.get<int>();
}

double number(const json& obj, const std::string& path, const char* key, double def) {
  const json* v = find(obj, key);
  return v ? as_number(*v, join(path, key)) : def;
}

double required(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) throw ValidationError(join(path, key) + ": missing required field");
  return as_number(*v, join(path, key));
}

int integer(const json& obj, const std::string& path, const char* key, int def) {
  const json* v = find(obj, key);
  return v ? as_int(*v, join(path, key)) : def;
}

bool boolean(const json& obj, const std::string& path, const char* key, bool def) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_boolean()) throw ValidationError(join(path, key) + ": expected true or false");
  return v->get<bool>();
}

std::vector<double> numbers(const json& obj, const std::string& path, const char* key,
                            std::vector<double> def) {
  const json* v = find(obj, key);
  if (!v) return def;
  const std::string p = join(path, key);
  if (!v->is_array()) throw ValidationError(p + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i)
    out.push_back(as_number((*v)[i], p + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> integers(const json& obj, const std::string& path, const char* key,
                          std::vector<int> def) {
  const json* v = find(obj, key);
  if (!v) return def;
  const std::string p = join(path, key);
  if (!v->is_array()) throw ValidationError(p + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v->size(); ++i)
    out.push_back(as_int((*v)[i], p + "[" + std::to_string(i) + "]"));
  return out;
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  const json* v = find(root, key);
  return v ? *v : empty;
}

std::vector<Vec3> parse_xi(const json& obj, const std::string& path, std::vector<Vec3> def) {
  const json* v = find(obj, "xi");
  if (!v) return def;
  const std::string p = join(path, "xi");
  if (!v->is_array()) throw ValidationError(p + ": expected an array");
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const json& e = (*v)[i];
    const std::string pi = p + "[" + std::to_string(i) + "]";
    if (e.is_number()) {
      out.emplace_back(0.0, 0.0, e.get<double>());
    } else if (e.is_array() && e.size() == 3) {
      out.emplace_back(as_number(e[0], pi), as_number(e[1], pi), as_number(e[2], pi));
    } else {
      throw ValidationError(pi + ": expected a magnitude or a 3-vector");
    }
  }
  return out;
}

PotentialSpec parse_potential(const json& obj) {
  const std::string path = "potential";
  only_keys(obj, path, {"kind", "v0", "width", "knots", "radii", "values", "grid_points"});
  PotentialSpec s;
  if (const json* k = find(obj, "kind")) {
    if (!k->is_string()) throw ValidationError("potential.kind: expected a string");
    s.kind = k->get<std::string>();
  }
  s.v0 = number(obj, path, "v0", s.v0);
  s.width = number(obj, path, "width", s.width);
  s.grid_points = integer(obj, path, "grid_points", s.grid_points);
  if (const json* kn = find(obj, "knots")) {
    if (!kn->is_array()) throw ValidationError("potential.knots: expected an array of [r, q]");
    for (std::size_t i = 0; i < kn->size(); ++i) {
      const json& e = (*kn)[i];
      const std::string pi = "potential.knots[" + std::to_string(i) + "]";
      if (!e.is_array() || e.size() != 2) throw ValidationError(pi + ": expected [r, q]");
      s.knots.emplace_back(as_number(e[0], pi), as_number(e[1], pi));
    }
  }
  s.radii = numbers(obj, path, "radii", {});
  s.values = numbers(obj, path, "values", {});
  return s;
}

json potential_json(const PotentialSpec& s) {
  json j;
  j["kind"] = s.kind;
  if (s.kind == "square_well" || s.kind == "gaussian_truncated") j["v0"] = s.v0;
  if (s.kind == "gaussian_truncated") j["width"] = s.width;
  if (s.kind == "piecewise_linear") {
    j["knots"] = json::array();
    for (const auto& [r, q] : s.knots) j["knots"].push_back({r, q});
  }
  if (s.kind == "table") {
    j["radii"] = s.radii;
    j["values"] = s.values;
  }
  if (s.kind != "table") j["grid_points"] = s.grid_points;
  return j;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["units"] = kUnits;
  j["geometry"] = {{"a", c.exact.a}, {"a1", c.exact.a1}, {"b", c.exact.b}};
  j["truncations"] = {{"L_nu", c.exact.l_nu}, {"L_amp", c.l_amp}, {"L_c", c.ns_naive_l_c},
                      {"L_dn", c.dn_L}};
  j["potential"] = potential_json(c.potential);
  j["forward"] = {{"rtol", c.ode.rtol}, {"start_fraction", c.ode.start_fraction}};
  json xi = json::array();
  for (const Vec3& v : c.xi) xi.push_back({v.x(), v.y(), v.z()});
  j["exact"] = {{"xi", xi},
                {"theta", c.theta},
                {"n_radial", c.exact.n_radial},
                {"polar_margin", c.exact.polar_margin},
                {"lambda_path", c.exact.lambda_path},
                {"acceptance_factor", c.exact.acceptance_factor},
                {"tsvd_rtol", c.exact.tsvd_rtol},
                {"force_dense", c.exact.force_dense}};
  std::vector<std::uint64_t> seeds = c.seeds;
  j["noisy"] = {{"delta", c.deltas},
                {"seeds", seeds},
                {"theta_max", c.noisy.theta_max},
                {"theta_scan_points", c.noisy.theta_scan_points},
                {"bisection_iterations", c.noisy.bisection_iterations},
                {"c_constraint", c.noisy.c_constraint ? json(*c.noisy.c_constraint) : json(nullptr)},
                {"c_factor", c.noisy.c_factor},
                {"reference_theta", c.noisy.reference_theta}};
  j["ns"] = {{"c", c.ns_c.c},
             {"r_max", c.ns_r_max},
             {"step", c.ns_step},
             {"fit_from", c.ns_fit_from},
             {"n_quad", c.ns.n_quad},
             {"nodes_per_unit", c.ns.nodes_per_unit},
             {"singular_threshold", c.ns.singular_threshold},
             {"r_cut", c.regen.r_cut},
             {"regen_step", c.regen.step}};
  j["dn"] = {{"f_lmax", c.dn_f_lmax}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig from_json(const json& root) {
  only_keys(root, "", {"units", "geometry", "truncations", "potential", "forward", "exact", "noisy", "ns",
                       "dn", "seed", "threads", "output_dir"});
  ExperimentConfig c;
  const json* geom = find(root, "geometry");
  if (!geom) throw ValidationError("geometry: missing required field");
  only_keys(*geom, "geometry", {"a", "a1", "b"});
  c.exact.a = required(*geom, "geometry", "a");
  c.exact.a1 = required(*geom, "geometry", "a1");
  c.exact.b = required(*geom, "geometry", "b");

  const json& tr = section(root, "truncations");
  only_keys(tr, "truncations", {"L_nu", "L_amp", "L_c", "L_dn"});
  c.exact.l_nu = integer(tr, "truncations", "L_nu", c.exact.l_nu);
  c.l_amp = integer(tr, "truncations", "L_amp", c.l_amp);
  c.ns_naive_l_c = integer(tr, "truncations", "L_c", c.ns_naive_l_c);
  c.dn_L = integers(tr, "truncations", "L_dn", c.dn_L);

  c.potential = parse_potential(section(root, "potential"));

  const json& fw = section(root, "forward");
  only_keys(fw, "forward", {"rtol", "start_fraction"});
  c.ode.rtol = number(fw, "forward", "rtol", c.ode.rtol);
  c.ode.start_fraction = number(fw, "forward", "start_fraction", c.ode.start_fraction);

  const json& ex = section(root, "exact");
  only_keys(ex, "exact", {"xi", "theta", "n_radial", "polar_margin", "lambda_path",
                          "acceptance_factor", "tsvd_rtol", "force_dense"});
  c.xi = parse_xi(ex, "exact", {Vec3(0, 0, 0.5), Vec3(0, 0, 1), Vec3(0, 0, 2)});
  c.theta = numbers(ex, "exact", "theta", {5, 10, 20, 40});
  c.exact.n_radial = integer(ex, "exact", "n_radial", c.exact.n_radial);
  c.exact.polar_margin = integer(ex, "exact", "polar_margin", c.exact.polar_margin);
  c.exact.lambda_path = numbers(ex, "exact", "lambda_path", c.exact.lambda_path);
  c.exact.acceptance_factor = number(ex, "exact", "acceptance_factor", c.exact.acceptance_factor);
  c.exact.tsvd_rtol = number(ex, "exact", "tsvd_rtol", c.exact.tsvd_rtol);
  c.exact.force_dense = boolean(ex, "exact", "force_dense", c.exact.force_dense);

  const json& no = section(root, "noisy");
  only_keys(no, "noisy", {"delta", "seeds", "theta_max", "theta_scan_points", "bisection_iterations",
                          "c_constraint", "c_factor", "reference_theta"});
  c.deltas = numbers(no, "noisy", "delta", c.deltas);
  if (const json* s = find(no, "seeds")) {
    if (!s->is_array()) throw ValidationError("noisy.seeds: expected an array of integers");
    c.seeds.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      if (!(*s)[i].is_number_unsigned())
        throw ValidationError("noisy.seeds[" + std::to_string(i) + "]: expected a non-negative integer");
      c.seeds.push_back((*s)[i].get<std::uint64_t>());
    }
  }
  c.noisy.theta_max = number(no, "noisy", "theta_max", c.noisy.theta_max);
  c.noisy.theta_scan_points = integer(no, "noisy", "theta_scan_points", c.noisy.theta_scan_points);
  c.noisy.bisection_iterations =
      integer(no, "noisy", "bisection_iterations", c.noisy.bisection_iterations);
  if (const json* v = find(no, "c_constraint")) c.noisy.c_constraint = as_number(*v, "noisy.c_constraint");
  c.noisy.c_factor = number(no, "noisy", "c_factor", c.noisy.c_factor);
  c.noisy.reference_theta = number(no, "noisy", "reference_theta", c.noisy.reference_theta);
  c.noisy.exact = c.exact;

  const json& ns = section(root, "ns");
  only_keys(ns, "ns", {"c", "r_max", "step", "fit_from", "n_quad", "nodes_per_unit",
                       "singular_threshold", "r_cut", "regen_step"});
  c.ns_c.c = numbers(ns, "ns", "c", c.ns_c.c);
  c.ns_r_max = number(ns, "ns", "r_max", c.ns_r_max);
  c.ns_step = number(ns, "ns", "step", c.ns_step);
  c.ns_fit_from = number(ns, "ns", "fit_from", c.ns_fit_from);
  c.ns.n_quad = integer(ns, "ns", "n_quad", c.ns.n_quad);
  c.ns.nodes_per_unit = number(ns, "ns", "nodes_per_unit", c.ns.nodes_per_unit);
  c.ns.singular_threshold = number(ns, "ns", "singular_threshold", c.ns.singular_threshold);
  c.regen.r_cut = number(ns, "ns", "r_cut", c.regen.r_cut);
  c.regen.step = number(ns, "ns", "regen_step", c.regen.step);

  const json& dn = section(root, "dn");
  only_keys(dn, "dn", {"f_lmax"});
  c.dn_f_lmax = integer(dn, "dn", "f_lmax", c.dn_f_lmax);

  if (const json* s = find(root, "seed")) {
    if (!s->is_number_unsigned()) throw ValidationError("seed: expected a non-negative integer");
    c.seed = s->get<std::uint64_t>();
  }
  c.threads = integer(root, "", "threads", c.threads);
  if (const json* o = find(root, "output_dir")) {
    if (!o->is_string()) throw ValidationError("output_dir: expected a string");
    c.output_dir = o->get<std::string>();
  }
  c.validate();
  return c;
}

}  // namespace

RadialPotential build_potential(const PotentialSpec& s, double support) {
  if (s.grid_points < 2) throw ValidationError("potential.grid_points must be at least 2");
  if (s.kind == "square_well") return make_square_well(s.v0, support, s.grid_points);
  if (s.kind == "gaussian_truncated") {
    if (!(s.width > 0.0)) throw ValidationError("potential.width must be positive");
    return make_truncated_gaussian(s.v0, s.width, support, s.grid_points);
  }
  if (s.kind == "piecewise_linear") {
    if (s.knots.size() < 2) throw ValidationError("potential.knots needs at least two points");
    return make_piecewise_linear(s.knots, support, s.grid_points);
  }
  if (s.kind == "table") {
    if (s.radii.empty() || s.radii.size() != s.values.size())
      throw ValidationError("potential.radii and potential.values must be non-empty and equal length");
    if (s.radii.back() > support)
      throw ValidationError("potential.radii must lie inside geometry.a");
    return RadialPotential(s.radii, s.values, support);
  }
  throw ValidationError("potential.kind: unknown kind '" + s.kind + "'");
}

void ExperimentConfig::validate() const {
  exact.validate();
  noisy.validate();
  if (l_amp < 0 || l_amp > kMaxPartialWave) throw ValidationError("truncations.L_amp must lie in [0, 60]");
  if (exact.l_nu > kMaxHarmonicDegree) throw ValidationError("truncations.L_nu must lie in [0, 60]");
  if (ns_naive_l_c < 0 || ns_naive_l_c > kMaxPartialWave)
    throw ValidationError("truncations.L_c must lie in [0, 60]");
  for (int L : dn_L)
    if (L < 0 || L > kMaxDnTruncation) throw ValidationError("truncations.L_dn entries must lie in [0, 40]");
  if (dn_f_lmax < 0 || dn_f_lmax > kMaxDnTruncation) throw ValidationError("dn.f_lmax must lie in [0, 40]");
  for (double t : theta)
    if (!(t >= 1.0)) throw ValidationError("exact.theta entries must be at least 1");
  for (double d : deltas)
    if (!(d > 0.0 && d < std::exp(-std::exp(1.0))))
      throw ValidationError("noisy.delta entries must lie in (0, exp(-e))");
  if (seeds.empty()) throw ValidationError("noisy.seeds must not be empty");
  ns.validate();
  if (!(ns_step > 0.0) || !(ns_r_max > ns_fit_from) || !(ns_fit_from > 0.0))
    throw ValidationError("ns.step, ns.fit_from, ns.r_max must satisfy 0 < fit_from < r_max, step > 0");
  if (!(regen.step > 0.0) || !(regen.r_cut > 2.0 * regen.step))
    throw ValidationError("ns.r_cut must exceed twice ns.regen_step");
  if (threads < 0) throw ValidationError("threads must be non-negative");
  if (!(ode.rtol > 0.0 && ode.rtol < 1e-3)) throw ValidationError("forward.rtol must lie in (0, 1e-3)");
  if (!(ode.start_fraction > 0.0 && ode.start_fraction < 0.1))
    throw ValidationError("forward.start_fraction must lie in (0, 0.1)");
  build_potential(potential, exact.a);
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string default_config_json() { return config_to_json(ExperimentConfig{}); }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  nlohmann::json j = to_json(cfg);
  j.erase("threads");
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

}  // namespace invscat
