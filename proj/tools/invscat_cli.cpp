#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "invscat/config.hpp"
#include "invscat/errors.hpp"
#include "invscat/experiments.hpp"
#include "invscat/selftest.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace invscat;

namespace {

struct Options {
  std::string config;
  std::string out;
  int threads = -1;
  long long seed = -1;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

ExperimentConfig resolve_config(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? parse_config(default_config_json()) : load_config(o.config);
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.threads >= 0) cfg.threads = o.threads;
  if (!o.out.empty()) cfg.output_dir = o.out;
  cfg.validate();
  return cfg;
}

int worker_count(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::string& sub, const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = resolve_config(o);
  const int threads = worker_count(cfg);
  const std::string hash = config_hash(cfg);

  RunOutput out;
  if (sub == "selftest") {
    bool all = true;
    std::string report = "suite,passed,seconds,detail\n";
    for (const SelftestCheck& c : run_selftest(threads)) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  (" << c.detail << ", "
                << format_number(c.seconds) << " s)\n";
      report += c.name + "," + (c.passed ? "1" : "0") + "," + format_number(c.seconds) + "," +
                c.detail + "\n";
      if (!c.passed) out.errors.push_back(c.name + ": " + c.detail);
      all = all && c.passed;
    }
    out.artifacts.push_back({"selftest.csv", report});
  } else {
    out = run_subcommand(sub, cfg, threads);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["subcommand"] = sub;
  manifest["config_hash"] = hash;
  manifest["version"] = INVSCAT_VERSION;
  manifest["threads"] = threads;
  manifest["seed"] = cfg.seed;
  manifest["timings"] = {{"total_seconds", seconds}};
  manifest["artifacts"] = nlohmann::json::array();
  for (const Artifact& a : out.artifacts) {
    write_file(dir / a.name, a.content);
    manifest["artifacts"].push_back(a.name);
  }
  write_file(dir / "config.json", config_to_json(cfg));
  manifest["summary"] = nlohmann::json::object();
  for (const auto& [k, v] : out.summary) manifest["summary"][k] = v;
  manifest["errors"] = out.errors;
  write_file(dir / (sub + "_manifest.json"), manifest.dump(2) + "\n");

  for (const auto& [k, v] : out.summary) std::cout << k << " = " << format_number(v) << "\n";
  for (const std::string& e : out.errors) std::cerr << "task error: " << e << "\n";
  std::cout << "wrote " << out.artifacts.size() << " artifact(s) to " << dir.string()
            << " (config " << hash << ")\n";
  return out.errors.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-energy inverse scattering workbench"};
  app.require_subcommand(0, 1);
  bool dump = false;
  app.add_flag("--dump-defaults", dump, "Print the default configuration and exit");

  Options opt;
  const std::vector<std::pair<std::string, std::string>> subs{
      {"forward", "Phase shifts and amplitude of the configured potential"},
      {"invert-exact", "Exact-data reconstruction sweep over xi and |theta|"},
      {"invert-noisy", "Noisy-data reconstruction sweep over delta and seeds"},
      {"ns-scan", "Newton-Sabatier solvability and diagonal growth scan"},
      {"dn-cond", "Conditioning of the DN-map layer system versus truncation"},
      {"selftest", "Invariant suites"}};
  for (const auto& [name, help] : subs) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", opt.config, "JSON configuration file")->check(CLI::ExistingFile);
    s->add_option("--out", opt.out, "Output directory (overrides output_dir)");
    s->add_option("--threads", opt.threads, "Worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
    s->add_option("--seed", opt.seed, "Base random seed")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (dump) {
    std::cout << default_config_json();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return run(sub, opt);
  } catch (const ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
