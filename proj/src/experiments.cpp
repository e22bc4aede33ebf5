#include "invscat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "invscat/errors.hpp"
#include "invscat/forward_solver.hpp"
#include "invscat/parallel.hpp"

namespace invscat {

namespace {

std::string header_line(const std::string& hash) {
  return std::string("# invscat ") + INVSCAT_VERSION + " config_hash=" + hash + "\n";
}

// Commas and newlines would break the CSV; error text is short anyway.
std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
  return s.empty() ? "ok" : s;
}

// splitmix64 finalizer, so neighbouring seeds give unrelated streams.
std::uint64_t task_seed(std::uint64_t base, std::uint64_t s) {
  std::uint64_t z = base * 0x9E3779B97F4A7C15ULL + s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / v.size();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly).slope;
}

ForwardRun run_forward_data(const ExperimentConfig& cfg) {
  ForwardRun run;
  run.q = build_potential(cfg.potential, cfg.exact.a);
  run.shifts = compute_phase_shifts(run.q, cfg.l_amp, cfg.ode);
  run.amp = amplitude_from_phase_shifts(run.shifts);
  return run;
}

ExactSweep run_exact_sweep(const ExperimentConfig& cfg, const ForwardRun& data, int threads) {
  cfg.exact.validate();
  ExactSweep sweep;
  for (const Vec3& xi : cfg.xi)
    for (double t : cfg.theta) sweep.tasks.push_back({xi, t, std::nullopt, ""});
  parallel_for(static_cast<int>(sweep.tasks.size()), threads, [&](int k) {
    ExactTask& task = sweep.tasks[k];
    try {
      const ThetaPair pair = make_theta_pair(task.xi, task.theta);
      task.result = invert_exact_single(data.amp, pair, cfg.exact, &data.q);
    } catch (const std::exception& e) {
      task.error = e.what();
    }
  });

  sweep.theta = cfg.theta;
  std::sort(sweep.theta.begin(), sweep.theta.end());
  sweep.theta.erase(std::unique(sweep.theta.begin(), sweep.theta.end()), sweep.theta.end());
  sweep.complete = true;
  for (double t : sweep.theta) {
    double abs_err = 0.0, rel_err = 0.0, d_theta = 0.0;
    for (const ExactTask& task : sweep.tasks) {
      if (task.theta != t) continue;
      if (!task.result) {
        sweep.complete = false;
        continue;
      }
      const InversionResult& r = *task.result;
      abs_err = std::max(abs_err, r.abs_error);
      rel_err = std::max(rel_err, r.abs_error / std::abs(*r.q_tilde));
      d_theta = std::max(d_theta, r.d_estimate * t);
    }
    sweep.max_abs_error.push_back(abs_err);
    sweep.max_rel_error.push_back(rel_err);
    sweep.max_d_theta.push_back(d_theta);
  }
  if (sweep.complete && sweep.theta.size() >= 2) {
    sweep.error_slope = loglog_slope(sweep.theta, sweep.max_abs_error);
    sweep.d_theta_slope = loglog_slope(sweep.theta, sweep.max_d_theta);
  }
  return sweep;
}

NoisySweep run_noisy_sweep(const ExperimentConfig& cfg, const ForwardRun& data, int threads) {
  NoisyParams p = cfg.noisy;
  p.exact = cfg.exact;
  p.validate();
  NoisySweep sweep;
  sweep.deltas = cfg.deltas;
  const double delta_ref = *std::max_element(cfg.deltas.begin(), cfg.deltas.end());

  // One constraint constant per xi, fixed across delta and seed.
  std::vector<double> c(cfg.xi.size(), 0.0);
  std::vector<std::string> c_error(cfg.xi.size());
  parallel_for(static_cast<int>(cfg.xi.size()), threads, [&](int i) {
    try {
      c[i] = p.c_constraint ? *p.c_constraint
                            : default_noisy_constraint(data.amp, cfg.xi[i], delta_ref, p);
    } catch (const std::exception& e) {
      c_error[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < cfg.xi.size(); ++i)
    for (double d : cfg.deltas)
      for (std::uint64_t s : cfg.seeds) {
        NoisyTask t;
        t.xi = cfg.xi[i];
        t.delta = d;
        t.seed = s;
        t.c_constraint = c[i];
        t.error = c_error[i];
        t.q_tilde = fourier_transform_radial(data.q, cfg.xi[i].norm());
        sweep.tasks.push_back(t);
      }
  parallel_for(static_cast<int>(sweep.tasks.size()), threads, [&](int k) {
    NoisyTask& t = sweep.tasks[k];
    if (!t.error.empty()) return;
    try {
      const AmplitudeData noisy = corrupt_amplitude(data.amp, t.delta, task_seed(cfg.seed, t.seed));
      t.result = solve_constrained(noisy, t.xi, t.delta, t.c_constraint, p);
      t.abs_error = std::abs(t.result->q_hat - t.q_tilde);
    } catch (const std::exception& e) {
      t.error = e.what();
    }
  });

  sweep.complete = true;
  for (double d : sweep.deltas) {
    double worst = 0.0, worst_rel = 0.0;
    std::vector<double> thetas;
    for (const Vec3& xi : cfg.xi) {
      std::vector<double> errs, rels;
      for (const NoisyTask& t : sweep.tasks) {
        if (t.delta != d || t.xi != xi) continue;
        if (!t.result) {
          sweep.complete = false;
          continue;
        }
        errs.push_back(t.abs_error);
        rels.push_back(t.abs_error / std::abs(t.q_tilde));
        thetas.push_back(t.result->theta_magnitude);
      }
      if (!errs.empty()) {
        worst = std::max(worst, mean(errs));
        worst_rel = std::max(worst_rel, mean(rels));
      }
    }
    sweep.mean_error.push_back(worst);
    sweep.mean_relative_error.push_back(worst_rel);
    sweep.mean_theta.push_back(mean(thetas));
    sweep.rate.push_back(noisy_error_rate(d));
  }
  return sweep;
}

NSScan run_ns_scan(const ExperimentConfig& cfg, const ForwardRun& data, int threads) {
  NSScan scan;
  NSOptions opt = cfg.ns;
  opt.threads = threads;
  scan.diagonal = ns_diagonal_boundedness(cfg.ns_c, cfg.ns_r_max, opt, cfg.ns_step, cfg.ns_fit_from);
  if (scan.diagonal.flagged.empty())
    scan.q_n = potential_from_diagonal(scan.diagonal.r, scan.diagonal.diag);
  scan.trace = check_trace_identity(data.q, scan.diagonal.r);
  scan.l_functional = l_functional(data.q);

  RegenerationOptions regen = cfg.regen;
  regen.ns = opt;
  const int l_c = cfg.ns_naive_l_c;
  try {
    RegenerationOptions fine = regen;
    fine.step = regen.step / 2;
    const PhaseShiftSet ref = compute_phase_shifts(truncated_ns_potential(cfg.ns_c, fine), l_c, cfg.ode);
    scan.self_regeneration = regenerate_and_compare(cfg.ns_c, ref, regen);
  } catch (const NonSolvableError& e) {
    scan.errors.push_back(std::string("self regeneration: ") + e.what());
  }

  // Naive fit c_l = (2/pi) delta_l of the configured potential.
  NSCoefficients naive;
  PhaseShiftSet ref;
  for (int l = 0; l <= l_c; ++l) {
    const double d = l < static_cast<int>(data.shifts.delta.size())
                         ? data.shifts.delta[l]
                         : 0.0;
    naive.c.push_back(2.0 / std::numbers::pi * d);
    ref.delta.push_back(d);
  }
  scan.naive_c = naive.c;
  try {
    scan.naive_regeneration = regenerate_and_compare(naive, ref, regen);
  } catch (const NonSolvableError& e) {
    scan.naive_flagged = e.radii;
    scan.errors.push_back(std::string("naive regeneration: ") + e.what());
  }
  return scan;
}

std::vector<DNRow> run_dn_conditioning(const ExperimentConfig& cfg, const ForwardRun& data) {
  int l_need = 0;
  for (int L : cfg.dn_L) l_need = std::max(l_need, L);
  AmplitudeData amp = data.amp;
  if (amp.l_max() < l_need)
    amp = amplitude_from_phase_shifts(compute_phase_shifts(data.q, l_need, cfg.ode));

  DirichletData f(cfg.exact.a, cfg.dn_f_lmax);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd;
  for (int i = 0; i < f.f.size(); ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    f.f(i) = cplx(re, im);
  }

  std::vector<DNRow> rows;
  for (int L : cfg.dn_L) {
    const SigmaSystem s = assemble_sigma_system(amp, f, L, SigmaSolve::TruncatedSvd);
    rows.push_back({L, s.cond, s.rank, s.singular, s.residual, s.sigma_norm});
  }
  return rows;
}

std::string forward_csv(const ForwardRun& run, const std::string& hash) {
  std::ostringstream o;
  o << header_line(hash) << "l,re_a,im_a,delta,tan_delta,jost_modulus\n";
  for (int l = 0; l <= run.shifts.l_max(); ++l) {
    const cplx a = run.shifts.partial_wave(l);
    o << l << ',' << format_number(a.real()) << ',' << format_number(a.imag()) << ','
      << format_number(run.shifts.delta[l]) << ',' << format_number(run.shifts.tan_delta[l]) << ','
      << format_number(run.shifts.jost_modulus[l]) << '\n';
  }
  return o.str();
}

std::string amplitude_csv(const ForwardRun& run, const std::string& hash, int n_angles) {
  std::ostringstream o;
  o << header_line(hash) << "angle,cos_angle,re_A,im_A\n";
  for (int k = 0; k < n_angles; ++k) {
    const double ang = std::numbers::pi * k / (n_angles - 1);
    const double c = std::cos(ang);
    const cplx A = amplitude_pointwise(run.amp.partial_wave(), c);
    o << format_number(ang) << ',' << format_number(c) << ',' << format_number(A.real()) << ','
      << format_number(A.imag()) << '\n';
  }
  return o.str();
}

std::string exact_csv(const ExactSweep& sweep, const std::string& hash) {
  std::ostringstream o;
  o << header_line(hash)
    << "xi_norm,xi_x,xi_y,xi_z,theta,re_q_hat,im_q_hat,q_tilde,abs_error,d_theta,lambda,"
       "residual_ratio,nu_norm,tail,condition,status\n";
  const std::string na = "nan";
  for (const ExactTask& t : sweep.tasks) {
    o << format_number(t.xi.norm()) << ',' << format_number(t.xi.x()) << ','
      << format_number(t.xi.y()) << ',' << format_number(t.xi.z()) << ',' << format_number(t.theta);
    if (t.result) {
      const InversionResult& r = *t.result;
      o << ',' << format_number(r.q_hat.real()) << ',' << format_number(r.q_hat.imag()) << ','
        << format_number(*r.q_tilde) << ',' << format_number(r.abs_error) << ','
        << format_number(r.d_estimate) << ',' << format_number(r.lambda) << ','
        << format_number(r.residual_ratio) << ',' << format_number(r.nu_norm) << ','
        << format_number(r.tail) << ',' << format_number(r.condition) << ",ok\n";
    } else {
      for (int k = 0; k < 10; ++k) o << ',' << na;
      o << ',' << sanitize(t.error) << '\n';
    }
  }
  for (std::size_t i = 0; i < sweep.theta.size(); ++i)
    o << "# theta=" << format_number(sweep.theta[i])
      << " max_abs_error=" << format_number(sweep.max_abs_error[i])
      << " max_rel_error=" << format_number(sweep.max_rel_error[i])
      << " max_d_theta=" << format_number(sweep.max_d_theta[i]) << '\n';
  o << "# slope error_vs_theta=" << (sweep.complete ? format_number(sweep.error_slope) : na)
    << " d_theta_vs_theta=" << (sweep.complete ? format_number(sweep.d_theta_slope) : na) << '\n';
  return o.str();
}

std::string noisy_csv(const NoisySweep& sweep, const std::string& hash) {
  std::ostringstream o;
  o << header_line(hash)
    << "xi_norm,delta,seed,n_trunc,mu,c_constraint,theta,re_q_hat,im_q_hat,q_tilde,abs_error,"
       "rate,slack,reached_cap,status\n";
  for (const NoisyTask& t : sweep.tasks) {
    o << format_number(t.xi.norm()) << ',' << format_number(t.delta) << ',' << t.seed;
    if (t.result) {
      const NoisyResult& r = *t.result;
      o << ',' << r.n_trunc << ',' << format_number(r.mu) << ',' << format_number(t.c_constraint)
        << ',' << format_number(r.theta_magnitude) << ',' << format_number(r.q_hat.real()) << ','
        << format_number(r.q_hat.imag()) << ',' << format_number(t.q_tilde) << ','
        << format_number(t.abs_error) << ',' << format_number(noisy_error_rate(t.delta)) << ','
        << format_number(r.slack) << ',' << (r.reached_cap ? 1 : 0) << ",ok\n";
    } else {
      for (int k = 0; k < 11; ++k) o << ",nan";
      o << ',' << sanitize(t.error) << '\n';
    }
  }
  for (std::size_t i = 0; i < sweep.deltas.size(); ++i)
    o << "# delta=" << format_number(sweep.deltas[i])
      << " mean_abs_error=" << format_number(sweep.mean_error[i])
      << " mean_rel_error=" << format_number(sweep.mean_relative_error[i])
      << " mean_theta=" << format_number(sweep.mean_theta[i])
      << " error_over_rate=" << format_number(sweep.mean_error[i] / sweep.rate[i]) << '\n';
  return o.str();
}

std::string ns_csv(const NSScan& scan, const std::string& hash) {
  std::ostringstream o;
  o << header_line(hash) << "r,K_rr,min_singular,q_N\n";
  const DiagonalBound& d = scan.diagonal;
  for (std::size_t i = 0; i < d.r.size(); ++i)
    o << format_number(d.r[i]) << ',' << format_number(d.diag[i]) << ','
      << format_number(d.min_singular[i]) << ','
      << (scan.q_n.empty() ? std::string("nan") : format_number(scan.q_n[i])) << '\n';
  o << "# sup_K_rr=" << format_number(d.sup) << " slope=" << format_number(d.slope)
    << " flagged=" << d.flagged.size() << '\n';
  if (scan.self_regeneration)
    o << "# self_regeneration_max_discrepancy=" << format_number(scan.self_regeneration->max_discrepancy)
      << '\n';
  if (scan.naive_regeneration)
    o << "# naive_regeneration_max_discrepancy="
      << format_number(scan.naive_regeneration->max_discrepancy) << '\n';
  for (double r : scan.naive_flagged) o << "# naive_fit_non_solvable_at_r=" << format_number(r) << '\n';
  return o.str();
}

std::string trace_csv(const NSScan& scan, const std::string& hash) {
  std::ostringstream o;
  o << header_line(hash) << "r,K_rr_trace\n";
  for (std::size_t i = 0; i < scan.trace.r.size(); ++i)
    o << format_number(scan.trace.r[i]) << ',' << format_number(scan.trace.k_diag[i]) << '\n';
  o << "# slope=" << format_number(scan.trace.slope)
    << " minus_half_L=" << format_number(-0.5 * scan.l_functional) << '\n';
  return o.str();
}

std::string dn_csv(const std::vector<DNRow>& rows, const std::string& hash) {
  std::ostringstream o;
  o << header_line(hash) << "L,cond,residual,sigma_norm,rank,singular\n";
  for (const DNRow& r : rows)
    o << r.L << ',' << format_number(r.cond) << ',' << format_number(r.residual) << ','
      << format_number(r.sigma_norm) << ',' << r.rank << ',' << (r.singular ? 1 : 0) << '\n';
  for (std::size_t i = 1; i < rows.size(); ++i)
    o << "# cond_growth L=" << rows[i - 1].L << "->" << rows[i].L << " factor="
      << format_number(rows[i].cond / rows[i - 1].cond) << '\n';
  return o.str();
}

RunOutput run_subcommand(const std::string& name, const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const std::string hash = config_hash(cfg);
  RunOutput out;
  const ForwardRun data = run_forward_data(cfg);
  if (name == "forward") {
    out.artifacts.push_back({"forward_phase_shifts.csv", forward_csv(data, hash)});
    out.artifacts.push_back({"forward_amplitude.csv", amplitude_csv(data, hash)});
    out.summary.push_back({"l_functional", l_functional(data.q)});
  } else if (name == "invert-exact") {
    const ExactSweep s = run_exact_sweep(cfg, data, threads);
    out.artifacts.push_back({"invert_exact.csv", exact_csv(s, hash)});
    for (const ExactTask& t : s.tasks)
      if (!t.result)
        out.errors.push_back("xi=" + format_number(t.xi.norm()) + " theta=" + format_number(t.theta) +
                             ": " + t.error);
    out.summary.push_back({"error_slope", s.error_slope});
    out.summary.push_back({"d_theta_slope", s.d_theta_slope});
  } else if (name == "invert-noisy") {
    const NoisySweep s = run_noisy_sweep(cfg, data, threads);
    out.artifacts.push_back({"invert_noisy.csv", noisy_csv(s, hash)});
    for (const NoisyTask& t : s.tasks)
      if (!t.result)
        out.errors.push_back("xi=" + format_number(t.xi.norm()) + " delta=" + format_number(t.delta) +
                             " seed=" + std::to_string(t.seed) + ": " + t.error);
    for (std::size_t i = 0; i < s.deltas.size(); ++i)
      out.summary.push_back({"mean_theta_delta_" + format_number(s.deltas[i]), s.mean_theta[i]});
  } else if (name == "ns-scan") {
    const NSScan s = run_ns_scan(cfg, data, threads);
    out.artifacts.push_back({"ns_scan.csv", ns_csv(s, hash)});
    out.artifacts.push_back({"ns_trace.csv", trace_csv(s, hash)});
    out.summary.push_back({"ns_diagonal_slope", s.diagonal.slope});
    out.summary.push_back({"trace_slope", s.trace.slope});
    // A non-solvable naive fit is a finding of the scan, not a failure.
  } else if (name == "dn-cond") {
    const auto rows = run_dn_conditioning(cfg, data);
    out.artifacts.push_back({"dn_cond.csv", dn_csv(rows, hash)});
    for (const DNRow& r : rows) out.summary.push_back({"cond_L" + std::to_string(r.L), r.cond});
  } else {
    throw ValidationError("unknown subcommand '" + name + "'");
  }
  return out;
}

}  // namespace invscat
