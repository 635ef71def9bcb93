#pragma once

// Experiment orchestration behind the chemlab CLI: condition checks,
// simulations with diagnostics output, parameter sweeps and the interpolation
// inequality experiment.

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "chemlab/conditions.hpp"
#include "chemlab/config.hpp"
#include "chemlab/model.hpp"
#include "chemlab/monitors.hpp"
#include "chemlab/solver.hpp"
#include "chemlab/svg.hpp"
#include "json.hpp"

namespace chemlab::harness {

/// Process exit codes. Every failure path is nonzero.
enum class ExitCode : int {
  Ok = 0,
  Usage = 1,               ///< bad command line or configuration
  Scope = 2,               ///< outside the theorem's hypotheses (n < 3)
  Blowup = 3,
  DtFloor = 4,
  Negativity = 5,
  BoundViolation = 6,      ///< an a-priori bound or inequality check failed
  VerificationFailed = 7,  ///< --verify-heat error above tolerance
  Filesystem = 8,
};

inline int to_int(ExitCode c) { return static_cast<int>(c); }

/// Grid, initial data and M for a configuration.
struct Resolved {
  Grid grid;
  InitialData initial;
  double measure = 0;
  double M = 0;
};

inline Resolved resolve(const config::ExperimentConfig& cfg) {
  Resolved r;
  r.grid = build_grid(cfg.domain, cfg.resolution);
  r.initial = make_initial_data(cfg.u0, cfg.v0, r.grid);
  r.measure = cfg.domain.measure();
  r.M = conditions::compute_M(r.initial.u0_mass, cfg.model.lambda, cfg.model.mu, r.measure);
  return r;
}

inline nlohmann::json to_json(const conditions::ConditionReport& r) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["gamma_class"] = conditions::to_string(r.gamma_class);
  j["M"] = num(r.M);
  j["K1"] = num(r.K1);
  j["K2"] = num(r.K2);
  j["C_GN"] = num(r.C_GN);
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["satisfied"] = r.satisfied ? nlohmann::json(*r.satisfied) : nlohmann::json(nullptr);
  j["regime"] = conditions::to_string(r.regime);
  j["comparison"] = r.comparison == conditions::Comparison::Strict ? "strict" : "non_strict";
  j["p"] = num(r.p_used);
  j["eta"] = num(r.eta_used);
  j["F"] = num(r.F);
  j["K"] = num(r.K);
  j["E"] = num(r.E);
  j["mu_bar"] = num(r.mu_bar);
  j["mass_bound"] = num(r.mass_bound);
  j["sigma_hat"] = num(r.sigma_hat);
  return j;
}

struct CheckResult {
  ExitCode code = ExitCode::Ok;
  std::optional<conditions::GammaClass> gamma_class;
  std::optional<conditions::ConditionReport> a2;
  std::optional<conditions::ConditionReport> remark;
  std::optional<conditions::SearchResult> search;
  std::string verdict;
  nlohmann::json json;
};

/// Classifies γ and, at the critical exponent, evaluates the critical
/// condition, the remark regimes and the (p, η) search.
inline CheckResult cmd_check(const config::ExperimentConfig& cfg, std::ostream& out, bool as_json = false) {
  CheckResult res;
  const auto& m = cfg.model;
  if (m.n < 3) {
    res.code = ExitCode::Scope;
    res.verdict = "scope error: the boundedness theorem assumes n >= 3 (got n = " + std::to_string(m.n) + ")";
    res.json = {{"error", res.verdict}};
    out << (as_json ? res.json.dump(2) : res.verdict) << "\n";
    return res;
  }
  const Resolved rv = resolve(cfg);
  const auto gc = conditions::gamma_class(m.gamma, m.n);
  res.gamma_class = gc;
  std::ostringstream t;
  t << std::setprecision(10);
  t << "gamma = " << m.gamma << ", n = " << m.n << ", critical 2n/(n+1) = " << conditions::critical_gamma(m.n)
    << ", class: " << conditions::to_string(gc) << "\n";
  t << "u0 mass = " << rv.initial.u0_mass << ", |v0|_inf = " << rv.initial.v0_sup << ", |Omega| = " << rv.measure
    << ", M = " << rv.M << "\n";
  res.json["gamma"] = m.gamma;
  res.json["n"] = m.n;
  res.json["gamma_class"] = conditions::to_string(gc);
  res.json["u0_mass"] = rv.initial.u0_mass;
  res.json["v0_sup"] = rv.initial.v0_sup;
  res.json["measure"] = rv.measure;
  res.json["M"] = rv.M;

  if (gc == conditions::GammaClass::StrictRange) {
    res.verdict = "(A1): covered";
  } else if (gc == conditions::GammaClass::Uncovered) {
    res.verdict = "uncovered: theorem silent";
  } else {
    res.a2 = conditions::condition_a2(m, rv.initial.v0_sup, rv.M, cfg.C_GN);
    res.remark = conditions::remark_regimes(m, rv.initial.v0_sup, rv.initial.u0_mass, rv.measure, cfg.C_GN);
    res.search = conditions::search_p_eta(m, rv.initial.v0_sup, rv.M, cfg.C_GN, cfg.search);
    const auto& a = *res.a2;
    res.verdict = std::string("(A2): ") + (*a.satisfied ? "satisfied" : "not satisfied");
    t << "critical condition (strict >, conditional on C = " << cfg.C_GN << "):\n"
      << "  K1(n/2,n) = " << a.K1 << "\n  K2(n/2,n,0) = " << a.K2 << "\n  F = " << a.F << "\n  K = " << a.K
      << "\n  lhs = " << a.lhs << "\n  rhs = " << a.rhs << "\n";
    const auto& rr = *res.remark;
    t << "remark regime: " << conditions::to_string(rr.regime) << " (mu_bar = " << rr.mu_bar << ", E = " << rr.E;
    if (std::isfinite(rr.mass_bound)) t << ", mass bound = " << rr.mass_bound;
    t << "; lhs = " << rr.lhs << ", rhs = " << rr.rhs << ", " << (*rr.satisfied ? "satisfied" : "not satisfied")
      << ")\n";
    if (res.search) {
      const auto& s = *res.search;
      t << "(p, eta) search: p = " << s.p << ", eta = " << s.eta << " (K1 = " << s.report.K1 << ", K2 = "
        << s.report.K2 << ", lhs = " << s.report.lhs << " >= rhs = " << s.report.rhs << ")\n";
    } else {
      t << "(p, eta) search: no feasible pair on the grid\n";
    }
    res.json["a2"] = to_json(a);
    res.json["remark"] = to_json(rr);
    res.json["search"] = res.search ? nlohmann::json{{"p", res.search->p},
                                                      {"eta", res.search->eta},
                                                      {"report", to_json(res.search->report)}}
                                    : nlohmann::json(nullptr);
  }
  res.json["verdict"] = res.verdict;
  t << res.verdict << "\n";
  out << (as_json ? res.json.dump(2) + "\n" : t.str());
  return res;
}

struct SimulateOptions {
  bool verify_heat = false;
};

struct SimulateOutcome {
  ExitCode code = ExitCode::Ok;
  SimulationResult result;
  monitors::TrajectoryReport trajectory;
  std::optional<double> heat_error;
  std::string message;
};

/// b + a·e^{−π²t/L²}cos(πx/L): the Neumann heat solution from a cosine bump on [0, L].
inline double heat_exact(const CosineBump& bump, double x, double length, double t) {
  const double k = std::numbers::pi / length;
  return bump.baseline + bump.amplitude * std::exp(-k * k * t) * std::cos(k * x);
}

inline std::string final_state_csv(const FieldState& s, const Grid& g) {
  std::ostringstream o;
  o << "index";
  if (g.radial())
    o << ",r";
  else
    for (std::size_t a = 0; a < g.axes(); ++a) o << ',' << "xyz"[a];
  o << ",u,v\n";
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const auto x = g.center(i);
    o << i;
    for (std::size_t a = 0; a < g.axes(); ++a) o << ',' << monitors::format_number(x[a]);
    o << ',' << monitors::format_number(s.u[i]) << ',' << monitors::format_number(s.v[i]) << '\n';
  }
  return o.str();
}

inline std::string diagnostics_csv(const std::vector<monitors::DiagnosticsRecord>& d) {
  std::string s = monitors::csv_header() + "\n";
  for (const auto& r : d) s += monitors::csv_row(r) + "\n";
  return s;
}

namespace detail {
inline bool write_file(const std::filesystem::path& path, const std::string& content, std::string& err) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    err = "cannot open " + path.string() + " for writing";
    return false;
  }
  f << content;
  if (!f) {
    err = "write failed for " + path.string();
    return false;
  }
  return true;
}
}  // namespace detail

/// Runs the configured simulation, writes diagnostics.csv, final_state.csv and
/// optionally plot.svg into the output directory.
///
/// With verify_heat the coupling and source coefficients are zeroed (pure heat
/// flow); the domain must be an interval and u0 a cosine bump, and the final u
/// is compared against the exact solution (tolerance 5e-4).
inline SimulateOutcome cmd_simulate(const config::ExperimentConfig& cfg, const SimulateOptions& opt, std::ostream& log) {
  SimulateOutcome out;
  const Resolved rv = resolve(cfg);
  ModelParams params = cfg.model;
  double M = rv.M;
  if (opt.verify_heat) {
    if (cfg.domain.kind != DomainKind::Interval || !std::holds_alternative<CosineBump>(cfg.u0)) {
      out.code = ExitCode::Usage;
      out.message = "--verify-heat needs domain.kind = interval and initial.u.kind = cosine";
      log << out.message << "\n";
      return out;
    }
    params.chi = params.lambda = params.mu = params.c = 0.0;
    M = rv.initial.u0_mass;
  }

  const FieldState init = evaluate_initial(rv.initial, rv.grid);
  out.result = simulate(init, params, rv.grid, cfg.solver, {cfg.monitor_p, M, rv.initial.v0_sup, true});
  const auto& fin = out.result.final;
  log << "status: " << to_string(fin.status) << " at t = " << fin.state.t << " after " << out.result.steps
      << " steps\n";

  std::error_code ec;
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    out.code = ExitCode::Filesystem;
    out.message = "cannot create output directory " + dir.string() + ": " + ec.message();
    log << out.message << "\n";
    return out;
  }
  std::string err;
  if (!detail::write_file(dir / "diagnostics.csv", diagnostics_csv(out.result.diagnostics), err) ||
      !detail::write_file(dir / "final_state.csv", final_state_csv(fin.state, rv.grid), err)) {
    out.code = ExitCode::Filesystem;
    out.message = err;
    log << err << "\n";
    return out;
  }
  if (cfg.emit_svg) {
    std::vector<double> t;
    svg::Series mass{"mass", {}}, lu{"linf_u", {}}, lv{"linf_v", {}}, phi{"phi", {}};
    for (const auto& r : out.result.diagnostics) {
      t.push_back(r.t);
      mass.y.push_back(r.mass);
      lu.y.push_back(r.linf_u);
      lv.y.push_back(r.linf_v);
      phi.y.push_back(r.phi);
    }
    if (!detail::write_file(dir / "plot.svg", svg::line_chart(t, {mass, lu, lv, phi}, cfg.svg_log_scale), err)) {
      out.code = ExitCode::Filesystem;
      out.message = err;
      log << err << "\n";
      return out;
    }
  }

  switch (fin.status) {
    case StepStatus::BlowupDetected: out.code = ExitCode::Blowup; return out;
    case StepStatus::DtFloorHit: out.code = ExitCode::DtFloor; return out;
    case StepStatus::NegativityFault: out.code = ExitCode::Negativity; return out;
    case StepStatus::Ok: break;
  }

  if (opt.verify_heat) {
    const auto& bump = std::get<CosineBump>(cfg.u0);
    double err_max = 0.0;
    for (std::size_t i = 0; i < fin.state.u.size(); ++i) {
      const double x = rv.grid.center(i)[0];
      err_max = std::max(err_max, std::abs(fin.state.u[i] - heat_exact(bump, x, cfg.domain.extents[0], fin.state.t)));
    }
    out.heat_error = err_max;
    log << "heat verification: max error " << err_max << " (tolerance 5e-4)\n";
    if (!(err_max <= 5e-4)) {
      out.code = ExitCode::VerificationFailed;
      return out;
    }
  }

  if (!out.result.diagnostics.empty()) {
    out.trajectory = monitors::verify_trajectory_bounds(out.result.diagnostics, M, rv.initial.v0_sup);
    log << out.trajectory.summary();
    if (out.trajectory.ok()) log << "\n";
    log << "sup phi = " << out.trajectory.sup_phi
        << (out.trajectory.phi_sup_in_first_half ? " (attained in the first half of the run)"
                                                 : " (attained in the second half of the run)")
        << "\n";
    if (!out.trajectory.ok()) out.code = ExitCode::BoundViolation;
  }
  return out;
}

struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

/// Parses "key=start:stop:count" into count evenly spaced values.
inline SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ValidationError("axis must look like key=start:stop:count, got '" + spec + "'");
  SweepAxis axis;
  axis.key = spec.substr(0, eq);
  if (!config::is_numeric_scalar_key(axis.key))
    throw ValidationError("cannot sweep '" + axis.key + "': not a numeric condition key");
  std::vector<std::string> parts;
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw ValidationError("axis range must be start:stop:count, got '" + spec + "'");
  auto num = [&](const std::string& s) { return config::detail::to_number(axis.key, config::Entry{s, 0}); };
  const double a = num(parts[0]), b = num(parts[1]), c = num(parts[2]);
  if (c != std::floor(c) || c < 1) throw ValidationError("axis '" + axis.key + "' has an empty value list");
  const auto count = static_cast<std::size_t>(c);
  for (std::size_t i = 0; i < count; ++i)
    axis.values.push_back(count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  return axis;
}

struct SweepRow {
  std::vector<double> values;
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  std::optional<bool> satisfied;
  conditions::Regime regime = conditions::Regime::NotApplicable;
};

namespace detail {
inline std::string format_config_value(double x) {
  std::ostringstream o;
  o << std::setprecision(17) << x;
  return o.str();
}

inline SweepRow sweep_point(const config::Document& base, const std::vector<SweepAxis>& axes,
                            const std::vector<double>& values) {
  config::Document doc = base;
  for (std::size_t a = 0; a < axes.size(); ++a) doc.set(axes[a].key, format_config_value(values[a]));
  const auto cfg = config::interpret(doc);
  const auto& m = cfg.model;
  SweepRow row;
  row.values = values;
  if (m.n < 3) throw ScopeError("the boundedness theorem requires n >= 3");
  const auto gc = conditions::gamma_class(m.gamma, m.n);
  if (gc == conditions::GammaClass::StrictRange) {
    row.satisfied = true;
  } else if (gc == conditions::GammaClass::Critical) {
    const Resolved rv = resolve(cfg);
    const auto a2 = conditions::condition_a2(m, rv.initial.v0_sup, rv.M, cfg.C_GN);
    const auto rr = conditions::remark_regimes(m, rv.initial.v0_sup, rv.initial.u0_mass, rv.measure, cfg.C_GN);
    row.lhs = a2.lhs;
    row.rhs = a2.rhs;
    row.satisfied = a2.satisfied;
    row.regime = rr.regime;
  }
  return row;
}
}  // namespace detail

/// Evaluates the boundedness condition on the Cartesian product of 1–2 axes
/// (first axis slowest) and writes one CSV row per point.
inline std::vector<SweepRow> cmd_sweep(const config::Document& base, const std::vector<SweepAxis>& axes,
                                       std::ostream& csv) {
  if (axes.empty() || axes.size() > 2) throw ValidationError("sweep needs one or two axes");
  for (const auto& a : axes)
    if (a.values.empty()) throw ValidationError("axis '" + a.key + "' has an empty value list");
  config::interpret(base);

  std::vector<std::vector<double>> points;
  if (axes.size() == 1) {
    for (double x : axes[0].values) points.push_back({x});
  } else {
    for (double x : axes[0].values)
      for (double y : axes[1].values) points.push_back({x, y});
  }

  std::vector<SweepRow> rows(points.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t workers = std::min<std::size_t>(parallel::thread_count(), points.size());
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < points.size(); i += workers) {
      try {
        rows[i] = detail::sweep_point(base, axes, points[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& a : axes) csv << a.key << ',';
  csv << "lhs,rhs,satisfied,regime\n";
  for (const auto& r : rows) {
    for (double x : r.values) csv << monitors::format_number(x) << ',';
    csv << (std::isfinite(r.lhs) ? monitors::format_number(r.lhs) : "") << ','
        << (std::isfinite(r.rhs) ? monitors::format_number(r.rhs) : "") << ','
        << (r.satisfied ? (*r.satisfied ? "1" : "0") : "") << ',' << conditions::to_string(r.regime) << '\n';
  }
  return rows;
}

/// Σ_{k=1}^{modes} a_k cos(kπx/L) with a_k uniform in [−1, 1]; satisfies w_x = 0 at both ends.
inline std::vector<double> cosine_series_coefficients(std::mt19937_64& rng, int modes = 5) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(modes));
  for (double& x : a) x = coeff(rng);
  return a;
}

inline std::vector<double> cosine_series_field(const std::vector<double>& a, const Grid& g) {
  const double length = g.domain().extents[0];
  std::vector<double> w(g.cells(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = g.center(i)[0];
    for (std::size_t k = 0; k < a.size(); ++k)
      w[i] += a[k] * std::cos(static_cast<double>(k + 1) * std::numbers::pi * x / length);
  }
  return w;
}

struct InequalityResult {
  std::vector<double> ratios;
  double min_ratio = std::numeric_limits<double>::infinity();
};

/// Interpolation-inequality ratios rhs/lhs for `trials` random cosine series on [0, 1].
inline InequalityResult run_inequality_trials(double q, std::size_t shape, int trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("trials must be positive");
  const Grid g = build_grid(DomainSpec::interval(1.0), {shape});
  std::mt19937_64 rng(seed);
  InequalityResult res;
  for (int k = 0; k < trials; ++k) {
    const auto w = cosine_series_field(cosine_series_coefficients(rng), g);
    const double ratio = monitors::check_interpolation_inequality(w, q, g).ratio;
    res.ratios.push_back(ratio);
    res.min_ratio = std::min(res.min_ratio, ratio);
  }
  return res;
}

inline ExitCode cmd_inequality(double q, std::size_t shape, int trials, std::uint64_t seed, double threshold,
                               std::ostream& out) {
  const auto res = run_inequality_trials(q, shape, trials, seed);
  out << "trial,ratio\n";
  for (std::size_t k = 0; k < res.ratios.size(); ++k) out << k << ',' << monitors::format_number(res.ratios[k]) << '\n';
  out << "# q = " << q << ", shape = " << shape << ", min ratio = " << res.min_ratio << " (threshold " << threshold
      << ")\n";
  return res.min_ratio >= threshold ? ExitCode::Ok : ExitCode::BoundViolation;
}

}  // namespace chemlab::harness
