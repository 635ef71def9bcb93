#pragma once

// Diagnostics of discrete trajectories and checks of the a-priori bounds.

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chemlab/error.hpp"
#include "chemlab/model.hpp"
#include "chemlab/operators.hpp"

namespace chemlab::monitors {

inline constexpr double kMassSlack = 1e-6;
inline constexpr double kVmaxSlack = 1e-12;

struct DiagnosticsRecord {
  double t = 0;
  double mass = 0;         ///< ∫u
  double linf_u = 0;
  double linf_v = 0;
  double l2_gradv_sq = 0;  ///< ∫|∇v|²
  double lp_u = 0;         ///< ∫u^p
  double l2p_gradv = 0;    ///< ∫|∇v|^{2p}
  double phi = 0;          ///< lp_u + l2p_gradv
  bool mass_bound_ok = true;
  bool vmax_ok = true;
  std::optional<double> interp_ratio;
  /// Solver steps taken before this sample (not serialized).
  long long step = 0;
};

struct InterpolationCheck {
  double lhs;
  double rhs;
  double ratio;  ///< rhs/lhs, +inf when both sides vanish
};

/// Discrete form of
///   ∫|∇w|^{2q+2} ≤ 2(4q²+n)‖w‖²_∞ ∫|∇w|^{2q−2}|D²w|²
/// with central gradients and the reflected-ghost Hessian; n is the dimension of Ω.
inline InterpolationCheck check_interpolation_inequality(std::span<const double> w, double q, const Grid& g) {
  if (!(q >= 1.0)) throw DomainError("interpolation check requires q >= 1");
  g.check(w);
  const auto grad2 = ops::gradient_norm_sq(w, g);
  const auto hess2 = ops::hessian_frobenius_sq(w, g);
  std::vector<double> lhs_density(w.size());
  std::vector<double> rhs_density(w.size());
  double wmax = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    lhs_density[i] = std::pow(grad2[i], q + 1.0);
    rhs_density[i] = (q == 1.0 ? 1.0 : std::pow(grad2[i], q - 1.0)) * hess2[i];
    wmax = std::max(wmax, std::abs(w[i]));
  }
  const int n = g.domain().dimension();
  const double lhs = g.integrate(lhs_density);
  const double rhs = 2.0 * (4.0 * q * q + n) * wmax * wmax * g.integrate(rhs_density);
  const double ratio = lhs > 0.0 ? rhs / lhs : std::numeric_limits<double>::infinity();
  return {lhs, rhs, ratio};
}

/// One diagnostics sample. Integrals use the midpoint rule over cells.
inline DiagnosticsRecord record(const FieldState& s, const Grid& g, double p, double M, double v0_sup,
                                bool with_interpolation = true) {
  if (!(p > 1.0)) throw DomainError("monitor exponent p must be > 1");
  g.check(s.u);
  g.check(s.v);
  DiagnosticsRecord r;
  r.t = s.t;
  r.mass = g.integrate(s.u);
  r.linf_u = parallel::max(s.u.size(), [&](std::size_t i) { return std::abs(s.u[i]); });
  r.linf_v = parallel::max(s.v.size(), [&](std::size_t i) { return std::abs(s.v[i]); });
  auto grad2 = ops::gradient_norm_sq(s.v, g);
  r.l2_gradv_sq = g.integrate(grad2);
  std::vector<double> tmp(s.u.size());
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = std::pow(std::abs(s.u[i]), p);
  r.lp_u = g.integrate(tmp);
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = std::pow(grad2[i], p);
  r.l2p_gradv = g.integrate(tmp);
  r.phi = r.lp_u + r.l2p_gradv;
  r.mass_bound_ok = r.mass <= M * (1.0 + kMassSlack);
  r.vmax_ok = r.linf_v <= v0_sup * (1.0 + kVmaxSlack);
  if (with_interpolation) r.interp_ratio = check_interpolation_inequality(s.v, 1.0, g).ratio;
  return r;
}

struct BoundFailure {
  std::string name;
  double t;
  double value;
  double limit;
};

struct TrajectoryReport {
  std::vector<BoundFailure> failures;
  std::vector<double> phi_t;
  std::vector<double> phi;
  double sup_gradv_sq = 0;
  double sup_phi = 0;
  /// sup φ over the samples is reached in the first half of the run.
  bool phi_sup_in_first_half = false;

  bool ok() const { return failures.empty(); }
  std::string summary() const {
    std::ostringstream os;
    if (ok()) os << "all trajectory bounds hold";
    for (const auto& f : failures)
      os << f.name << " violated at t=" << f.t << ": value " << f.value << " > " << f.limit << "\n";
    return os.str();
  }
};

/// Checks every sample against ∫u ≤ M and ‖v‖∞ ≤ ‖v0‖∞, the monotonicity of
/// ‖v‖∞ (1e-12 slack per solver step) and non-explosion of ∫|∇v|² past t = 1
/// (sup over the last quarter of those samples at most 10× the first quarter).
inline TrajectoryReport verify_trajectory_bounds(const std::vector<DiagnosticsRecord>& d, double M, double v0_sup) {
  if (d.empty()) throw DomainError("verify_trajectory_bounds needs at least one record");
  TrajectoryReport rep;
  const double mass_limit = M * (1.0 + kMassSlack);
  const double v_limit = v0_sup * (1.0 + kVmaxSlack);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const auto& r = d[k];
    if (!(r.mass <= mass_limit)) rep.failures.push_back({"mass_bound", r.t, r.mass, mass_limit});
    if (!(r.linf_v <= v_limit)) rep.failures.push_back({"v_max_bound", r.t, r.linf_v, v_limit});
    if (k > 0) {
      const double steps = static_cast<double>(std::max<long long>(1, r.step - d[k - 1].step));
      const double allowed = d[k - 1].linf_v + kVmaxSlack * steps * std::max(1.0, v0_sup);
      if (!(r.linf_v <= allowed)) rep.failures.push_back({"v_max_monotone", r.t, r.linf_v, allowed});
    }
    if (!std::isfinite(r.l2_gradv_sq))
      rep.failures.push_back({"grad_v_l2_finite", r.t, r.l2_gradv_sq, std::numeric_limits<double>::max()});
    rep.sup_gradv_sq = std::max(rep.sup_gradv_sq, r.l2_gradv_sq);
    rep.phi_t.push_back(r.t);
    rep.phi.push_back(r.phi);
  }

  std::vector<const DiagnosticsRecord*> tail;
  for (const auto& r : d)
    if (r.t > 1.0) tail.push_back(&r);
  if (tail.size() >= 4) {
    const std::size_t q = tail.size() / 4;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < q; ++i) first = std::max(first, tail[i]->l2_gradv_sq);
    for (std::size_t i = tail.size() - q; i < tail.size(); ++i) last = std::max(last, tail[i]->l2_gradv_sq);
    const double allowed = 10.0 * first + 1e-12;
    if (!(last <= allowed)) rep.failures.push_back({"grad_v_l2_tail", tail.back()->t, last, allowed});
  }

  std::size_t arg = 0;
  for (std::size_t k = 0; k < d.size(); ++k)
    if (d[k].phi > d[arg].phi) arg = k;
  rep.sup_phi = d[arg].phi;
  const double t0 = d.front().t, t1 = d.back().t;
  rep.phi_sup_in_first_half = d[arg].t <= t0 + 0.5 * (t1 - t0);
  return rep;
}

// CSV (column order is part of the file format).

inline std::string csv_header() {
  return "t,mass,linf_u,linf_v,l2_gradv_sq,lp_u,l2p_gradv,phi,mass_bound_ok,vmax_ok,interp_ratio";
}

inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string s;
  for (double x : {r.t, r.mass, r.linf_u, r.linf_v, r.l2_gradv_sq, r.lp_u, r.l2p_gradv, r.phi}) {
    s += format_number(x);
    s += ',';
  }
  s += r.mass_bound_ok ? "1," : "0,";
  s += r.vmax_ok ? "1," : "0,";
  if (r.interp_ratio) s += format_number(*r.interp_ratio);
  return s;
}

}  // namespace chemlab::monitors
