#pragma once

// Method-of-lines integrator: conservative finite volumes in space, SSP-RK3
// (Shu–Osher form) in time.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chemlab/error.hpp"
#include "chemlab/model.hpp"
#include "chemlab/monitors.hpp"
#include "chemlab/operators.hpp"

namespace chemlab {

struct SolverConfig {
  double t_end = 1.0;
  double dt_init = 1e-3;
  double cfl_safety = 0.4;
  double dt_min = 1e-10;
  double blowup_threshold = 1e6;
  AdvectionScheme advection_scheme = AdvectionScheme::Upwind;
  double record_every = 0.1;

  void validate() const {
    if (!(t_end >= 0) || !std::isfinite(t_end)) throw ValidationError("t_end must be nonnegative");
    if (!(dt_init > 0)) throw ValidationError("dt_init must be positive");
    if (!(cfl_safety > 0 && cfl_safety <= 1)) throw ValidationError("cfl_safety must lie in (0, 1]");
    if (!(dt_min > 0)) throw ValidationError("dt_min must be positive");
    if (!(dt_min < dt_init)) throw ValidationError("dt_min must be smaller than dt_init");
    if (!(blowup_threshold > 0)) throw ValidationError("blowup_threshold must be positive");
    if (!(record_every > 0)) throw ValidationError("record_every must be positive");
  }
};

enum class StepStatus { Ok, DtFloorHit, BlowupDetected, NegativityFault };

inline std::string to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Ok: return "ok";
    case StepStatus::DtFloorHit: return "dt_floor_hit";
    case StepStatus::BlowupDetected: return "blowup_detected";
    case StepStatus::NegativityFault: return "negativity_fault";
  }
  return "?";
}

struct StepOutcome {
  FieldState state;
  double dt_used = 0;
  StepStatus status = StepStatus::Ok;
};

/// Right-hand side of the semi-discrete system with reusable scratch buffers.
class Integrator {
 public:
  Integrator(const ModelParams& params, const Grid& grid, const SolverConfig& config)
      : params_(params), grid_(grid), config_(config) {
    const std::size_t n = grid.cells();
    for (auto* b : {&du_, &dv_, &u1_, &v1_, &u2_, &v2_, &s1_, &s2_}) b->assign(n, 0.0);
  }

  /// du = Δu − χ∇·(u∇v) + λu − μu² − c|∇u|^γ,  dv = Δv − uv.
  void rhs(std::span<const double> u, std::span<const double> v, std::span<double> du, std::span<double> dv) {
    grid_.check(u);
    grid_.check(v);
    if (grid_.axes() == 1) {
      rhs_1d(u, v, du, dv);
      return;
    }
    const auto& p = params_;
    ops::laplacian(u, grid_, du);
    ops::laplacian(v, grid_, dv);
    ops::chemotaxis_divergence(u, v, grid_, config_.advection_scheme, s1_);
    if (p.c != 0.0) ops::gradient_magnitude_term(u, grid_, p.gamma, s2_);
    parallel::for_ranges(u.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const double damping = p.c != 0.0 ? p.c * s2_[i] : 0.0;
        du[i] += -p.chi * s1_[i] + p.lambda * u[i] - p.mu * u[i] * u[i] - damping;
        dv[i] -= u[i] * v[i];
      }
    });
  }

  /// Largest stable dt: min(cfl·h²/(2d), cfl·h/(χ max|∇v|_face)).
  double stable_dt(std::span<const double> v) const {
    const double h = grid_.min_spacing();
    double limit = config_.cfl_safety * h * h / (2.0 * static_cast<double>(grid_.axes()));
    const double gmax = max_face_gradient(v);
    if (params_.chi > 0.0 && gmax > 0.0) limit = std::min(limit, config_.cfl_safety * h / (params_.chi * gmax));
    return limit;
  }

  /// One SSP-RK3 step of at most dt_request; halves dt on negativity.
  StepOutcome step(const FieldState& s, double dt_request) {
    StepOutcome out;
    const double limit = stable_dt(s.v);
    if (!(limit >= config_.dt_min)) {
      out.state = s;
      out.status = StepStatus::DtFloorHit;
      return out;
    }
    double dt = std::min(dt_request, limit);
    for (;;) {
      const Attempt a = attempt(s, dt);
      if (a == Attempt::NonFinite) {
        out.state = FieldState{u2_, v2_, s.t + dt};
        out.dt_used = dt;
        out.status = StepStatus::BlowupDetected;
        return out;
      }
      if (a == Attempt::Ok) break;
      dt *= 0.5;
      if (dt < config_.dt_min) {
        out.state = s;
        out.dt_used = dt;
        out.status = StepStatus::NegativityFault;
        return out;
      }
    }
    out.state = FieldState{u2_, v2_, s.t + dt};
    out.dt_used = dt;
    const double umax = *std::max_element(u2_.begin(), u2_.end());
    out.status = umax > config_.blowup_threshold ? StepStatus::BlowupDetected : StepStatus::Ok;
    return out;
  }

  /// In-place variant used by simulate: advances s and returns the status.
  StepStatus advance(FieldState& s, double dt_request, double& dt_used) {
    const double limit = stable_dt(s.v);
    if (!(limit >= config_.dt_min)) return StepStatus::DtFloorHit;
    double dt = std::min(dt_request, limit);
    for (;;) {
      const Attempt a = attempt(s, dt);
      if (a == Attempt::NonFinite) {
        s.u.swap(u2_);
        s.v.swap(v2_);
        s.t += dt;
        dt_used = dt;
        return StepStatus::BlowupDetected;
      }
      if (a == Attempt::Ok) break;
      dt *= 0.5;
      if (dt < config_.dt_min) return StepStatus::NegativityFault;
    }
    s.u.swap(u2_);
    s.v.swap(v2_);
    s.t += dt;
    dt_used = dt;
    const double umax = *std::max_element(s.u.begin(), s.u.end());
    return umax > config_.blowup_threshold ? StepStatus::BlowupDetected : StepStatus::Ok;
  }

  const Grid& grid() const { return grid_; }

 private:
  enum class Attempt { Ok, Negative, NonFinite };

  double max_face_gradient(std::span<const double> v) const {
    const auto shape = grid_.shape();
    const auto stride = grid_.strides();
    const auto h = grid_.spacing();
    if (grid_.axes() == 1) {
      double m = 0.0;
      for (std::size_t i = 0; i + 1 < v.size(); ++i) m = std::max(m, std::abs(v[i + 1] - v[i]));
      return m / h[0];
    }
    return parallel::max(v.size(), [&](std::size_t idx) {
      const auto ijk = grid_.unflatten(idx);
      double m = 0.0;
      for (std::size_t a = 0; a < grid_.axes(); ++a)
        if (ijk[a] + 1 < shape[a]) m = std::max(m, std::abs(v[idx + stride[a]] - v[idx]) / h[a]);
      return m;
    });
  }

  // Fused one-axis kernel (Interval and RadialBall); boundary cells are
  // peeled so the interior loop is branch-free.
  void rhs_1d(std::span<const double> u, std::span<const double> v, std::span<double> du, std::span<double> dv) {
    if (config_.advection_scheme == AdvectionScheme::Upwind)
      rhs_1d_impl<true>(u.data(), v.data(), du.data(), dv.data(), u.size());
    else
      rhs_1d_impl<false>(u.data(), v.data(), du.data(), dv.data(), u.size());
    if (params_.c != 0.0) {
      const double c = params_.c, gamma = params_.gamma;
      const double* grad = s1_.data();
      for (std::size_t i = 0; i < u.size(); ++i) du[i] -= c * ops::abs_pow(grad[i], gamma);
    }
  }

  template <bool Upwind>
  void rhs_1d_impl(const double* __restrict u, const double* __restrict v, double* __restrict du,
                   double* __restrict dv, std::size_t n) {
    const double* __restrict cp = grid_.coef_plus().data();
    const double* __restrict cm = grid_.coef_minus().data();
    double* __restrict grad = s1_.data();
    const double inv2h = 1.0 / (2.0 * grid_.spacing()[0]);
    const double chi = params_.chi, lambda = params_.lambda, mu = params_.mu;

    auto cell = [&](std::size_t i, double um, double ui, double up, double vm, double vi, double vp) {
      const double dvp = vp - vi;
      const double dvm = vm - vi;
      double ufp, ufm;
      if constexpr (Upwind) {
        ufp = dvp > 0.0 ? ui : up;
        ufm = dvm > 0.0 ? ui : um;
      } else {
        ufp = 0.5 * (ui + up);
        ufm = 0.5 * (ui + um);
      }
      const double lap_u = cp[i] * (up - ui) + cm[i] * (um - ui);
      const double div = cp[i] * ufp * dvp + cm[i] * ufm * dvm;
      du[i] = lap_u - chi * div + lambda * ui - mu * ui * ui;
      dv[i] = cp[i] * dvp + cm[i] * dvm - ui * vi;
      grad[i] = (up - um) * inv2h;
    };
    cell(0, u[0], u[0], u[1], v[0], v[0], v[1]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double ui = u[i], up = u[i + 1], um = u[i - 1], vi = v[i];
      const double dvp = v[i + 1] - vi;
      const double dvm = v[i - 1] - vi;
      double ufp, ufm;
      if constexpr (Upwind) {
        ufp = dvp > 0.0 ? ui : up;
        ufm = dvm > 0.0 ? ui : um;
      } else {
        ufp = 0.5 * (ui + up);
        ufm = 0.5 * (ui + um);
      }
      const double a = cp[i], b = cm[i];
      du[i] = a * (up - ui) + b * (um - ui) - chi * (a * ufp * dvp + b * ufm * dvm) + lambda * ui - mu * ui * ui;
      dv[i] = a * dvp + b * dvm - ui * vi;
      grad[i] = (up - um) * inv2h;
    }
    cell(n - 1, u[n - 2], u[n - 1], u[n - 1], v[n - 2], v[n - 1], v[n - 1]);
  }

  // Ok unless some value is below -tolerance or not finite.
  static Attempt classify(std::span<const double> u, std::span<const double> v, bool flagged) {
    if (!flagged) return Attempt::Ok;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!std::isfinite(u[i]) || !std::isfinite(v[i])) return Attempt::NonFinite;
    return Attempt::Negative;
  }

  // Result in u2_/v2_. Stage values are screened in the update loops; a NaN
  // fails the >= comparison and is sorted out by classify.
  Attempt attempt(const FieldState& s, double dt) {
    const std::size_t n = s.u.size();
    const double* __restrict u = s.u.data();
    const double* __restrict v = s.v.data();
    double* __restrict u1 = u1_.data();
    double* __restrict v1 = v1_.data();
    double* __restrict u2 = u2_.data();
    double* __restrict v2 = v2_.data();
    const double* __restrict du = du_.data();
    const double* __restrict dv = dv_.data();
    constexpr double lo = -kPositivityTolerance;
    int bad = 0;

    rhs(s.u, s.v, du_, dv_);
    for (std::size_t i = 0; i < n; ++i) {
      u1[i] = u[i] + dt * du[i];
      v1[i] = v[i] + dt * dv[i];
      bad |= static_cast<int>(!(u1[i] >= lo)) | static_cast<int>(!(v1[i] >= lo));
    }
    if (auto a = classify(u1_, v1_, bad != 0); a != Attempt::Ok) return finish(a);

    rhs(u1_, v1_, du_, dv_);
    for (std::size_t i = 0; i < n; ++i) {
      u2[i] = 0.75 * u[i] + 0.25 * (u1[i] + dt * du[i]);
      v2[i] = 0.75 * v[i] + 0.25 * (v1[i] + dt * dv[i]);
      bad |= static_cast<int>(!(u2[i] >= lo)) | static_cast<int>(!(v2[i] >= lo));
    }
    if (auto a = classify(u2_, v2_, bad != 0); a != Attempt::Ok) return finish(a);

    rhs(u2_, v2_, du_, dv_);
    constexpr double third = 1.0 / 3.0, two_thirds = 2.0 / 3.0;
    for (std::size_t i = 0; i < n; ++i) {
      u2[i] = third * u[i] + two_thirds * (u2[i] + dt * du[i]);
      v2[i] = third * v[i] + two_thirds * (v2[i] + dt * dv[i]);
      bad |= static_cast<int>(!(u2[i] >= lo)) | static_cast<int>(!(v2[i] >= lo));
    }
    return classify(u2_, v2_, bad != 0);
  }

  Attempt finish(Attempt a) {
    if (a == Attempt::NonFinite) {
      u2_ = u1_;
      v2_ = v1_;
    }
    return a;
  }

  ModelParams params_;
  const Grid& grid_;
  SolverConfig config_;
  std::vector<double> du_, dv_, u1_, v1_, u2_, v2_, s1_, s2_;
};

/// Semi-discrete right-hand side (du/dt, dv/dt).
inline std::pair<std::vector<double>, std::vector<double>> rhs(const FieldState& s, const ModelParams& params,
                                                               const Grid& grid,
                                                               AdvectionScheme scheme = AdvectionScheme::Upwind) {
  SolverConfig cfg;
  cfg.advection_scheme = scheme;
  Integrator integ(params, grid, cfg);
  std::vector<double> du(grid.cells()), dv(grid.cells());
  integ.rhs(s.u, s.v, du, dv);
  return {std::move(du), std::move(dv)};
}

/// One step with dt = min(config.dt_init, stability limits).
inline StepOutcome step(const FieldState& s, const ModelParams& params, const Grid& grid, const SolverConfig& config) {
  Integrator integ(params, grid, config);
  return integ.step(s, config.dt_init);
}

/// What the diagnostics sampler needs: exponent p and the bounds M, ‖v0‖∞.
struct MonitorSpec {
  double p = 2.0;
  double M = 1.0;
  double v0_sup = 1.0;
  bool interpolation = true;
};

struct SimulationResult {
  StepOutcome final;
  std::vector<monitors::DiagnosticsRecord> diagnostics;
  long long steps = 0;
};

/// Advances to t_end or the first non-Ok status, sampling diagnostics at
/// t = initial.t + k·record_every and at the final time.
inline SimulationResult simulate(const FieldState& initial, const ModelParams& params, const Grid& grid,
                                 const SolverConfig& config, const MonitorSpec& mon) {
  config.validate();
  grid.check(initial.u);
  grid.check(initial.v);
  SimulationResult res;
  res.final.state = initial;
  res.final.status = StepStatus::Ok;
  if (!(config.t_end > initial.t)) return res;

  Integrator integ(params, grid, config);
  FieldState& s = res.final.state;
  auto sample = [&] {
    auto r = monitors::record(s, grid, mon.p, mon.M, mon.v0_sup, mon.interpolation);
    r.step = res.steps;
    res.diagnostics.push_back(r);
  };
  sample();

  const double t0 = initial.t;
  long long next_index = 1;
  const double snap = 1e-12 * std::max(1.0, config.t_end);
  while (s.t < config.t_end) {
    const double next_record = t0 + static_cast<double>(next_index) * config.record_every;
    const double target = std::min(next_record, config.t_end);
    double dt_used = 0.0;
    const StepStatus st = integ.advance(s, std::min(config.dt_init, target - s.t), dt_used);
    res.final.dt_used = dt_used;
    res.final.status = st;
    if (st == StepStatus::DtFloorHit || st == StepStatus::NegativityFault) break;
    ++res.steps;
    if (st == StepStatus::BlowupDetected) break;
    if (std::abs(s.t - target) <= snap) s.t = target;
    if (s.t >= config.t_end) {
      s.t = config.t_end;
      sample();
      break;
    }
    if (s.t >= next_record) {
      sample();
      ++next_index;
    }
  }
  return res;
}

}  // namespace chemlab
