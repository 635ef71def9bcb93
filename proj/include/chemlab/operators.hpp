#pragma once

// Conservative finite-volume stencils on cell-centered grids with ghost-cell
// Neumann reflection (the ghost of a boundary cell carries the cell's value).

#include <cmath>
#include <span>
#include <vector>

#include "chemlab/model.hpp"
#include "chemlab/parallel.hpp"

namespace chemlab {

enum class AdvectionScheme { Upwind, Central };

namespace ops {

/// Δf. One-axis grids use the tabulated face coefficients (radial included);
/// boxes use the standard 2·axes+1 point stencil.
inline void laplacian(std::span<const double> f, const Grid& g, std::span<double> out) {
  g.check(f);
  g.check(out);
  if (g.axes() == 1) {
    const auto cp = g.coef_plus();
    const auto cm = g.coef_minus();
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double fp = i + 1 < n ? f[i + 1] : f[i];
      const double fm = i > 0 ? f[i - 1] : f[i];
      out[i] = cp[i] * (fp - f[i]) + cm[i] * (fm - f[i]);
    }
    return;
  }
  const auto shape = g.shape();
  const auto stride = g.strides();
  const auto h = g.spacing();
  parallel::for_ranges(f.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      const auto ijk = g.unflatten(idx);
      double acc = 0.0;
      for (std::size_t a = 0; a < g.axes(); ++a) {
        const double inv_h2 = 1.0 / (h[a] * h[a]);
        if (ijk[a] + 1 < shape[a]) acc += inv_h2 * (f[idx + stride[a]] - f[idx]);
        if (ijk[a] > 0) acc += inv_h2 * (f[idx - stride[a]] - f[idx]);
      }
      out[idx] = acc;
    }
  });
}

inline std::vector<double> laplacian(std::span<const double> f, const Grid& g) {
  std::vector<double> out(f.size());
  laplacian(f, g, out);
  return out;
}

/// ∇·(u∇v) in flux form: face flux u_face·(∇v)_face with the central face
/// gradient, u_face upwinded on the sign of (∇v)_face or averaged; boundary
/// faces carry no flux.
inline void chemotaxis_divergence(std::span<const double> u, std::span<const double> v, const Grid& g,
                                  AdvectionScheme scheme, std::span<double> out) {
  g.check(u);
  g.check(v);
  g.check(out);
  const bool upwind = scheme == AdvectionScheme::Upwind;
  auto face_u = [upwind](double u_self, double u_nb, double dv_towards_nb) {
    // Transport velocity χ∇v points from self to neighbour when dv_towards_nb > 0.
    if (!upwind) return 0.5 * (u_self + u_nb);
    return dv_towards_nb > 0.0 ? u_self : u_nb;
  };
  if (g.axes() == 1) {
    const auto cp = g.coef_plus();
    const auto cm = g.coef_minus();
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      if (i + 1 < n) {
        const double dv = v[i + 1] - v[i];
        acc += cp[i] * face_u(u[i], u[i + 1], dv) * dv;
      }
      if (i > 0) {
        const double dv = v[i - 1] - v[i];
        acc += cm[i] * face_u(u[i], u[i - 1], dv) * dv;
      }
      out[i] = acc;
    }
    return;
  }
  const auto shape = g.shape();
  const auto stride = g.strides();
  const auto h = g.spacing();
  parallel::for_ranges(u.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      const auto ijk = g.unflatten(idx);
      double acc = 0.0;
      for (std::size_t a = 0; a < g.axes(); ++a) {
        const double inv_h2 = 1.0 / (h[a] * h[a]);
        if (ijk[a] + 1 < shape[a]) {
          const std::size_t nb = idx + stride[a];
          const double dv = v[nb] - v[idx];
          acc += inv_h2 * face_u(u[idx], u[nb], dv) * dv;
        }
        if (ijk[a] > 0) {
          const std::size_t nb = idx - stride[a];
          const double dv = v[nb] - v[idx];
          acc += inv_h2 * face_u(u[idx], u[nb], dv) * dv;
        }
      }
      out[idx] = acc;
    }
  });
}

inline std::vector<double> chemotaxis_divergence(std::span<const double> u, std::span<const double> v,
                                                 const Grid& g, AdvectionScheme scheme) {
  std::vector<double> out(u.size());
  chemotaxis_divergence(u, v, g, scheme, out);
  return out;
}

/// Central difference ∂f/∂x_a at a cell, ghost-reflected at the boundary.
inline double central_derivative(std::span<const double> f, const Grid& g, std::size_t idx,
                                 const std::array<std::size_t, 3>& ijk, std::size_t a) {
  const auto stride = g.strides();
  const std::size_t s = stride[a];
  const double fp = ijk[a] + 1 < g.shape()[a] ? f[idx + s] : f[idx];
  const double fm = ijk[a] > 0 ? f[idx - s] : f[idx];
  return (fp - fm) / (2.0 * g.spacing()[a]);
}

/// |∇f|² per cell from central differences (|f_r|² on radial grids).
inline void gradient_norm_sq(std::span<const double> f, const Grid& g, std::span<double> out) {
  g.check(f);
  g.check(out);
  parallel::for_ranges(f.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t idx = b; idx < e; ++idx) {
      const auto ijk = g.unflatten(idx);
      double s = 0.0;
      for (std::size_t a = 0; a < g.axes(); ++a) {
        const double d = central_derivative(f, g, idx, ijk, a);
        s += d * d;
      }
      out[idx] = s;
    }
  });
}

inline std::vector<double> gradient_norm_sq(std::span<const double> f, const Grid& g) {
  std::vector<double> out(f.size());
  gradient_norm_sq(f, g, out);
  return out;
}

/// |x|^γ with the exact special cases γ = 1 and γ = 2.
inline double abs_pow(double x, double gamma) {
  const double a = std::abs(x);
  if (gamma == 2.0) return a * a;
  if (gamma == 1.0) return a;
  return a == 0.0 ? 0.0 : std::pow(a, gamma);
}

/// |∇u|^γ per cell.
inline void gradient_magnitude_term(std::span<const double> u, const Grid& g, double gamma, std::span<double> out) {
  if (!(gamma >= 1.0 && gamma <= 2.0)) throw DomainError("gamma must lie in [1, 2]");
  gradient_norm_sq(u, g, out);
  const double half = 0.5 * gamma;
  for (double& x : out) {
    if (gamma == 2.0) continue;
    x = x == 0.0 ? 0.0 : std::pow(x, half);
  }
}

inline std::vector<double> gradient_magnitude_term(std::span<const double> u, const Grid& g, double gamma) {
  std::vector<double> out(u.size());
  gradient_magnitude_term(u, g, gamma, out);
  return out;
}

/// ‖D²f‖_F² per cell. Boxes: Σ f_aa² + 2Σ_{a<b} f_ab² with reflected ghost
/// indices; radial: f_rr² + (n−1)(f_r/r)².
inline std::vector<double> hessian_frobenius_sq(std::span<const double> f, const Grid& g) {
  g.check(f);
  std::vector<double> out(f.size());
  const auto shape = g.shape();
  const auto stride = g.strides();
  const auto h = g.spacing();
  auto shifted = [&](std::size_t idx, const std::array<std::size_t, 3>& ijk, std::size_t a, int dir) {
    if (dir > 0) return ijk[a] + 1 < shape[a] ? idx + stride[a] : idx;
    return ijk[a] > 0 ? idx - stride[a] : idx;
  };
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto ijk = g.unflatten(idx);
    double s = 0.0;
    for (std::size_t a = 0; a < g.axes(); ++a) {
      const double faa = (f[shifted(idx, ijk, a, +1)] - 2.0 * f[idx] + f[shifted(idx, ijk, a, -1)]) / (h[a] * h[a]);
      s += faa * faa;
      for (std::size_t b = a + 1; b < g.axes(); ++b) {
        auto corner = [&](int da, int db) {
          std::size_t i1 = shifted(idx, ijk, a, da);
          auto ijk1 = g.unflatten(i1);
          return f[shifted(i1, ijk1, b, db)];
        };
        const double fab = (corner(+1, +1) - corner(+1, -1) - corner(-1, +1) + corner(-1, -1)) / (4.0 * h[a] * h[b]);
        s += 2.0 * fab * fab;
      }
    }
    if (g.radial()) {
      const double r = g.center(idx)[0];
      const double fr = central_derivative(f, g, idx, ijk, 0);
      s += (g.domain().radial_n - 1) * (fr / r) * (fr / r);
    }
    out[idx] = s;
  }
  return out;
}

}  // namespace ops
}  // namespace chemlab
