#pragma once

// Problem definition: coefficients, geometry, cell-centered grids, discrete
// fields and positive initial data descriptors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "chemlab/error.hpp"
#include "chemlab/parallel.hpp"

namespace chemlab {

/// Coefficients of
///   u_t = Δu − χ∇·(u∇v) + λu − μu² − c|∇u|^γ,   v_t = Δv − uv
/// with Neumann data, posed in dimension n.
struct ModelParams {
  double chi = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  double c = 0.0;
  double gamma = 2.0;
  int n = 3;

  void validate() const {
    if (!(chi > 0)) throw ValidationError("chi must be positive");
    if (!(lambda > 0)) throw ValidationError("lambda must be positive");
    if (!(mu > 0)) throw ValidationError("mu must be positive");
    if (!(c >= 0)) throw ValidationError("c must be nonnegative");
    if (!(gamma >= 1.0 && gamma <= 2.0)) throw ValidationError("gamma must lie in [1, 2]");
    if (n < 1) throw ValidationError("n must be at least 1");
  }
};

enum class DomainKind { Interval, Box2, Box3, RadialBall };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Interval: return "interval";
    case DomainKind::Box2: return "box2";
    case DomainKind::Box3: return "box3";
    case DomainKind::RadialBall: return "radial";
  }
  return "?";
}

/// Volume of the n-ball of radius r: π^{n/2} rⁿ / Γ(n/2 + 1).
inline double ball_volume(double radius, int n) {
  return std::pow(std::numbers::pi, 0.5 * n) * std::pow(radius, n) / std::tgamma(0.5 * n + 1.0);
}

/// Surface area of the unit sphere in Rⁿ: 2π^{n/2} / Γ(n/2).
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Ω: an interval [0,L], a box [0,Lx]×[0,Ly](×[0,Lz]) or a ball of radius R in
/// R^{radial_n} restricted to radially symmetric fields.
struct DomainSpec {
  DomainKind kind = DomainKind::Interval;
  std::vector<double> extents{1.0};
  int radial_n = 3;

  static DomainSpec interval(double length) { return {DomainKind::Interval, {length}, 3}; }
  static DomainSpec box2(double lx, double ly) { return {DomainKind::Box2, {lx, ly}, 3}; }
  static DomainSpec box3(double lx, double ly, double lz) {
    return {DomainKind::Box3, {lx, ly, lz}, 3};
  }
  static DomainSpec radial_ball(double radius, int n) { return {DomainKind::RadialBall, {radius}, n}; }

  /// Number of grid axes (1 for the radial reduction).
  std::size_t axes() const {
    switch (kind) {
      case DomainKind::Box2: return 2;
      case DomainKind::Box3: return 3;
      default: return 1;
    }
  }

  /// Dimension of the physical domain.
  int dimension() const { return kind == DomainKind::RadialBall ? radial_n : static_cast<int>(axes()); }

  void validate() const {
    if (extents.size() != axes())
      throw ValidationError("domain " + to_string(kind) + " needs " + std::to_string(axes()) +
                            " extent(s), got " + std::to_string(extents.size()));
    for (double e : extents)
      if (!(e > 0) || !std::isfinite(e)) throw ValidationError("domain extents must be positive");
    if (kind == DomainKind::RadialBall && radial_n < 3)
      throw ValidationError("radial ball requires radial_n >= 3");
  }

  /// |Ω|.
  double measure() const {
    if (kind == DomainKind::RadialBall) return ball_volume(extents[0], radial_n);
    double m = 1.0;
    for (double e : extents) m *= e;
    return m;
  }
};

/// Uniform cell-centered grid. Cell i along an axis has center (i + 1/2)h, so
/// Neumann conditions are imposed by reflecting the boundary cell into its ghost.
///
/// For one-axis grids (Interval, RadialBall) the finite-volume coefficients
/// A_{i±1/2} / (h V_i) are tabulated; in the radial case A is the sphere area
/// of the face and V the shell volume, which gives the conservative form of
/// r^{1−n}(r^{n−1} f_r)_r with zero face area at r = 0.
class Grid {
 public:
  Grid() = default;

  const DomainSpec& domain() const { return domain_; }
  std::size_t axes() const { return axes_; }
  const std::array<std::size_t, 3>& shape() const { return shape_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  std::size_t cells() const { return cells_; }
  std::array<std::size_t, 3> strides() const { return {1, shape_[0], shape_[0] * shape_[1]}; }
  bool radial() const { return domain_.kind == DomainKind::RadialBall; }

  double min_spacing() const {
    double h = spacing_[0];
    for (std::size_t a = 1; a < axes_; ++a) h = std::min(h, spacing_[a]);
    return h;
  }

  double cell_volume(std::size_t i) const { return radial() ? volume_[i] : uniform_volume_; }
  std::span<const double> coef_plus() const { return coef_plus_; }
  std::span<const double> coef_minus() const { return coef_minus_; }

  /// Per-axis index of a flat cell index (x fastest).
  std::array<std::size_t, 3> unflatten(std::size_t idx) const {
    return {idx % shape_[0], (idx / shape_[0]) % shape_[1], idx / (shape_[0] * shape_[1])};
  }

  /// Cell center; for RadialBall the single coordinate is r.
  std::array<double, 3> center(std::size_t idx) const {
    auto ijk = unflatten(idx);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < axes_; ++a) x[a] = (static_cast<double>(ijk[a]) + 0.5) * spacing_[a];
    return x;
  }

  /// Σ f_i V_i in deterministic order.
  double integrate(std::span<const double> f) const {
    if (f.size() != cells_) throw ShapeError("field length does not match grid");
    if (radial()) return parallel::sum(cells_, [&](std::size_t i) { return f[i] * volume_[i]; });
    return uniform_volume_ * parallel::sum(cells_, [&](std::size_t i) { return f[i]; });
  }

  void check(std::span<const double> f) const {
    if (f.size() != cells_)
      throw ShapeError("field length " + std::to_string(f.size()) + " does not match grid cell count " +
                       std::to_string(cells_));
  }

  friend Grid build_grid(const DomainSpec& domain, std::span<const std::size_t> resolution);

 private:
  DomainSpec domain_;
  std::size_t axes_ = 1;
  std::array<std::size_t, 3> shape_{1, 1, 1};
  std::array<double, 3> spacing_{1.0, 1.0, 1.0};
  std::size_t cells_ = 0;
  double uniform_volume_ = 1.0;
  std::vector<double> volume_;
  std::vector<double> coef_plus_;
  std::vector<double> coef_minus_;
};

inline Grid build_grid(const DomainSpec& domain, std::span<const std::size_t> resolution) {
  domain.validate();
  if (resolution.size() != domain.axes())
    throw ValidationError("resolution has " + std::to_string(resolution.size()) + " entries, domain " +
                          to_string(domain.kind) + " needs " + std::to_string(domain.axes()));
  for (std::size_t r : resolution)
    if (r < 4) throw ValidationError("resolution entries must be >= 4");

  Grid g;
  g.domain_ = domain;
  g.axes_ = domain.axes();
  g.cells_ = 1;
  g.uniform_volume_ = 1.0;
  for (std::size_t a = 0; a < g.axes_; ++a) {
    g.shape_[a] = resolution[a];
    g.spacing_[a] = domain.extents[a] / static_cast<double>(resolution[a]);
    g.cells_ *= resolution[a];
    g.uniform_volume_ *= g.spacing_[a];
  }

  if (g.axes_ == 1) {
    const std::size_t n = g.cells_;
    const double h = g.spacing_[0];
    g.coef_plus_.assign(n, 0.0);
    g.coef_minus_.assign(n, 0.0);
    if (g.radial()) {
      const int dim = domain.radial_n;
      const double omega = unit_sphere_area(dim);
      g.volume_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double rl = static_cast<double>(i) * h;
        const double rr = static_cast<double>(i + 1) * h;
        g.volume_[i] = omega * (std::pow(rr, dim) - std::pow(rl, dim)) / dim;
      }
      for (std::size_t i = 0; i < n; ++i) {
        const double rl = static_cast<double>(i) * h;
        const double rr = static_cast<double>(i + 1) * h;
        if (i + 1 < n) g.coef_plus_[i] = omega * std::pow(rr, dim - 1) / (h * g.volume_[i]);
        if (i > 0) g.coef_minus_[i] = omega * std::pow(rl, dim - 1) / (h * g.volume_[i]);
      }
    } else {
      const double inv_h2 = 1.0 / (h * h);
      for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n) g.coef_plus_[i] = inv_h2;
        if (i > 0) g.coef_minus_[i] = inv_h2;
      }
    }
  }
  return g;
}

inline Grid build_grid(const DomainSpec& domain, std::initializer_list<std::size_t> resolution) {
  std::vector<std::size_t> r(resolution);
  return build_grid(domain, std::span<const std::size_t>(r));
}

/// Discrete (u, v) at time t.
struct FieldState {
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;
};

/// Bound below which a value counts as negative.
inline constexpr double kPositivityTolerance = 1e-12;

// Initial data descriptors.

struct Constant {
  double value = 1.0;
};

/// baseline + amplitude·Π cos(π x_a / L_a); radial: baseline + amplitude·cos(π r / R).
struct CosineBump {
  double amplitude = 0.5;
  double baseline = 1.0;
};

/// baseline + amplitude·exp(−|x − center|² / (2 width²)); radial uses r and center[0].
struct GaussianBump {
  double amplitude = 1.0;
  std::vector<double> center{0.5};
  double width = 0.1;
  double baseline = 0.1;
};

using Descriptor = std::variant<Constant, CosineBump, GaussianBump>;

/// Lower bound of the descriptor over Ω̄ (exact for Constant and CosineBump).
inline double descriptor_lower_bound(const Descriptor& d) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, CosineBump>) {
          return s.baseline - std::abs(s.amplitude);
        } else {
          return s.baseline + std::min(0.0, s.amplitude);
        }
      },
      d);
}

inline double evaluate_descriptor(const Descriptor& d, const std::array<double, 3>& x, const DomainSpec& domain) {
  const std::size_t axes = domain.axes();
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return s.value;
        } else if constexpr (std::is_same_v<T, CosineBump>) {
          double prod = 1.0;
          for (std::size_t a = 0; a < axes; ++a) prod *= std::cos(std::numbers::pi * x[a] / domain.extents[a]);
          return s.baseline + s.amplitude * prod;
        } else {
          if (s.center.size() != axes) throw ValidationError("gaussian center needs one entry per grid axis");
          double r2 = 0.0;
          for (std::size_t a = 0; a < axes; ++a) r2 += (x[a] - s.center[a]) * (x[a] - s.center[a]);
          return s.baseline + s.amplitude * std::exp(-r2 / (2.0 * s.width * s.width));
        }
      },
      d);
}

inline void validate_descriptor(const Descriptor& d, const char* name) {
  if (const auto* g = std::get_if<GaussianBump>(&d); g && !(g->width > 0))
    throw ValidationError(std::string(name) + ": gaussian width must be positive");
  if (!(descriptor_lower_bound(d) > 0))
    throw ValidationError(std::string(name) + " must be strictly positive on the closed domain");
}

/// u0, v0 descriptors together with ∫u0 (midpoint quadrature on the grid) and
/// the discrete max of v0.
struct InitialData {
  Descriptor u0;
  Descriptor v0;
  double u0_mass = 0.0;
  double v0_sup = 0.0;
};

inline std::vector<double> sample(const Descriptor& d, const Grid& grid, const char* name) {
  validate_descriptor(d, name);
  std::vector<double> f(grid.cells());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = evaluate_descriptor(d, grid.center(i), grid.domain());
    if (!(f[i] > 0)) throw ValidationError(std::string(name) + " evaluates nonpositive at a cell center");
  }
  return f;
}

inline InitialData make_initial_data(const Descriptor& u0, const Descriptor& v0, const Grid& grid) {
  InitialData data{u0, v0, 0.0, 0.0};
  const auto uf = sample(u0, grid, "u0");
  const auto vf = sample(v0, grid, "v0");
  data.u0_mass = grid.integrate(uf);
  data.v0_sup = *std::max_element(vf.begin(), vf.end());
  return data;
}

/// Samples the descriptors at cell centers; t = 0.
inline FieldState evaluate_initial(const InitialData& data, const Grid& grid) {
  FieldState s;
  s.u = sample(data.u0, grid, "u0");
  s.v = sample(data.v0, grid, "v0");
  s.t = 0.0;
  return s;
}

}  // namespace chemlab
