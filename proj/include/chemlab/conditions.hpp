#pragma once

// Closed-form constants, interpolation exponents and boundedness conditions
// for the consumption system with gradient-dependent damping, plus the search
// for a pair (p, η) that satisfies the integral-estimate condition.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chemlab/error.hpp"
#include "chemlab/model.hpp"

namespace chemlab::conditions {

inline constexpr double kCriticalTolerance = 1e-12;

/// 2n/(n+1), the gradient exponent separating unconditional from conditional boundedness.
inline double critical_gamma(int n) { return 2.0 * n / (n + 1.0); }

namespace detail {
inline void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must be > 1, got " + std::to_string(p));
}
inline double checked_pow(double base, double exponent) {
  if (!(base > 0.0)) throw DomainError("nonpositive base in power");
  return std::pow(base, exponent);
}
inline void require_theorem_dimension(int n) {
  if (n < 3) throw ScopeError("the boundedness theorem requires n >= 3, got n = " + std::to_string(n));
}
}  // namespace detail

/// K1(p,n) = p/(p+1) · (8(4p²+n)/(p(p+1)))^{1/p} · (p(p−1)/2)^{(p+1)/p}
inline double compute_K1(double p, int n) {
  detail::require_p(p);
  const double a = 8.0 * (4.0 * p * p + n) / (p * (p + 1.0));
  const double b = p * (p - 1.0) / 2.0;
  return p / (p + 1.0) * detail::checked_pow(a, 1.0 / p) * detail::checked_pow(b, (p + 1.0) / p);
}

/// K2(p,n,η) = 2p^{(p+1)/2}(p+n+η−1)^{(p+1)/2}/(p+1) · (8(4p²+n)(p−1)/(p(p+1)))^{(p−1)/2}
inline double compute_K2(double p, int n, double eta) {
  detail::require_p(p);
  if (!(eta >= 0.0)) throw DomainError("eta must be >= 0");
  const double half = (p + 1.0) / 2.0;
  const double a = 8.0 * (4.0 * p * p + n) * (p - 1.0) / (p * (p + 1.0));
  return 2.0 * detail::checked_pow(p, half) * detail::checked_pow(p + n + eta - 1.0, half) / (p + 1.0) *
         detail::checked_pow(a, (p - 1.0) / 2.0);
}

/// M = max{∫u0, (λ/μ)|Ω|}, the a-priori bound on ∫u.
inline double compute_M(double u0_mass, double lambda, double mu, double measure) {
  if (!(u0_mass > 0 && lambda > 0 && mu > 0 && measure > 0))
    throw DomainError("compute_M: all inputs must be positive");
  return std::max(u0_mass, lambda / mu * measure);
}

enum class GammaClass { StrictRange, Critical, Uncovered };

inline std::string to_string(GammaClass g) {
  switch (g) {
    case GammaClass::StrictRange: return "strict";
    case GammaClass::Critical: return "critical";
    case GammaClass::Uncovered: return "uncovered";
  }
  return "?";
}

inline GammaClass gamma_class(double gamma, int n) {
  detail::require_theorem_dimension(n);
  if (!(gamma >= 1.0 && gamma <= 2.0)) throw DomainError("gamma must lie in [1, 2]");
  const double g0 = critical_gamma(n);
  if (std::abs(gamma - g0) <= kCriticalTolerance) return GammaClass::Critical;
  if (gamma > g0) return GammaClass::StrictRange;
  return GammaClass::Uncovered;
}

/// Interpolation exponents used to absorb ∫u^{p+1} into gradient terms.
struct ExponentSet {
  double theta = 0;
  double sigma = 0;
  double theta_bar = 0;
  double theta_hat = 0;
  double sigma_hat = 0;
};

inline double theta(double p, double gamma, int n) {
  const double q = (p + gamma - 1.0) / gamma;
  const double den = q + 1.0 / n - 1.0 / gamma;
  if (!(den > 0.0)) throw DomainError("degenerate interpolation exponent denominator");
  return q * (1.0 - 1.0 / (p + 1.0)) / den;
}

inline double sigma(double p, double gamma) { return gamma * (p + 1.0) / (p + gamma - 1.0); }

inline double theta_bar(double p, int n) { return (0.5 * p - 0.5) / (0.5 * p - 0.5 + 1.0 / n); }

inline ExponentSet exponents(double p, double gamma, int n) {
  detail::require_p(p);
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(gamma >= 1.0)) throw DomainError("gamma must be >= 1");
  const double g0 = critical_gamma(n);
  return {theta(p, gamma, n), sigma(p, gamma), theta_bar(p, n), theta(p, g0, n), sigma(p, g0)};
}

/// Every y > 0 with y ≤ k(y^l + 1) satisfies y ≤ max{1, (2k)^{1/(1−l)}}.
inline double ode_bound(double k, double l) {
  if (!(k > 0.0)) throw DomainError("ode_bound: k must be positive");
  if (!(l > 0.0 && l < 1.0)) throw DomainError("ode_bound: l must lie in (0, 1)");
  return std::max(1.0, std::pow(2.0 * k, 1.0 / (1.0 - l)));
}

enum class Regime { B1ZeroC, B2MassBound, B2MuInequality, B3Equality, NotApplicable };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::B1ZeroC: return "B1_zero_c";
    case Regime::B2MassBound: return "B2_mass_bound";
    case Regime::B2MuInequality: return "B2_mu_inequality";
    case Regime::B3Equality: return "B3_equality";
    case Regime::NotApplicable: return "not_applicable";
  }
  return "?";
}

enum class Comparison { Strict, NonStrict };

/// Both sides of a boundedness condition with every constant that enters it.
/// Verdicts are conditional on the supplied interpolation constant C_GN.
struct ConditionReport {
  GammaClass gamma_class = GammaClass::Uncovered;
  double M = std::numeric_limits<double>::quiet_NaN();
  double K1 = std::numeric_limits<double>::quiet_NaN();
  double K2 = std::numeric_limits<double>::quiet_NaN();
  double C_GN = std::numeric_limits<double>::quiet_NaN();
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  std::optional<bool> satisfied;
  Regime regime = Regime::NotApplicable;
  Comparison comparison = Comparison::Strict;
  double p_used = std::numeric_limits<double>::quiet_NaN();
  double eta_used = std::numeric_limits<double>::quiet_NaN();

  // Remark decomposition; NaN where not computed.
  double F = std::numeric_limits<double>::quiet_NaN();       ///< (n/2)(2n/(n²+3n−2))^{2n/(n+1)}·C
  double K = std::numeric_limits<double>::quiet_NaN();       ///< K1 v0^{4/n} χ^{2(n+2)/n} + K2 v0^n
  double E = std::numeric_limits<double>::quiet_NaN();       ///< cF/(λ|Ω|)^{2/(n+1)}
  double mu_bar = std::numeric_limits<double>::quiet_NaN();  ///< (2/n)K
  double mass_bound = std::numeric_limits<double>::quiet_NaN();
  double sigma_hat = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {
inline void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(name) + " must be positive");
}

/// (n/2)(2n/(n²+3n−2))^{2n/(n+1)}
inline double remark_prefactor(int n) {
  const double nn = n;
  return 0.5 * nn * std::pow(2.0 * nn / (nn * nn + 3.0 * nn - 2.0), critical_gamma(n));
}

/// K1(n/2,n)·v0^{4/n}·χ^{(2/n)(n+2)} + K2(n/2,n,0)·v0^n
inline double critical_rhs(const ModelParams& m, double v0_sup, double& k1, double& k2) {
  const double nn = m.n;
  k1 = compute_K1(0.5 * nn, m.n);
  k2 = compute_K2(0.5 * nn, m.n, 0.0);
  return k1 * std::pow(v0_sup, 4.0 / nn) * std::pow(m.chi, 2.0 / nn * (nn + 2.0)) + k2 * std::pow(v0_sup, nn);
}
}  // namespace detail

/// Condition for critical γ:
///   c(n/2)(2n/(n²+3n−2))^{2n/(n+1)} C M^{−2/(n+1)} + μn/2 > K1(n/2,n)‖v0‖^{4/n}χ^{2(n+2)/n} + K2(n/2,n,0)‖v0‖ⁿ
/// where C (passed as C_GN) stands in for the theorem's unspecified constant.
inline ConditionReport condition_a2(const ModelParams& m, double v0_sup, double M, double C_GN) {
  detail::require_theorem_dimension(m.n);
  const GammaClass gc = gamma_class(m.gamma, m.n);
  if (gc != GammaClass::Critical) throw ScopeError("condition (A2) applies only at gamma = 2n/(n+1)");
  detail::require_positive(v0_sup, "v0_sup");
  detail::require_positive(M, "M");
  detail::require_positive(C_GN, "C_GN");

  ConditionReport r;
  r.gamma_class = gc;
  r.M = M;
  r.C_GN = C_GN;
  r.comparison = Comparison::Strict;
  r.p_used = 0.5 * m.n;
  r.eta_used = 0.0;
  r.F = detail::remark_prefactor(m.n) * C_GN;
  r.rhs = detail::critical_rhs(m, v0_sup, r.K1, r.K2);
  r.K = r.rhs;
  r.mu_bar = 2.0 / m.n * r.K;
  r.lhs = m.c * r.F * std::pow(M, -2.0 / (m.n + 1.0)) + m.mu * 0.5 * m.n;
  r.satisfied = r.lhs > r.rhs;
  return r;
}

/// Remark classification of the critical-γ condition rewritten as cF M^{−2/(n+1)} + (n/2)μ > K.
/// lhs/rhs hold the regime's own inequality (satisfied ⇔ lhs > rhs, B3 is true by equality):
///   B1  μ vs μ̄ = (2/n)K
///   B2 mass  (cF/(K − nμ/2))^{(n+1)/2} vs ∫u0
///   B2 μ     Eμ^{2/(n+1)} + nμ/2 vs K
///   B3 / μ > μ̄ with c > 0: the rewritten inequality itself.
/// Equality μ = μ̄ is detected to 1e-12 relative.
inline ConditionReport remark_regimes(const ModelParams& m, double v0_sup, double u0_mass, double measure,
                                      double C_GN) {
  detail::require_theorem_dimension(m.n);
  const GammaClass gc = gamma_class(m.gamma, m.n);
  if (gc != GammaClass::Critical) throw ScopeError("the remark regimes apply only at gamma = 2n/(n+1)");
  detail::require_positive(v0_sup, "v0_sup");
  detail::require_positive(C_GN, "C_GN");

  ConditionReport r;
  r.gamma_class = gc;
  r.C_GN = C_GN;
  r.M = compute_M(u0_mass, m.lambda, m.mu, measure);
  r.p_used = 0.5 * m.n;
  r.eta_used = 0.0;
  r.comparison = Comparison::Strict;
  const double nn = m.n;
  r.F = detail::remark_prefactor(m.n) * C_GN;
  r.K = detail::critical_rhs(m, v0_sup, r.K1, r.K2);
  r.mu_bar = 2.0 / nn * r.K;
  r.E = m.c * r.F / std::pow(m.lambda * measure, 2.0 / (nn + 1.0));

  const bool at_threshold = std::abs(m.mu - r.mu_bar) <= kCriticalTolerance * r.mu_bar;
  const double full_lhs = m.c * r.F * std::pow(r.M, -2.0 / (nn + 1.0)) + 0.5 * nn * m.mu;

  if (m.c == 0.0) {
    r.regime = Regime::B1ZeroC;
    r.lhs = m.mu;
    r.rhs = r.mu_bar;
    r.satisfied = r.lhs > r.rhs;
  } else if (at_threshold) {
    r.regime = Regime::B3Equality;
    r.lhs = full_lhs;
    r.rhs = r.K;
    r.satisfied = true;
  } else if (m.mu < r.mu_bar) {
    if (r.M == u0_mass) {
      r.regime = Regime::B2MassBound;
      r.mass_bound = std::pow(m.c * r.F / (r.K - 0.5 * nn * m.mu), (nn + 1.0) / 2.0);
      r.lhs = r.mass_bound;
      r.rhs = u0_mass;
    } else {
      r.regime = Regime::B2MuInequality;
      r.lhs = r.E * std::pow(m.mu, 2.0 / (nn + 1.0)) + 0.5 * nn * m.mu;
      r.rhs = r.K;
    }
    r.satisfied = r.lhs > r.rhs;
  } else {
    r.regime = Regime::NotApplicable;
    r.lhs = full_lhs;
    r.rhs = r.K;
    r.satisfied = r.lhs > r.rhs;
  }
  return r;
}

/// Integral-estimate condition for a given (p, η):
///   cp(2n/((n+1)p+n−1))^{2n/(n+1)}(2C_GN)^{−σ̂}M^{−2/(n+1)} + μp ≥ K1(p,n)‖v0‖^{2/p}χ^{2(p+1)/p} + K2(p,n,η)‖v0‖^{2p}
/// For γ above the critical value no condition is needed.
inline ConditionReport condition_general(double p, double eta, const ModelParams& m, double v0_sup, double M,
                                         double C_GN) {
  detail::require_p(p);
  if (!(eta >= 0.0)) throw DomainError("eta must be >= 0");
  detail::require_positive(v0_sup, "v0_sup");
  detail::require_positive(M, "M");
  detail::require_positive(C_GN, "C_GN");
  const double nn = m.n;
  const double g0 = critical_gamma(m.n);

  ConditionReport r;
  r.M = M;
  r.C_GN = C_GN;
  r.p_used = p;
  r.eta_used = eta;
  r.comparison = Comparison::NonStrict;
  r.K1 = compute_K1(p, m.n);
  r.K2 = compute_K2(p, m.n, eta);
  r.sigma_hat = sigma(p, g0);
  r.rhs = r.K1 * std::pow(v0_sup, 2.0 / p) * std::pow(m.chi, 2.0 * (p + 1.0) / p) + r.K2 * std::pow(v0_sup, 2.0 * p);
  r.lhs = m.c * p * std::pow(2.0 * nn / ((nn + 1.0) * p + nn - 1.0), g0) * std::pow(2.0 * C_GN, -r.sigma_hat) *
              std::pow(M, -2.0 / (nn + 1.0)) +
          m.mu * p;

  if (std::abs(m.gamma - g0) <= kCriticalTolerance) {
    r.gamma_class = GammaClass::Critical;
    r.regime = Regime::NotApplicable;
    r.satisfied = r.lhs >= r.rhs;
  } else if (m.gamma > g0) {
    r.gamma_class = GammaClass::StrictRange;
    r.regime = Regime::NotApplicable;
    r.satisfied = true;
  } else {
    r.gamma_class = GammaClass::Uncovered;
    r.regime = Regime::NotApplicable;
  }
  return r;
}

/// Interpolation constant C_GN for which the integral-estimate condition at
/// (p, η) = (n/2, 0) has the same left-hand side as the critical condition with
/// theorem constant C:  (2 C_GN)^{−σ̂(n/2)} = C · 2^{−2n/(n+1)}.
inline double gn_constant_from_theorem_constant(double theorem_constant, int n) {
  detail::require_positive(theorem_constant, "theorem constant");
  const double g0 = critical_gamma(n);
  const double s0 = sigma(0.5 * n, g0);
  return 0.5 * std::pow(theorem_constant * std::pow(2.0, -g0), -1.0 / s0);
}

struct SearchGrid {
  int p_points = 64;
  int eta_points = 20;
  /// Smallest relative offset of p above n/2.
  double min_offset = 1e-12;

  /// p = n/2 + (n/2)·ρ^k, geometric in the offset from n/2, ending at p = n;
  /// listed from closest to n/2 upwards.
  std::vector<double> p_values(int n) const {
    std::vector<double> ps;
    const double half = 0.5 * n;
    const int count = std::max(p_points, 1);
    const double ratio = count > 1 ? std::pow(min_offset, 1.0 / (count - 1)) : 1.0;
    for (int k = count - 1; k >= 0; --k) {
      const double p = half + half * std::pow(ratio, k);
      if (p > 1.0 && p > half) ps.push_back(p);
    }
    return ps;
  }

  /// η = 2^{−k}, k = 1..eta_points, largest first.
  std::vector<double> eta_values() const {
    std::vector<double> es;
    for (int k = 1; k <= eta_points; ++k) es.push_back(std::ldexp(1.0, -k));
    return es;
  }
};

struct SearchResult {
  double p;
  double eta;
  ConditionReport report;
};

/// Looks for p > n/2, η > 0 satisfying condition_general at critical γ.
/// theorem_constant is the same constant handed to condition_a2; it is mapped
/// to the interpolation constant with gn_constant_from_theorem_constant so that
/// the search is continuous with the critical condition as p → n/2, η → 0.
inline std::optional<SearchResult> search_p_eta(const ModelParams& m, double v0_sup, double M,
                                                double theorem_constant, const SearchGrid& grid = {}) {
  detail::require_theorem_dimension(m.n);
  if (gamma_class(m.gamma, m.n) != GammaClass::Critical)
    throw ScopeError("the (p, eta) search applies only at gamma = 2n/(n+1)");
  const double cgn = gn_constant_from_theorem_constant(theorem_constant, m.n);
  const auto etas = grid.eta_values();
  for (double p : grid.p_values(m.n)) {
    for (double eta : etas) {
      auto r = condition_general(p, eta, m, v0_sup, M, cgn);
      if (r.satisfied.value_or(false)) return SearchResult{p, eta, r};
    }
  }
  return std::nullopt;
}

}  // namespace chemlab::conditions
