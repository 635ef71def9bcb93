#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "chemlab/conditions.hpp"
#include "oracles.hpp"

using namespace chemlab;
using namespace chemlab::conditions;

namespace {

ModelParams critical3(double chi, double mu, double c) {
  ModelParams m;
  m.chi = chi;
  m.lambda = 1.0;
  m.mu = mu;
  m.c = c;
  m.n = 3;
  m.gamma = critical_gamma(3);
  return m;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

// Frozen 50-digit reference values.
TEST(Constants, K1FrozenValues) {
  EXPECT_LT(rel(compute_K1(2.0, 3), 3.3554819712314443), 1e-14);
  EXPECT_LT(rel(compute_K1(1.5, 3), 1.0163189111915108), 1e-14);
  EXPECT_LT(compute_K1(2.0, 3), compute_K1(2.0, 30));
}

TEST(Constants, K2FrozenValues) {
  EXPECT_LT(rel(compute_K2(2.0, 3, 0.0), 75.925889792222657), 1e-14);
  EXPECT_LT(rel(compute_K2(1.5, 3, 0.0), 12.025180631043421), 1e-14);
  EXPECT_GT(compute_K2(2.0, 3, 1.0), compute_K2(2.0, 3, 0.0));
}

TEST(Constants, DomainErrors) {
  EXPECT_THROW(compute_K1(1.0, 3), DomainError);
  EXPECT_THROW(compute_K1(0.5, 3), DomainError);
  EXPECT_THROW(compute_K2(1.0, 3, 0.0), DomainError);
  EXPECT_THROW(compute_K2(2.0, 3, -1.0), DomainError);
}

TEST(Constants, MatchExtendedPrecisionOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> P(1.0, 50.0), E(0.0, 10.0);
  std::uniform_int_distribution<int> N(1, 20);
  for (int k = 0; k < 200; ++k) {
    double p = P(rng);
    if (p == 1.0) p = 1.5;
    const int n = N(rng);
    const double eta = E(rng);
    EXPECT_LT(rel(compute_K1(p, n), oracle::K1(p, n)), 1e-13) << p << ' ' << n;
    EXPECT_LT(rel(compute_K2(p, n, eta), oracle::K2(p, n, eta)), 1e-13) << p << ' ' << n << ' ' << eta;
  }
}

TEST(Constants, ComputeM) {
  EXPECT_DOUBLE_EQ(compute_M(2, 1, 0.5, 1), 2.0);
  EXPECT_DOUBLE_EQ(compute_M(1, 1, 2, 1), 1.0);
  EXPECT_DOUBLE_EQ(compute_M(0.1, 3, 1, 2), 6.0);
  EXPECT_THROW(compute_M(0, 1, 1, 1), DomainError);
}

TEST(GammaClass, Classification) {
  EXPECT_EQ(gamma_class(1.8, 3), GammaClass::StrictRange);
  EXPECT_EQ(gamma_class(1.5, 3), GammaClass::Critical);
  EXPECT_EQ(gamma_class(1.2, 3), GammaClass::Uncovered);
  EXPECT_EQ(gamma_class(2.0, 3), GammaClass::StrictRange);
  for (int n = 3; n <= 12; ++n) EXPECT_EQ(gamma_class(2.0 * n / (n + 1.0), n), GammaClass::Critical);
  EXPECT_EQ(gamma_class(1.5 + 5e-13, 3), GammaClass::Critical);
  EXPECT_EQ(gamma_class(1.5 + 1e-9, 3), GammaClass::StrictRange);
  EXPECT_THROW(gamma_class(1.8, 2), ScopeError);
}

TEST(Exponents, HandEvaluatedExample) {
  const auto e = exponents(2.0, 1.5, 3);
  EXPECT_NEAR(e.theta, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(e.sigma, 1.8, 1e-15);
  EXPECT_NEAR(e.theta_bar, 0.6, 1e-15);
  EXPECT_NEAR(e.sigma_hat * e.theta_hat * 4.0 / 6.0, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(exponents(2.0, 2.0, 3).sigma, 2.0);
}

TEST(Exponents, PropertiesOnGrid) {
  // 64 p-values in (1, 100], n = 3..10, 32 gamma values in (2n/(n+1), 2].
  for (int ip = 1; ip <= 64; ++ip) {
    const double p = 1.0 + 99.0 * std::pow(ip / 64.0, 2.0);
    for (int n = 3; n <= 10; ++n) {
      const double g0 = critical_gamma(n);
      for (int ig = 1; ig <= 32; ++ig) {
        const double gamma = g0 + (2.0 - g0) * ig / 32.0;
        const auto e = exponents(p, gamma, n);
        EXPECT_GT(e.theta, 0.0);
        EXPECT_LT(e.theta, 1.0);
        const double ts = e.theta * e.sigma / gamma;
        EXPECT_GT(ts, 0.0);
        EXPECT_LT(ts, 1.0) << p << ' ' << n << ' ' << gamma;
        EXPECT_GT(e.theta_bar, 0.0);
        EXPECT_LT(e.theta_bar, 1.0);
      }
      const auto c = exponents(p, g0, n);
      EXPECT_NEAR(c.sigma_hat * c.theta_hat * (n + 1.0) / (2.0 * n), 1.0, 1e-12);
    }
  }
}

TEST(Exponents, SpotCheckSweep) {
  for (double p : {1.1, 1.5, 2.0, 5.0, 10.0})
    for (int n : {3, 4, 5})
      for (double gamma : {critical_gamma(n) + 1e-6, 0.5 * (critical_gamma(n) + 2.0), 2.0}) {
        const auto e = exponents(p, gamma, n);
        EXPECT_TRUE(e.theta > 0 && e.theta < 1);
        EXPECT_TRUE(e.theta * e.sigma / gamma > 0 && e.theta * e.sigma / gamma < 1);
        EXPECT_TRUE(e.theta_bar > 0 && e.theta_bar < 1);
      }
}

TEST(OdeBound, Examples) {
  EXPECT_DOUBLE_EQ(ode_bound(1.0, 0.5), 4.0);
  EXPECT_DOUBLE_EQ(ode_bound(0.25, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(ode_bound(2.0, 0.75), 256.0);
  EXPECT_THROW(ode_bound(1.0, 1.0), DomainError);
  EXPECT_THROW(ode_bound(1.0, 0.0), DomainError);
  EXPECT_THROW(ode_bound(0.0, 0.5), DomainError);
}

TEST(OdeBound, BruteForceScanForKnownPair) {
  // Every y = 0.001·i, i ≤ 10⁶, with y ≤ 2(y^0.75 + 1) is ≤ 256.
  const double largest = oracle::largest_feasible_bruteforce(2.0, 0.75, 1e-3, 1000000);
  EXPECT_LE(largest, 256.0);
  // Largest feasible point is the root of y = 2(y^0.75 + 1).
  double lo = 1.0, hi = 256.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid <= 2.0 * (std::pow(mid, 0.75) + 1.0) ? lo : hi) = mid;
  }
  EXPECT_NEAR(largest, lo, 1e-3);
}

TEST(ConditionA2, WorkedExamples) {
  const auto a = condition_a2(critical3(0.1, 1.01, 0.0), 0.5, 1.0, 1.0);
  EXPECT_LT(rel(a.rhs, 1.5033347864245023), 1e-14);
  EXPECT_NEAR(a.lhs, 1.515, 1e-15);
  EXPECT_TRUE(a.satisfied.value());
  EXPECT_EQ(a.comparison, Comparison::Strict);
  EXPECT_LT(rel(a.K1, 1.0163189111915108), 1e-14);
  EXPECT_LT(rel(a.K2, 12.025180631043421), 1e-14);

  const auto b = condition_a2(critical3(0.1, 0.5, 0.0), 0.5, 1.0, 1.0);
  EXPECT_NEAR(b.lhs, 0.75, 1e-15);
  EXPECT_FALSE(b.satisfied.value());

  const auto c = condition_a2(critical3(0.1, 0.5, 3.0), 0.5, 1.0, 1.0);
  EXPECT_LT(rel(c.lhs, 1.78337848523665326), 1e-14);
  EXPECT_LT(rel(c.F, 0.34445949507888442), 1e-14);
  EXPECT_TRUE(c.satisfied.value());
}

TEST(ConditionA2, ScopeErrors) {
  ModelParams m = critical3(0.1, 1, 0);
  m.gamma = 1.8;
  EXPECT_THROW(condition_a2(m, 0.5, 1, 1), ScopeError);
  ModelParams d = critical3(0.1, 1, 0);
  d.n = 2;
  EXPECT_THROW(condition_a2(d, 0.5, 1, 1), ScopeError);
}

TEST(RemarkRegimes, B1ZeroC) {
  const auto r = remark_regimes(critical3(0.1, 1.01, 0.0), 0.5, 1.0, 1.0, 1.0);
  EXPECT_EQ(r.regime, Regime::B1ZeroC);
  EXPECT_LT(rel(r.mu_bar, 1.0022231909496682), 1e-14);
  EXPECT_TRUE(r.satisfied.value());
  const auto s = remark_regimes(critical3(0.1, 1.0, 0.0), 0.5, 1.0, 1.0, 1.0);
  EXPECT_FALSE(s.satisfied.value());
}

TEST(RemarkRegimes, B3Equality) {
  const double mu_bar = 1.0022231909496682;
  const auto r = remark_regimes(critical3(0.1, mu_bar, 0.2), 0.5, 1.0, 1.0, 1.0);
  EXPECT_EQ(r.regime, Regime::B3Equality);
  EXPECT_TRUE(r.satisfied.value());
}

TEST(RemarkRegimes, B2BranchesAgreeWithA2) {
  // Mass branch: λ|Ω|/μ < ∫u0.
  ModelParams m = critical3(0.1, 0.5, 0.4);
  const double mass = 3.0;
  const auto r = remark_regimes(m, 0.5, mass, 1.0, 1.0);
  EXPECT_EQ(r.regime, Regime::B2MassBound);
  const auto a = condition_a2(m, 0.5, r.M, 1.0);
  EXPECT_EQ(r.satisfied, a.satisfied);

  // μ branch: λ|Ω|/μ > ∫u0, with E μ^{2/(n+1)} + nμ/2 > K equivalent to (A2).
  for (double c : {0.05, 0.5, 2.0, 8.0}) {
    ModelParams q = critical3(0.1, 0.5, c);
    const auto rr = remark_regimes(q, 0.5, 0.5, 1.0, 1.0);
    EXPECT_EQ(rr.regime, Regime::B2MuInequality);
    const auto aa = condition_a2(q, 0.5, rr.M, 1.0);
    EXPECT_EQ(rr.satisfied, aa.satisfied) << c;
  }
}

TEST(ConditionGeneral, StrictRangeNeedsNothing) {
  ModelParams m = critical3(10, 0.01, 0);
  m.gamma = 1.8;
  const auto r = condition_general(2.0, 0.1, m, 5.0, 1.0, 1.0);
  EXPECT_EQ(r.regime, Regime::NotApplicable);
  EXPECT_TRUE(r.satisfied.value());
  m.gamma = 1.2;
  EXPECT_FALSE(condition_general(2.0, 0.1, m, 5.0, 1.0, 1.0).satisfied.has_value());
}

TEST(ConditionGeneral, ReducesToCriticalConditionAtHalfDimension) {
  const ModelParams m = critical3(0.1, 0.5, 3.0);
  const double C = 1.0;
  const auto a = condition_a2(m, 0.5, 1.0, C);
  const auto g = condition_general(1.5, 0.0, m, 0.5, 1.0, gn_constant_from_theorem_constant(C, 3));
  EXPECT_LT(rel(g.rhs, a.rhs), 1e-14);
  EXPECT_LT(rel(g.lhs, a.lhs), 1e-13);
  EXPECT_EQ(g.comparison, Comparison::NonStrict);
  EXPECT_THROW(condition_general(1.0, 0.0, m, 0.5, 1.0, 1.0), DomainError);
}

TEST(ConditionGeneral, EtaOnlyIncreasesRhs) {
  const ModelParams m = critical3(0.1, 0.9, 0.5);
  double prev = 0;
  bool was_satisfied = true;
  for (double eta : {0.0, 0.01, 0.1, 1.0, 5.0}) {
    const auto r = condition_general(2.0, eta, m, 0.5, 1.0, 1.0);
    EXPECT_GT(r.rhs, prev);
    prev = r.rhs;
    if (!was_satisfied) {
      EXPECT_FALSE(r.satisfied.value());
    }
    was_satisfied = r.satisfied.value();
  }
}

TEST(Search, FindsPairWhenCriticalConditionHolds) {
  const ModelParams m = critical3(0.1, 1.01, 0.0);
  const auto s = search_p_eta(m, 0.5, 1.0, 1.0);
  ASSERT_TRUE(s.has_value());
  EXPECT_GT(s->p, 1.5);
  EXPECT_GT(s->eta, 0.0);
  EXPECT_TRUE(s->report.satisfied.value());
}

TEST(Search, AbsentWhenHopeless) {
  const ModelParams m = critical3(5.0, 1e-3, 1e-6);
  EXPECT_FALSE(search_p_eta(m, 2.0, 1.0, 1.0).has_value());
}

TEST(Search, MonotoneInMu) {
  bool found = false;
  for (double mu = 0.5; mu < 2.0; mu += 0.01) {
    const bool now = search_p_eta(critical3(0.1, mu, 0.0), 0.5, 1.0, 1.0).has_value();
    if (found) {
      EXPECT_TRUE(now) << mu;
    }
    found = found || now;
  }
  EXPECT_TRUE(found);
}

TEST(Search, GridShape) {
  const SearchGrid g;
  const auto ps = g.p_values(3);
  ASSERT_EQ(ps.size(), 64u);
  EXPECT_GT(ps.front(), 1.5);
  EXPECT_LT(ps.front() - 1.5, 1e-10);
  EXPECT_DOUBLE_EQ(ps.back(), 3.0);
  for (std::size_t i = 1; i < ps.size(); ++i) EXPECT_GT(ps[i], ps[i - 1]);
  const auto es = g.eta_values();
  ASSERT_EQ(es.size(), 20u);
  EXPECT_DOUBLE_EQ(es.front(), 0.5);
  EXPECT_DOUBLE_EQ(es.back(), std::ldexp(1.0, -20));
}

TEST(Purity, BitIdenticalResults) {
  const ModelParams m = critical3(0.3, 0.7, 1.1);
  const auto a = condition_a2(m, 0.8, 2.0, 1.3), b = condition_a2(m, 0.8, 2.0, 1.3);
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_EQ(a.rhs, b.rhs);
}
