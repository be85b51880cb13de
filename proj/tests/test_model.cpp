#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bneck/model.hpp"
#include "bneck/optsolver.hpp"
#include "oracles.hpp"

using namespace bneck;

TEST(EnumerateStates, SmallCases) {
  EXPECT_EQ(enumerate_states(1), (std::vector<QueueState>{{1, 0}}));
  EXPECT_EQ(enumerate_states(2), (std::vector<QueueState>{{1, 0}, {1, 1}, {2, 0}}));
  auto s3 = enumerate_states(3);
  EXPECT_EQ(s3.size(), 6u);
  EXPECT_EQ(s3.back(), (QueueState{3, 0}));
  EXPECT_THROW(enumerate_states(0), InvalidParameter);
}

TEST(EnumerateStates, ContinuationsComeFirst) {
  const int n = 12;
  auto states = enumerate_states(n);
  EXPECT_EQ(states.size(), static_cast<std::size_t>(n * (n + 1) / 2));
  for (std::size_t j = 0; j < states.size(); ++j) {
    for (int i = 0; i < states[j].m; ++i) {
      QueueState next{states[j].m - i, states[j].k + i - 1};
      if (next.k < 0) continue;
      auto pos = std::find(states.begin(), states.end(), next);
      ASSERT_NE(pos, states.end());
      EXPECT_LT(static_cast<std::size_t>(pos - states.begin()), j);
    }
  }
}

TEST(BinomPmf, Examples) {
  EXPECT_DOUBLE_EQ(binom_pmf(3, 0, 0.5), 0.125);
  EXPECT_DOUBLE_EQ(binom_pmf(0, 0, 0.7), 1.0);
  // C(100,2) 1e-12 (1-1e-6)^98, evaluated at 40 digits.
  EXPECT_NEAR(binom_pmf(100, 2, 1e-6), 4.949514923526597e-9, 1e-21);
  EXPECT_THROW(binom_pmf(3, 4, 0.5), InvalidParameter);
  EXPECT_THROW(binom_pmf(3, -1, 0.5), InvalidParameter);
  EXPECT_THROW(binom_pmf(3, 1, 1.5), InvalidParameter);
}

TEST(BinomPmf, MatchesDirectFormula) {
  for (int m : {1, 2, 5, 17, 40})
    for (double q : {0.0, 1e-9, 0.01, 0.3, 0.5, 0.77, 1.0})
      for (int i = 0; i <= m; ++i)
        EXPECT_NEAR(binom_pmf(m, i, q), oracle::pmf(m, i, q),
                    1e-13 * std::max(1.0, oracle::pmf(m, i, q)));
}

TEST(BinomPmf, RowsSumToOne) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int m = 0; m <= 1000; m += (m < 50 ? 1 : 37)) {
    for (double q : {1e-15, 1e-6, 0.5, 1.0 - 1e-9, u(rng), u(rng)}) {
      auto row = binom_row(m, q);
      double s = 0.0;
      for (double v : row) {
        EXPECT_GE(v, 0.0);
        s += v;
      }
      EXPECT_NEAR(s, 1.0, 1e-12) << "m=" << m << " q=" << q;
    }
  }
}

TEST(BinomPmf, LargeMStaysFinite) {
  for (double q : {1e-15, 1e-4, 0.5}) {
    double s = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double v = binom_pmf(10000, i, q);
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(ProbAny, SmallQAccuracy) {
  EXPECT_NEAR(prob_any(5, 1e-12), 5e-12 - 1e-23, 1e-26);
  EXPECT_DOUBLE_EQ(prob_any(3, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(prob_any(0, 0.4), 0.0);
}

TEST(CostEnter, Examples) {
  EXPECT_DOUBLE_EQ(cost_enter({2, 0}, 0.5, 8), 2.0);
  EXPECT_DOUBLE_EQ(cost_enter({1, 4}, 0.3, 6), 24.0);
  EXPECT_DOUBLE_EQ(cost_enter({3, 1}, 0.2, 10), 12.0);
  EXPECT_DOUBLE_EQ(cost_enter({7, 3}, 0.0, 2.5), 7.5);
}

TEST(CostWait, Examples) {
  CostTable c(CostRole::PerOutsidePlayer, 3);
  c.set({1, 0}, 0.0);
  EXPECT_DOUBLE_EQ(cost_wait({2, 0}, 0.5, 8, c), 2.0);
  // Lone agent at (1,k): 1 + c(1,k-1).
  c.set({1, 1}, 1.0);
  EXPECT_DOUBLE_EQ(cost_wait({1, 2}, 0.3, 8, c), 2.0);
  CostTable d(CostRole::PerOutsidePlayer, 3);
  d.set({2, 0}, std::sqrt(5.0));
  d.set({1, 1}, 1.0);
  EXPECT_NEAR(cost_wait({2, 1}, 0.0, 10, d), 1.0 + std::sqrt(5.0), 1e-15);
}

TEST(CostWait, Errors) {
  CostTable c(CostRole::PerOutsidePlayer, 3);
  c.set({1, 0}, 0.0);
  EXPECT_THROW(cost_wait({2, 0}, 0.0, 8, c), DivergentCost);
  EXPECT_THROW(cost_wait({1, 0}, 0.5, 8, c), InvalidParameter);
  EXPECT_THROW(cost_wait({2, 1}, 0.5, 8, c), InvalidParameter);  // missing (2,0)
  CostTable t(CostRole::TotalSocial, 3);
  EXPECT_THROW(cost_wait({2, 0}, 0.5, 8, t), InvalidParameter);
}

TEST(CostWait, DivergesAtEmptyQueue) {
  CostTable c(CostRole::PerOutsidePlayer, 4);
  for (auto s : enumerate_states(3)) c.set(s, s.total());
  for (double M : {1e3, 1e6, 1e9}) {
    // Roughly 1 / (3q) once q is small.
    const double q = 0.25 / M;
    EXPECT_GT(cost_wait({4, 0}, q, 8, c), M);
  }
}

TEST(CostWait, ContinuousForQueuedStates) {
  CostTable c(CostRole::PerOutsidePlayer, 6);
  for (auto s : enumerate_states(5)) c.set(s, 1.0 + 0.3 * s.m + 0.7 * s.k);
  for (double q : {0.0, 0.2, 0.5, 0.9}) {
    const double a = cost_wait({3, 2}, q, 5, c);
    const double b = cost_wait({3, 2}, q + 1e-9, 5, c);
    EXPECT_NEAR(a, b, 1e-7);
  }
}

TEST(StepCost, Examples) {
  EXPECT_DOUBLE_EQ(step_cost_total({2, 0}, 2, 8), 8.0);
  EXPECT_DOUBLE_EQ(step_cost_total({5, 0}, 0, 8), 5.0);
  EXPECT_EQ(successor({5, 0}, 0), (QueueState{5, 0}));
  EXPECT_EQ(successor({5, 2}, 3), (QueueState{2, 4}));
  EXPECT_DOUBLE_EQ(step_cost_total({0, 3}, 0, 5) + step_cost_total({0, 2}, 0, 5) +
                       step_cost_total({0, 1}, 0, 5),
                   drain_cost(3, 5));
  EXPECT_DOUBLE_EQ(drain_cost(3, 5), 15.0);
}

TEST(EntryProfile, DefaultsAndValidation) {
  EntryProfile p(4);
  EXPECT_DOUBLE_EQ(p.q({1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(p.q({1, 3}), 0.0);
  EXPECT_FALSE(p.complete());
  EXPECT_EQ(p.missing_states().front(), (QueueState{2, 0}));
  EXPECT_THROW(p.set({2, 0}, 1.2), InvalidParameter);
  EXPECT_THROW(p.set({2, 3}, 0.5), InvalidParameter);
  EXPECT_THROW(p.q({0, 1}), InvalidParameter);
}

TEST(CostTable, RolesAndSigns) {
  CostTable c(CostRole::PerOutsidePlayer, 3);
  EXPECT_THROW(c.set({0, 2}, 1.0), InvalidParameter);
  EXPECT_THROW(c.set({1, 0}, -1.0), InvalidParameter);
  CostTable t(CostRole::TotalSocial, 3);
  t.set({0, 2}, 5.0);
  EXPECT_DOUBLE_EQ(t.at({0, 2}), 5.0);
}

namespace {

EntryProfile constant_profile(int n, double q) {
  EntryProfile p(n);
  for (auto s : enumerate_states(n))
    if (s.m >= 2) p.set(s, q);
  p.set({1, 0}, 1.0);
  return p;
}

}  // namespace

TEST(TotalCost, Examples) {
  EntryProfile all(3);
  for (auto s : enumerate_states(3)) all.set(s, 1.0);
  EXPECT_DOUBLE_EQ(total_cost_evaluate(all, {3, 1.5}).total, 4.5);

  for (double p : {0.1, 0.41, 0.5, 0.9, 1.0}) {
    EntryProfile two(2);
    two.set({2, 0}, p);
    const double expect = (2 - 2 * p + 8 * p * p) / (p * (2 - p));
    EXPECT_NEAR(total_cost_evaluate(two, {2, 8}).total, expect, 1e-13 * expect);
  }
}

TEST(TotalCost, DrainRows) {
  auto r = total_cost_evaluate(constant_profile(4, 0.4), {4, 3});
  for (int k = 0; k <= 4; ++k) EXPECT_DOUBLE_EQ(r.table.at({0, k}), drain_cost(k, 3));
}

TEST(TotalCost, MatchesEq1RecursionForEmptyQueueProfiles) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int n = 1; n <= 12; ++n)
    for (double w : {1.5, 3.0, 40.0}) {
      std::vector<double> p(n, 1.0);
      for (int m = 2; m <= n; ++m) p[m - 1] = u(rng);
      const double got = total_cost_evaluate(empty_queue_profile(p), {n, w}).total;
      std::vector<double> opt(n + 1, 0.0);
      for (int m = 2; m <= n; ++m) opt[m] = oracle::stage_cost(m, p[m - 1], w, opt);
      EXPECT_NEAR(got, opt[n], 1e-10 * std::max(1.0, opt[n])) << "n=" << n << " w=" << w;
    }
}

TEST(TotalCost, MatchesValueIteration) {
  for (int n : {2, 3, 5})
    for (double q : {0.3, 0.7}) {
      auto prof = constant_profile(n, q);
      const double got = total_cost_evaluate(prof, {n, 4}).total;
      const double ref =
          oracle::total_cost(n, 4, [&](int m, int k) { return prof.q({m, k}); });
      EXPECT_NEAR(got, ref, 1e-10 * ref);
    }
}

TEST(TotalCost, NonTerminatingProfileIsNamed) {
  auto prof = constant_profile(3, 0.5);
  prof.set({3, 0}, 0.0);
  try {
    total_cost_evaluate(prof, {3, 5});
    FAIL() << "expected NonTerminatingProfile";
  } catch (const NonTerminatingProfile& e) {
    EXPECT_NE(std::string(e.what()).find("(3,0)"), std::string::npos);
  }
  // Unreachable zero is harmless: (2,0) is never visited when (3,0) sends
  // everyone in at once and queued states never enter.
  auto ok = constant_profile(3, 0.0);
  ok.set({3, 0}, 1.0);
  ok.set({2, 0}, 0.0);
  EXPECT_NO_THROW(total_cost_evaluate(ok, {3, 5}));
}

TEST(TotalCost, RejectsMismatchedOrIncompleteProfiles) {
  EXPECT_THROW(total_cost_evaluate(constant_profile(3, 0.5), {4, 5}), InvalidParameter);
  EXPECT_THROW(total_cost_evaluate(EntryProfile(3), {3, 5}), InvalidParameter);
  EXPECT_THROW(total_cost_evaluate(constant_profile(3, 0.5), {3, 1.0}), InvalidParameter);
}
