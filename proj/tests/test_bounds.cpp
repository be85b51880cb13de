#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bneck/bounds.hpp"

using namespace bneck;

TEST(EqBounds, Examples) {
  EXPECT_EQ(eq_lower_simple(2), 1.0);
  EXPECT_EQ(eq_lower_simple(1), 0.0);
  EXPECT_EQ(eq_lower_simple(50), 49.0);

  EXPECT_NEAR(eq_upper_small_w(3, 10), 18.49306144334055, 1e-12);
  EXPECT_NEAR(eq_upper_small_w(2, 2.5), 5.366433975699932, 1e-12);
  EXPECT_THROW(eq_upper_small_w(3, 2.0), DomainError);

  EXPECT_NEAR(eq_upper_large_w(3, 10, 1.0), 20.01475735094390, 1e-11);
  EXPECT_NEAR(eq_upper_large_w(2, 8, 1.0), 14.47766191272341, 1e-11);
  EXPECT_THROW(eq_upper_large_w(3, 10, 0.0), InvalidParameter);
}

TEST(EqBounds, LowerLargeW) {
  auto a = eq_lower_large_w(2, 1e6, 0.01);
  EXPECT_NEAR(a.sum_form, 0.98 * 500 * 0.5, 1e-9);
  EXPECT_LE(a.sum_form, std::sqrt(1e6 / 2));
  // eps -> 0 at n = 3.
  auto b = eq_lower_large_w(3, 1.0e4, 1e-12);
  EXPECT_NEAR(b.sum_form / 100.0, 0.5 * (0.5 + 1 / (1 + std::sqrt(2.0))), 1e-9);
  EXPECT_NEAR(b.sum_form / 100.0, 0.457107, 1e-6);
  EXPECT_GT(b.simplified, 0.0);
  EXPECT_THROW(eq_lower_large_w(3, 10, 0.5), InvalidParameter);
}

TEST(EntryProbLower, Examples) {
  EXPECT_DOUBLE_EQ(entry_prob_lower(7, 0, 10), 0.2);
  EXPECT_EQ(entry_prob_lower(3, 1, 10), 0.0);
  EXPECT_NEAR(entry_prob_lower(11, 1, 3), (2.0 / 3) * (1 - 2.0 / 10), 1e-15);
  EXPECT_THROW(entry_prob_lower(1, 0, 10), InvalidParameter);
}

TEST(OptRecursiveUpper, Examples) {
  EXPECT_NEAR(opt_recursive_upper(2, 9, 0.5), 9.420624607102518, 1e-12);
  EXPECT_LE(std::sqrt(17.0), opt_recursive_upper(2, 9, 0.5));
  // Diverges like m/alpha.
  const double small = opt_recursive_upper(4, 5, 1e-6);
  EXPECT_NEAR(small * 1e-6, 4.0, 1e-3);
  EXPECT_THROW(opt_recursive_upper(2, 9, 2.0), InvalidParameter);
  EXPECT_THROW(opt_recursive_upper(2, 9, 0.0), InvalidParameter);
}

TEST(OptBoundsLargeW, Examples) {
  auto b = opt_bounds_large_w(2, 1e6, 0.05);
  EXPECT_NEAR(b.lower_closed, 0.95 * std::sqrt(2e6) * 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(b.lower_closed, 895.67, 0.01);
  const double observed = std::sqrt(2e6 - 1);
  EXPECT_GE(observed, b.lower_closed);
  EXPECT_LE(observed, b.upper_closed);
  EXPECT_LE(b.lower_closed, b.lower_sum + 1e-9);
  EXPECT_LE(b.upper_sum, b.upper_closed + 1e-9);
  EXPECT_THROW(opt_bounds_large_w(3, 1.0, 0.1), InvalidParameter);
  auto d = opt_bounds_large_w(3, 100.0, 1e-12);
  EXPECT_NEAR(d.lower_closed / std::sqrt(100.0), 8.0 / 3.0, 1e-9);
}

TEST(RatioTargets, Examples) {
  auto t = ratio_targets(4, 1e6);
  EXPECT_EQ(t.fixed_w, 2.0);
  EXPECT_NEAR(t.large_w_eq_sc, 1000.0, 1e-9);
  EXPECT_NEAR(t.large_w_eq_opt, 1.0606601717798212, 1e-15);
}

TEST(NiceFunctions, CandidatesPass) {
  for (double w : {2.5, 10.0, 1e4}) {
    EXPECT_TRUE(nice_function_check(phi_A(w), 60).passed()) << w;
    EXPECT_TRUE(nice_function_check(phi_B(w, 1.0), 60).passed()) << w;
  }
}

TEST(NiceFunctions, MutantFailsFirstCondition) {
  NiceBoundFunction drop_k{"drop_k", [](int m, int) { return double(m); }};
  auto r = nice_function_check(drop_k, 10);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.condition1_failures, 0);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_EQ(r.witnesses.front().condition, 1);
  EXPECT_EQ(r.witnesses.front().at.k, 1);
}

TEST(NiceFunctions, MutantFailsSecondCondition) {
  // Passes condition 1 but shrinks as more agents are still outside.
  NiceBoundFunction f{"falls_in_m", [](int m, int k) { return 2.0 * k - m; }};
  auto r = nice_function_check(f, 10);
  EXPECT_EQ(r.condition1_failures, 0);
  EXPECT_GT(r.condition2_failures, 0);
  ASSERT_FALSE(r.witnesses.empty());
  const auto& wit = r.witnesses.front();
  EXPECT_EQ(wit.condition, 2);
  EXPECT_GE(wit.at.m, wit.other.m);
  EXPECT_GE(wit.at.total(), wit.other.total());
}

TEST(NiceFunctions, AgreesWithPairwiseScan) {
  // Pairwise reference on a few functions, including one with a dip.
  std::vector<NiceBoundFunction> fs{
      phi_A(7.0), phi_B(7.0, 1.0),
      {"dip", [](int m, int k) { return m + k + (m == 4 && k == 2 ? -0.5 : 0.0); }}};
  const int N = 12;
  for (const auto& f : fs) {
    auto pairwise_fails = [&] {
      for (int m = 1; m <= N; ++m)
        for (int k = 0; k <= N; ++k)
          for (int m2 = 1; m2 <= m; ++m2)
            for (int k2 = 0; k2 <= N; ++k2)
              if (m + k >= m2 + k2 &&
                  f.phi(m, k) < f.phi(m2, k2) - 1e-12 * std::abs(f.phi(m, k)))
                return true;
      return false;
    };
    auto r = nice_function_check(f, N);
    EXPECT_EQ(r.condition2_failures > 0, pairwise_fails()) << f.name;
  }
}

TEST(AuxLemmas, AllPass) {
  auto res = aux_lemma_validators(20000, 3);
  ASSERT_EQ(res.size(), 5u);
  for (const auto& c : res) {
    EXPECT_TRUE(c.passed()) << c.name << " " << c.witness;
    EXPECT_GT(c.checked, 0);
  }
}

TEST(AuxLemmas, DocumentedExamples) {
  // (1-p)^2 at p = 1/2 hits the upper end exactly.
  EXPECT_DOUBLE_EQ(0.25, 1 - 0.5 * 2 + 0.25 * 1);
  const double lhs = 1 / (1 - std::pow(0.9, 3));
  EXPECT_NEAR(lhs, 3.690036900369004, 1e-12);
  EXPECT_NEAR((1 / 1.8) * (2 / 0.3), 3.703703703703704, 1e-12);
  double s = 0.0;
  for (int i = 1; i <= 4; ++i) s += 1 / (1 + std::sqrt(i));
  EXPECT_NEAR(s, 1.613572299490867, 1e-12);
  const double rhs = 2 * (std::sqrt(5.0) - std::log(1 + std::sqrt(5.0)) - 1 + std::log(2.0));
  EXPECT_NEAR(rhs, 1.509712304880372, 1e-12);
}

TEST(ProbVanishing, Examples) {
  auto e3 = solve_equilibrium({3, 10});
  auto r3 = prob_vanishing_check(e3, 0.1);
  EXPECT_EQ(r3.queued_nonzero, 0);

  auto big = solve_equilibrium({3, 1e6});
  auto rb = prob_vanishing_check(big, 0.1);
  EXPECT_TRUE(rb.all_hold());
  EXPECT_LT(rb.empty_queue.back().scaled_q, 0.01);

  auto two = solve_equilibrium({2, 8});
  auto r2 = prob_vanishing_check(two, 0.1);
  EXPECT_FALSE(r2.all_hold());
  EXPECT_NEAR(r2.empty_queue.front().scaled_q, 0.5, 1e-12);
}

TEST(ProbVanishing, TrendAcrossDecades) {
  auto tr = prob_vanishing_trend(4, {1e2, 1e4, 1e6});
  EXPECT_EQ(tr.scaled_q.size(), 3u);
  EXPECT_TRUE(tr.non_increasing);
}

TEST(BoundsReport, HardBoundsPassAtModerateW) {
  auto e = solve_equilibrium({3, 10});
  auto o = solve_opt({3, 10});
  auto rep = bounds_report(e, o, 0.1);
  EXPECT_EQ(rep.hard_failures(), 0);
  for (const auto& b : rep.entries)
    if (!b.advisory && b.applicable) {
      EXPECT_TRUE(b.passed) << b.name;
    }
}

TEST(BoundsReport, SmallWBranch) {
  auto e = solve_equilibrium({3, 1.5});
  auto o = solve_opt({3, 1.5});
  auto rep = bounds_report(e, o, 0.1);
  EXPECT_EQ(rep.hard_failures(), 0);
  EXPECT_NEAR(rep.ratios.front().observed, 1.5, 1e-15);
  bool saw_na = false;
  for (const auto& b : rep.entries) saw_na = saw_na || !b.applicable;
  EXPECT_TRUE(saw_na);
}

TEST(BoundsReport, TwoPlayerRatio) {
  auto rep = bounds_report(solve_equilibrium({2, 8}), solve_opt({2, 8}), 0.1);
  EXPECT_NEAR(rep.ratios[0].observed, 4.0, 1e-10);
  EXPECT_NEAR(rep.ratios[1].target, 4.0, 1e-15);
}

TEST(BoundsReport, FlagsViolationsAndMismatch) {
  auto e = solve_equilibrium({4, 10});
  auto o = solve_opt({4, 10});
  auto bad = e;
  bad.per_player.set({4, 0}, 1000.0);  // far above every upper bound
  EXPECT_GT(bounds_report(bad, o, 0.1).hard_failures(), 0);
  EXPECT_THROW(bounds_report(e, solve_opt({4, 11}), 0.1), InvalidParameter);
}
