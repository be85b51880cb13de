#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bneck/bounds.hpp"
#include "bneck/optsolver.hpp"
#include "oracles.hpp"

using namespace bneck;

TEST(OptStageCost, Examples) {
  const std::vector<double> opt{0.0, 0.0};
  for (double p : {0.05, 0.3, 0.41, 0.8, 1.0})
    EXPECT_NEAR(opt_stage_cost(2, p, 8, opt), (2 - 2 * p + 8 * p * p) / (p * (2 - p)),
                1e-13);
  EXPECT_DOUBLE_EQ(opt_stage_cost(1, 1.0, 5, opt), 0.0);
  EXPECT_DOUBLE_EQ(opt_stage_cost(2, 1.0, 8, opt), 8.0);
  EXPECT_THROW(opt_stage_cost(2, 0.0, 8, opt), DivergentCost);
  EXPECT_THROW(opt_stage_cost(3, 0.5, 8, opt), InvalidParameter);
}

TEST(OptStageCost, MatchesDirectFormula) {
  std::vector<double> opt{0.0, 0.0, 2.0, 5.5, 9.0, 14.0};
  for (int m = 1; m <= 6; ++m)
    for (double p : {0.01, 0.2, 0.7, 1.0})
      EXPECT_NEAR(opt_stage_cost(m, p, 13, opt), oracle::stage_cost(m, p, 13, opt),
                  1e-12 * oracle::stage_cost(m, p, 13, opt));
}

TEST(SolveOpt, TwoPlayerExamples) {
  auto s = solve_opt({2, 8});
  EXPECT_NEAR(s.p_at(2), (std::sqrt(15.0) - 1) / 7, 1e-6);
  EXPECT_NEAR(s.total(), std::sqrt(15.0), 1e-9);
  auto one = solve_opt({1, 5});
  EXPECT_EQ(one.total(), 0.0);
  EXPECT_EQ(one.p_at(1), 1.0);
}

TEST(SolveOpt, MatchesTwoPlayerClosedForm) {
  for (double w : {2.5, 8.0, 100.0, 1e4, 1e8}) {
    auto s = solve_opt({2, w});
    auto cf = opt_closed_form_2p(w);
    EXPECT_NEAR(s.p_at(2), cf.p, 1e-6 * cf.p) << w;
    EXPECT_NEAR(s.total(), cf.opt, 1e-6 * cf.opt) << w;
  }
}

TEST(SolveOpt, Invariants) {
  for (int n : {2, 5, 12, 30})
    for (double w : {1.5, 3.0, 50.0, 1e5}) {
      auto s = solve_opt({n, w});
      ASSERT_EQ(s.opt.size(), static_cast<std::size_t>(n + 1));
      EXPECT_EQ(s.opt[0], 0.0);
      EXPECT_EQ(s.opt[1], 0.0);
      for (int m = 2; m <= n; ++m) {
        EXPECT_GT(s.p_at(m), 0.0);
        EXPECT_LE(s.p_at(m), 1.0);
        EXPECT_GT(s.opt[m], s.opt[m - 1]);
        EXPECT_GE(s.opt[m] - s.opt[m - 1], m - 1 - 1e-9);
      }
      EXPECT_GE(s.total(), sc_unrestricted(n) - 1e-9);
      const double heur_l =
          total_cost_evaluate(empty_queue_profile(heuristic_profile_large_w(n, w)), {n, w})
              .total;
      EXPECT_LE(s.total(), heur_l + 1e-9);
      if (w > 2) {
        const double heur_s =
            total_cost_evaluate(empty_queue_profile(heuristic_profile_small_w(n, w)),
                                {n, w})
                .total;
        EXPECT_LE(s.total(), heur_s + 1e-9);
      }
      EXPECT_NEAR(total_cost_evaluate(opt_profile(s), {n, w}).total, s.total(),
                  1e-10 * s.total());
    }
}

TEST(SolveOpt, RecursiveUpperBoundAtComputedP) {
  for (int n : {5, 20})
    for (double w : {3.0, 100.0}) {
      auto s = solve_opt({n, w});
      for (int m = 2; m <= n; ++m) {
        const double alpha = s.p_at(m) * m;
        if (alpha >= m) continue;
        EXPECT_LE(s.opt[m] - s.opt[m - 1], opt_recursive_upper(m, w, alpha) + 1e-9);
      }
    }
}

TEST(SolveOpt, MatchesNestedGridOracle) {
  for (int n = 2; n <= 4; ++n)
    for (double w : {2.5, 10.0, 1e3}) {
      auto s = solve_opt({n, w});
      auto o = oracle::optimum(n, w);
      for (int m = 2; m <= n; ++m) {
        EXPECT_NEAR(s.p_at(m), o.p[m], 1e-5) << "n=" << n << " w=" << w << " m=" << m;
        EXPECT_NEAR(s.opt[m], o.opt[m], 1e-4 * o.opt[m]);
        EXPECT_LE(s.opt[m], o.opt[m] + 1e-12 * o.opt[m]);
      }
    }
}

TEST(OptClosedForm, Examples) {
  auto a = opt_closed_form_2p(8);
  EXPECT_NEAR(a.p, 0.4104261923153453, 1e-15);
  EXPECT_NEAR(a.opt, 3.872983346207417, 1e-15);
  auto b = opt_closed_form_2p(200.5);
  EXPECT_NEAR(b.p, 19 / 199.5, 1e-15);
  EXPECT_NEAR(b.opt, 20.0, 1e-13);
  auto c = opt_closed_form_2p(1 + 1e-6);
  EXPECT_NEAR(c.p, 1.0, 1e-6);
  EXPECT_NEAR(c.opt, std::sqrt(1 + 2e-6), 1e-15);
  // Grid oracle agrees near w = 1 as well.
  EXPECT_NEAR(oracle::optimum(2, 1 + 1e-6).opt[2], c.opt, 1e-6);
  EXPECT_THROW(opt_closed_form_2p(1.0), InvalidParameter);
}

TEST(HeuristicProfiles, Examples) {
  auto s = heuristic_profile_small_w(10, 8);
  EXPECT_EQ(s.size(), 10u);
  EXPECT_EQ(s[0], 1.0);
  EXPECT_NEAR(s[1], std::log(2.0) / 2 * 0.5, 1e-15);
  for (double p : s) {
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
  EXPECT_THROW(heuristic_profile_small_w(5, 2.0), DomainError);

  EXPECT_NEAR(heuristic_profile_large_w(2, 9)[1], 0.25, 1e-15);
  EXPECT_NEAR(heuristic_profile_large_w(5, 101)[4], std::sqrt(8.0 / 100) / 5, 1e-15);
  EXPECT_LT(heuristic_profile_large_w(2, 1e12)[1], 1e-5);
  EXPECT_EQ(heuristic_profile_large_w(3, 1.1)[2], 1.0);  // clamped
}

TEST(ScUnrestricted, Examples) {
  EXPECT_EQ(sc_unrestricted(1), 0.0);
  EXPECT_EQ(sc_unrestricted(2), 1.0);
  EXPECT_EQ(sc_unrestricted(10), 45.0);
  EXPECT_THROW(sc_unrestricted(0), InvalidParameter);
}
