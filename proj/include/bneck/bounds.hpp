#pragma once

// Closed-form bounds on equilibrium and optimal costs, checks of the
// auxiliary inequalities behind them, and a report comparing the bounds with
// solved instances.
//
// Bounds that only hold beyond an unspecified threshold in w or n are
// reported as advisory and never count as failures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bneck/eqsolver.hpp"
#include "bneck/errors.hpp"
#include "bneck/model.hpp"
#include "bneck/optsolver.hpp"

namespace bneck {

// ---------------------------------------------------------------------------
// Equilibrium bounds

/// Per-player lower bound n - 1 (w > 2).
inline double eq_lower_simple(int n) {
  if (n < 1) throw InvalidParameter("eq_lower_simple needs n >= 1");
  return n - 1.0;
}

/// Per-player upper bound n + w(2 + ln n)/2.
inline double eq_upper_small_w(int n, double w) {
  if (n < 2) throw InvalidParameter("eq_upper_small_w needs n >= 2");
  if (!(w > 2.0)) throw DomainError("eq_upper_small_w needs w > 2");
  return n + w * (2.0 + std::log(n)) / 2.0;
}

/// Per-player upper bound e/(e-1) n + (1+eps) sqrt(w) sqrt(n + 2 sqrt(n-1)).
/// Holds for every w > 2 at eps = 1; smaller eps needs w large enough.
inline double eq_upper_large_w(int n, double w, double eps) {
  if (n < 2) throw InvalidParameter("eq_upper_large_w needs n >= 2");
  if (!(w > 2.0)) throw DomainError("eq_upper_large_w needs w > 2");
  if (!(eps > 0.0 && eps <= 1.0))
    throw InvalidParameter("eq_upper_large_w needs eps in (0,1]");
  const double e = std::numbers::e;
  return e / (e - 1.0) * n +
         (1.0 + eps) * std::sqrt(w) * std::sqrt(n + 2.0 * std::sqrt(n - 1.0));
}

struct EqLowerLargeW {
  double sum_form = 0.0;
  double simplified = 0.0;
};

/// Per-player lower bounds for large w:
///   (1-2eps)^(n-1) sqrt(w)/2 sum_{i<n} 1/(1+sqrt i)
///   (1-2eps)^(n-1) sqrt(w (n - 2 ln n)).
inline EqLowerLargeW eq_lower_large_w(int n, double w, double eps) {
  if (n < 2) throw InvalidParameter("eq_lower_large_w needs n >= 2");
  if (!(w > 1.0)) throw InvalidParameter("eq_lower_large_w needs w > 1");
  if (!(eps > 0.0 && eps < 0.5))
    throw InvalidParameter("eq_lower_large_w needs eps in (0,0.5)");
  const double factor = std::pow(1.0 - 2.0 * eps, n - 1);
  double sum = 0.0;
  for (int i = 1; i < n; ++i) sum += 1.0 / (1.0 + std::sqrt(i));
  return {factor * std::sqrt(w) / 2.0 * sum,
          factor * std::sqrt(w * (n - 2.0 * std::log(n)))};
}

/// Lower bound on q(m, k): max(0, (2/w)(1 - k(w-1)/(m-1))).
inline double entry_prob_lower(int m, int k, double w) {
  if (m < 2 || k < 0) throw InvalidParameter("entry_prob_lower needs m >= 2");
  if (!(w > 2.0)) throw DomainError("entry_prob_lower needs w > 2");
  return std::max(0.0, 2.0 / w * (1.0 - k * (w - 1.0) / (m - 1.0)));
}

// ---------------------------------------------------------------------------
// Optimum bounds

/// Upper bound on OPT(m) - OPT(m-1) when p_m = alpha/m.
inline double opt_recursive_upper(int m, double w, double alpha) {
  if (m < 2) throw InvalidParameter("opt_recursive_upper needs m >= 2");
  if (!(alpha > 0.0 && alpha < m))
    throw InvalidParameter("opt_recursive_upper needs 0 < alpha < m");
  const double ratio = m / (m - alpha);
  const double num = m * std::exp(-alpha) + (w - 1.0) / 2.0 * alpha * alpha *
                                                ratio * ratio *
                                                std::exp(alpha * alpha / (m - alpha));
  return m - 1.0 + num / -std::expm1(-alpha);
}

struct OptBoundsLargeW {
  double lower_sum = 0.0;     // (1-eps) sqrt(2w) sum_{i<n} sqrt i
  double upper_sum = 0.0;     // (1+eps) sqrt(2w) sum_{i<=n} sqrt i
  double lower_closed = 0.0;  // (1-eps) sqrt(2w) (2/3)(n-1)^(3/2)
  double upper_closed = 0.0;  // (1+eps) sqrt(2w) ((2/3) n^(3/2) + sqrt n)
};

inline OptBoundsLargeW opt_bounds_large_w(int n, double w, double eps) {
  if (n < 2) throw InvalidParameter("opt_bounds_large_w needs n >= 2");
  if (!(w > 1.0)) throw InvalidParameter("opt_bounds_large_w needs w > 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw InvalidParameter("opt_bounds_large_w needs eps in (0,1)");
  const double s = std::sqrt(2.0 * w);
  double below = 0.0;
  for (int i = 1; i < n; ++i) below += std::sqrt(i);
  const double upto = below + std::sqrt(n);
  const double nm1 = n - 1.0;
  return {(1.0 - eps) * s * below, (1.0 + eps) * s * upto,
          (1.0 - eps) * s * (2.0 / 3.0) * nm1 * std::sqrt(nm1),
          (1.0 + eps) * s * ((2.0 / 3.0) * n * std::sqrt(n) + std::sqrt(n))};
}

struct RatioTargets {
  double fixed_w = 2.0;         // eq / SC as n grows
  double large_w_eq_sc = 0.0;   // 2 sqrt(w/n)
  double large_w_eq_opt = 0.0;  // 3/(2 sqrt 2)
};

inline RatioTargets ratio_targets(int n, double w) {
  if (n < 2) throw InvalidParameter("ratio_targets needs n >= 2");
  if (!(w > 1.0)) throw InvalidParameter("ratio_targets needs w > 1");
  return {2.0, 2.0 * std::sqrt(w / n), 3.0 / (2.0 * std::sqrt(2.0))};
}

// ---------------------------------------------------------------------------
// Nice bound functions

struct NiceBoundFunction {
  std::string name;
  std::function<double(int m, int k)> phi;
};

/// m + k + sqrt(w/2) + sum_{i<m} w/(2i).
inline NiceBoundFunction phi_A(double w) {
  return {"phi_A", [w](int m, int k) {
            double h = 0.0;
            for (int i = 1; i < m; ++i) h += 1.0 / i;
            return m + k + std::sqrt(w / 2.0) + w / 2.0 * h;
          }};
}

/// e/(e-1)(m + k) + (1+eps) sqrt(w) sqrt(m + 2 sqrt(m-1)).
inline NiceBoundFunction phi_B(double w, double eps) {
  return {"phi_B", [w, eps](int m, int k) {
            const double e = std::numbers::e;
            return e / (e - 1.0) * (m + k) +
                   (1.0 + eps) * std::sqrt(w) *
                       std::sqrt(m + 2.0 * std::sqrt(std::max(0, m - 1)));
          }};
}

struct NiceWitness {
  int condition = 0;  // 1 or 2
  QueueState at;
  QueueState other;  // the (m', k') dominating `at` for condition 2
  double margin = 0.0;
};

struct NiceCheckResult {
  std::string name;
  int n_max = 0;
  long long condition1_failures = 0;
  long long condition2_failures = 0;
  std::vector<NiceWitness> witnesses;  // first few failures

  bool passed() const {
    return condition1_failures == 0 && condition2_failures == 0;
  }
};

/// Checks, for 1 <= m, m' <= n_max and 0 <= k, k' <= n_max:
///   (1) phi(m,k) - phi(m,0) >= k
///   (2) phi(m,k) >= phi(m',k') whenever m >= m' and m+k >= m'+k'.
/// Condition 2 is checked against a running maximum over the dominated
/// region rather than pair by pair.
inline NiceCheckResult nice_function_check(const NiceBoundFunction& f,
                                           int n_max,
                                           std::size_t max_witnesses = 10) {
  if (n_max < 2) throw InvalidParameter("nice_function_check needs n_max >= 2");
  const int N = n_max;
  const int T = 2 * N;
  auto idx = [N](int m, int k) {
    return static_cast<std::size_t>(m) * (N + 1) + k;
  };
  std::vector<double> phi(static_cast<std::size_t>(N + 1) * (N + 1));
  for (int m = 1; m <= N; ++m)
    for (int k = 0; k <= N; ++k) phi[idx(m, k)] = f.phi(m, k);
  auto slack = [](double v) { return 1e-12 * std::max(1.0, std::abs(v)); };

  NiceCheckResult res;
  res.name = f.name;
  res.n_max = N;
  auto note = [&](NiceWitness w) {
    if (res.witnesses.size() < max_witnesses) res.witnesses.push_back(w);
  };
  for (int m = 1; m <= N; ++m)
    for (int k = 1; k <= N; ++k) {
      const double margin = phi[idx(m, k)] - phi[idx(m, 0)] - k;
      if (margin < -slack(phi[idx(m, k)])) {
        ++res.condition1_failures;
        note({1, {m, k}, {m, 0}, margin});
      }
    }

  // best[t] after processing m: max of phi(m',k') over m' <= m, m'+k' <= t.
  struct Best {
    double v = -std::numeric_limits<double>::infinity();
    QueueState at;
  };
  std::vector<Best> best(static_cast<std::size_t>(T) + 1);
  for (int m = 1; m <= N; ++m) {
    // Fold in row m: max over k' <= min(N, t-m) of phi(m,k').
    Best run;
    for (int t = m; t <= T; ++t) {
      const int k = t - m;
      if (k <= N && phi[idx(m, k)] > run.v) run = {phi[idx(m, k)], {m, k}};
      if (run.v > best[t].v) best[t] = run;
    }
    for (int k = 0; k <= N; ++k) {
      const auto& b = best[static_cast<std::size_t>(m + k)];
      const double margin = phi[idx(m, k)] - b.v;
      if (margin < -slack(phi[idx(m, k)])) {
        ++res.condition2_failures;
        note({2, {m, k}, b.at, margin});
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Auxiliary inequalities

struct LemmaCheck {
  std::string name;
  long long checked = 0;
  long long failures = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // rhs - lhs
  std::string witness;

  bool passed() const { return failures == 0; }
};

namespace detail {

// Records lhs <= rhs with a 1e-12 slack relative to `scale`, the magnitude of
// the terms involved.
inline void record_le(LemmaCheck& c, double lhs, double rhs, double scale,
                      const std::string& where) {
  ++c.checked;
  const double margin = rhs - lhs;
  if (margin < c.worst_margin) c.worst_margin = margin;
  if (!(margin >= -1e-12 * std::max(1.0, scale))) {
    if (c.failures == 0) c.witness = where;
    ++c.failures;
  }
}

inline std::string at(int n, double p) {
  return "n=" + std::to_string(n) + " p=" + std::to_string(p);
}

}  // namespace detail

/// Random and boundary checks of the five inequalities used in the bounds:
///   1. 1 - pn <= (1-p)^n <= 1 - pn + p^2 C(n,2)
///   2. p < 2/(n-1)  =>  1/(1-(1-p)^n) <= 2/((2 - p(n-1)) p n)
///   3. p >= p0      =>  1/(1-(1-p)^n) <= e^(n p0)/(e^(n p0) - 1)
///   4. sqrt n + 1 + 1/(2(sqrt n + 1)) <= 1 + sqrt(n+1)
///   5. sum_{i<=m} 1/(1+sqrt i) >= 2(sqrt(m+1) - ln(1+sqrt(m+1)) - 1 + ln 2)
/// The two inverse-power checks only sample p > 0, where both sides are finite.
inline std::vector<LemmaCheck> aux_lemma_validators(long long samples,
                                                    std::uint64_t seed) {
  if (samples < 1) throw InvalidParameter("aux_lemma_validators needs samples >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_dist(2, 1000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> big_n(1, 1000000);

  auto named = [](const char* name) {
    LemmaCheck c;
    c.name = name;
    return c;
  };
  LemmaCheck l1 = named("power_sandwich"), l2 = named("small_p_inverse"),
             l3 = named("large_p_inverse"), l4 = named("sqrt_step"),
             l5 = named("harmonic_sqrt_sum");

  auto check1 = [&](int n, double p) {
    const double pw = std::pow(1.0 - p, n);
    const double c2 = n * (n - 1.0) / 2.0;
    const double scale = std::max(p * n, p * p * c2);
    detail::record_le(l1, 1.0 - p * n, pw, scale, detail::at(n, p));
    detail::record_le(l1, pw, 1.0 - p * n + p * p * c2, scale, detail::at(n, p));
  };
  auto check2 = [&](int n, double p) {
    if (!(p > 0.0 && p < 2.0 / (n - 1))) return;
    const double lhs = 1.0 / prob_any(n, p);
    const double rhs = 1.0 / (2.0 - p * (n - 1)) * (2.0 / (p * n));
    detail::record_le(l2, lhs, rhs, rhs, detail::at(n, p));
  };
  auto check3 = [&](int n, double p0, double p) {
    if (!(p0 > 0.0 && p >= p0 && p <= 1.0)) return;
    const double lhs = 1.0 / prob_any(n, p);
    const double rhs = 1.0 / -std::expm1(-n * p0);
    detail::record_le(l3, lhs, rhs, rhs,
                      detail::at(n, p) + " p0=" + std::to_string(p0));
  };
  auto check4 = [&](int n) {
    const double r = std::sqrt(n);
    const double rhs = 1.0 + std::sqrt(n + 1.0);
    detail::record_le(l4, r + 1.0 + 1.0 / (2.0 * (r + 1.0)), rhs, rhs,
                      "n=" + std::to_string(n));
  };

  for (long long s = 0; s < samples; ++s) {
    const int n = n_dist(rng);
    const double p = unit(rng);
    check1(n, p);
    check2(n, unit(rng) * 2.0 / (n - 1));
    const double p0 = unit(rng);
    check3(n, p0, p0 + (1.0 - p0) * unit(rng));
    check4(big_n(rng));
  }

  // Boundary cases.
  for (int n : {2, 3, 4, 10, 100, 1000}) {
    const double edge = 2.0 / (n - 1);
    const double near_edge = edge * (1.0 - 1e-9);
    for (double p : {0.0, 1.0 / n, std::min(1.0, near_edge), 1.0}) {
      check1(n, p);
      check2(n, p);
      check3(n, p, p);
      if (p > 0.0) check3(n, p, 1.0);
    }
    check4(n);
  }
  check4(1);

  // The sum inequality is deterministic in m; check a contiguous range plus large m.
  double sum = 0.0;
  auto rhs5 = [](double m) {
    const double r = std::sqrt(m + 1.0);
    return 2.0 * (r - std::log1p(r) - 1.0 + std::log(2.0));
  };
  for (int m = 1; m <= 100000; ++m) {
    sum += 1.0 / (1.0 + std::sqrt(m));
    if (m <= 1000 || m % 997 == 0 || m == 100000)
      detail::record_le(l5, rhs5(m), sum, sum, "m=" + std::to_string(m));
  }
  return {l1, l2, l3, l4, l5};
}

// ---------------------------------------------------------------------------
// Vanishing entry probabilities at large w

struct VanishingEntry {
  int m = 0;
  double scaled_q = 0.0;  // q(m,0) * (m-1)
  bool holds = false;
};

struct ProbVanishingReport {
  double eps = 0.0;
  std::vector<VanishingEntry> empty_queue;  // m = 2..n
  long long queued_states = 0;
  long long queued_nonzero = 0;  // states with k >= 1 and q > tol
  QueueState first_nonzero{0, 0};

  bool all_hold() const {
    if (queued_nonzero != 0) return false;
    for (const auto& e : empty_queue)
      if (!e.holds) return false;
    return true;
  }
};

/// Whether q(m,0)(m-1) <= eps for every m and q(m,k) = 0 for every k >= 1.
/// Advisory: both only hold once w is past an unspecified threshold.
inline ProbVanishingReport prob_vanishing_check(const EquilibriumSolution& eq,
                                                double eps, double tol = 1e-12) {
  if (!(eq.params.w > 2.0)) throw DomainError("prob_vanishing_check needs w > 2");
  ProbVanishingReport rep;
  rep.eps = eps;
  for (int m = 2; m <= eq.params.n; ++m) {
    const double v = eq.profile.q({m, 0}) * (m - 1);
    rep.empty_queue.push_back({m, v, v <= eps});
  }
  for (auto s : enumerate_states(eq.params.n)) {
    if (s.m < 2 || s.k < 1) continue;
    ++rep.queued_states;
    if (eq.profile.q(s) > tol) {
      if (rep.queued_nonzero == 0) rep.first_nonzero = s;
      ++rep.queued_nonzero;
    }
  }
  return rep;
}

struct VanishingTrend {
  std::vector<double> w_values;
  std::vector<std::vector<double>> scaled_q;  // [w index][m - 2]
  bool non_increasing = true;
};

/// q(m,0)(m-1) for each w in `w_values` (ascending), and whether it is
/// non-increasing in w for every m.
inline VanishingTrend prob_vanishing_trend(int n, std::vector<double> w_values,
                                           const SolverOptions& opt = {}) {
  if (n < 2) throw InvalidParameter("prob_vanishing_trend needs n >= 2");
  std::sort(w_values.begin(), w_values.end());
  VanishingTrend tr{w_values, {}, true};
  for (double w : w_values) {
    auto eq = solve_equilibrium({n, w}, opt);
    std::vector<double> row;
    for (int m = 2; m <= n; ++m) row.push_back(eq.profile.q({m, 0}) * (m - 1));
    if (!tr.scaled_q.empty())
      for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] > tr.scaled_q.back()[j] * (1.0 + 1e-9)) tr.non_increasing = false;
    tr.scaled_q.push_back(std::move(row));
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Report

enum class Direction { AtMost, AtLeast };  // observed vs bound

struct BoundEntry {
  std::string name;
  std::string relation;  // human-readable inequality
  double bound = 0.0;
  double observed = 0.0;
  Direction direction = Direction::AtMost;
  bool passed = true;
  bool advisory = false;
  bool applicable = true;  // false when the bound's preconditions fail
};

struct RatioEntry {
  std::string name;
  double observed = 0.0;
  double target = 0.0;
};

struct BoundsReport {
  GameParams params;
  double eps_used = 0.0;
  std::vector<BoundEntry> entries;
  std::vector<RatioEntry> ratios;

  int hard_failures() const {
    int f = 0;
    for (const auto& e : entries)
      if (!e.advisory && e.applicable && !e.passed) ++f;
    return f;
  }
};

namespace detail {

inline bool compare_within(double observed, double bound, Direction d) {
  const double slack = 1e-9 * std::abs(bound) + 1e-12;
  return d == Direction::AtMost ? observed <= bound + slack
                                : observed >= bound - slack;
}

}  // namespace detail

/// One entry per bound with the observed value from `eq` and `opt`. Hard
/// entries hold for every instance in their range; advisory ones only past an
/// unspecified threshold. Entries whose range excludes this instance are
/// marked not applicable.
inline BoundsReport bounds_report(const EquilibriumSolution& eq,
                                  const OptSolution& opt, double eps) {
  if (!(eq.params == opt.params))
    throw InvalidParameter("bounds_report: eq and opt solve different games");
  const int n = eq.params.n;
  const double w = eq.params.w;
  if (n < 2) throw InvalidParameter("bounds_report needs n >= 2");
  if (!(eps > 0.0 && eps <= 1.0))
    throw InvalidParameter("bounds_report needs eps in (0,1]");
  const bool big_w = w > 2.0;
  const double c_n = eq.cost_per_player();
  const double opt_n = opt.total();
  const double sc = sc_unrestricted(n);

  BoundsReport rep{eq.params, eps, {}, {}};
  auto add = [&](std::string name, std::string rel, double bound, double obs,
                 Direction d, bool advisory, bool applicable = true) {
    BoundEntry e{std::move(name), std::move(rel), bound, obs, d, true, advisory,
                 applicable};
    e.passed = applicable ? detail::compare_within(obs, bound, d) : true;
    rep.entries.push_back(std::move(e));
  };
  auto skip = [&](std::string name, std::string rel, Direction d, bool advisory) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    add(std::move(name), std::move(rel), nan, nan, d, advisory, false);
  };

  if (big_w) {
    add("eq_lower_simple", "c(n,0) >= n-1", eq_lower_simple(n), c_n,
        Direction::AtLeast, false);
    double worst = std::numeric_limits<double>::infinity();
    for (auto s : enumerate_states(n))
      worst = std::min(worst, eq.per_player.at(s) - (s.total() - 1.0));
    add("eq_lower_simple_all_states", "min c(m,k) - (m+k-1) >= 0", 0.0, worst,
        Direction::AtLeast, false);
    add("eq_upper_small_w", "c(n,0) <= n + w(2+ln n)/2", eq_upper_small_w(n, w),
        c_n, Direction::AtMost, false);
    add("eq_upper_large_w_eps1",
        "c(n,0) <= e/(e-1) n + 2 sqrt(w) sqrt(n+2 sqrt(n-1))",
        eq_upper_large_w(n, w, 1.0), c_n, Direction::AtMost, false);
    if (eps < 1.0)
      add("eq_upper_large_w", "c(n,0) <= e/(e-1) n + (1+eps) sqrt(w) sqrt(n+2 sqrt(n-1))",
          eq_upper_large_w(n, w, eps), c_n, Direction::AtMost, true);
    add("entry_prob_lower", "q(n,0) >= 2/w", entry_prob_lower(n, 0, w),
        eq.q_n0(), Direction::AtLeast, false);
    double worst_q = std::numeric_limits<double>::infinity();
    for (auto s : enumerate_states(n))
      if (s.m >= 2)
        worst_q = std::min(worst_q, eq.profile.q(s) - entry_prob_lower(s.m, s.k, w));
    add("entry_prob_lower_all_states", "min q(m,k) - lower(m,k) >= 0", 0.0,
        worst_q, Direction::AtLeast, false);
    // Expected wait for the next entrant fits under the increment of phi_A.
    auto fa = phi_A(w);
    double worst_step = std::numeric_limits<double>::infinity();
    for (int m = 2; m <= n; ++m) {
      const double lhs = 1.0 / prob_any(m - 1, eq.profile.q({m, 0})) + fa.phi(m - 1, 0);
      worst_step = std::min(worst_step, fa.phi(m, 0) - lhs);
    }
    add("expected_time_step", "min phi_A(m,0) - phi_A(m-1,0) - 1/P(entry) >= 0",
        0.0, worst_step, Direction::AtLeast, false);
  } else {
    skip("eq_lower_simple", "c(n,0) >= n-1 (needs w > 2)", Direction::AtLeast, false);
    skip("eq_upper_small_w", "c(n,0) <= n + w(2+ln n)/2 (needs w > 2)",
         Direction::AtMost, false);
    skip("eq_upper_large_w_eps1", "needs w > 2", Direction::AtMost, false);
    skip("entry_prob_lower", "q(n,0) >= 2/w (needs w > 2)", Direction::AtLeast, false);
    add("small_w_all_enter_cost", "n c(n,0) = w n(n-1)/2", w * sc, eq.total_cost,
        Direction::AtMost, false);
    add("small_w_all_enter_cost_lower", "n c(n,0) = w n(n-1)/2", w * sc,
        eq.total_cost, Direction::AtLeast, false);
    add("small_w_q_n0", "q(n,0) = 1", 1.0, eq.q_n0(), Direction::AtLeast, false);
  }

  if (eps < 0.5) {
    auto lo = eq_lower_large_w(n, w, eps);
    add("eq_lower_large_w_sum", "c(n,0) >= (1-2eps)^(n-1) sqrt(w)/2 sum 1/(1+sqrt i)",
        lo.sum_form, c_n, Direction::AtLeast, true);
    add("eq_lower_large_w_simplified", "c(n,0) >= (1-2eps)^(n-1) sqrt(w(n-2 ln n))",
        lo.simplified, c_n, Direction::AtLeast, true);
  } else {
    skip("eq_lower_large_w_sum", "needs eps < 0.5", Direction::AtLeast, true);
    skip("eq_lower_large_w_simplified", "needs eps < 0.5", Direction::AtLeast, true);
  }

  add("opt_lower_sc", "OPT(n) >= n(n-1)/2", sc, opt_n, Direction::AtLeast, false);
  const double heur_large =
      total_cost_evaluate(empty_queue_profile(heuristic_profile_large_w(n, w)),
                          eq.params)
          .total;
  add("opt_upper_heuristic_large_w", "OPT(n) <= cost of large-w heuristic",
      heur_large, opt_n, Direction::AtMost, false);
  if (big_w) {
    const double heur_small =
        total_cost_evaluate(empty_queue_profile(heuristic_profile_small_w(n, w)),
                            eq.params)
            .total;
    add("opt_upper_heuristic_small_w", "OPT(n) <= cost of small-w heuristic",
        heur_small, opt_n, Direction::AtMost, false);
    double worst_inc = std::numeric_limits<double>::infinity();
    for (int m = 2; m <= n; ++m) {
      const double alpha = opt.p_at(m) * m;
      if (!(alpha > 0.0 && alpha < m)) continue;
      const double inc = opt.opt[m] - opt.opt[m - 1];
      worst_inc = std::min(worst_inc, opt_recursive_upper(m, w, alpha) - inc);
    }
    if (std::isfinite(worst_inc))
      add("opt_recursive_upper", "min bound(m, p_m m) - (OPT(m)-OPT(m-1)) >= 0",
          0.0, worst_inc, Direction::AtLeast, false);
    else
      skip("opt_recursive_upper", "no stage with 0 < p_m m < m", Direction::AtLeast,
           false);
  } else {
    skip("opt_upper_heuristic_small_w", "needs w > 2", Direction::AtMost, false);
    skip("opt_recursive_upper", "needs w > 2", Direction::AtLeast, false);
  }
  double worst_gap = std::numeric_limits<double>::infinity();
  for (int m = 2; m <= n; ++m)
    worst_gap = std::min(worst_gap, opt.opt[m] - opt.opt[m - 1] - (m - 1.0));
  add("opt_increment_lower", "min OPT(m)-OPT(m-1)-(m-1) >= 0", 0.0, worst_gap,
      Direction::AtLeast, false);

  if (eps < 1.0) {
    auto ob = opt_bounds_large_w(n, w, eps);
    add("opt_lower_large_w_sum", "OPT(n) >= (1-eps) sqrt(2w) sum_{i<n} sqrt i",
        ob.lower_sum, opt_n, Direction::AtLeast, true);
    add("opt_upper_large_w_sum", "OPT(n) <= (1+eps) sqrt(2w) sum_{i<=n} sqrt i",
        ob.upper_sum, opt_n, Direction::AtMost, true);
    add("opt_lower_large_w_closed", "OPT(n) >= (1-eps) sqrt(2w) (2/3)(n-1)^1.5",
        ob.lower_closed, opt_n, Direction::AtLeast, true);
    add("opt_upper_large_w_closed", "OPT(n) <= (1+eps) sqrt(2w) ((2/3)n^1.5 + sqrt n)",
        ob.upper_closed, opt_n, Direction::AtMost, true);
  }

  if (big_w) {
    auto pv = prob_vanishing_check(eq, eps);
    double worst = 0.0;
    for (const auto& e : pv.empty_queue) worst = std::max(worst, e.scaled_q);
    add("prob_vanishing_empty_queue", "max q(m,0)(m-1) <= eps", eps, worst,
        Direction::AtMost, true);
    add("prob_vanishing_queued", "states with k >= 1 and q > 0", 0.0,
        static_cast<double>(pv.queued_nonzero), Direction::AtMost, true);
  }

  auto t = ratio_targets(n, w);
  const double r_eq_sc = eq.total_cost / sc;
  rep.ratios.push_back({"ratio_eq_sc_fixed_w", r_eq_sc, t.fixed_w});
  rep.ratios.push_back({"ratio_eq_sc_large_w", r_eq_sc, t.large_w_eq_sc});
  rep.ratios.push_back({"ratio_eq_opt_large_w", eq.total_cost / opt_n, t.large_w_eq_opt});
  rep.ratios.push_back({"ratio_opt_sc", opt_n / sc, std::numeric_limits<double>::quiet_NaN()});
  return rep;
}

}  // namespace bneck
