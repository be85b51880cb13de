#pragma once

// Symmetric equilibria in anonymous stationary strategies, computed by
// backward induction over states. At each state the entry probability either
// makes an outside agent indifferent between entering and waiting, or sits
// at a corner where one action is strictly better.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bneck/errors.hpp"
#include "bneck/model.hpp"
#include "bneck/numeric.hpp"

namespace bneck {

enum class RootPolicy { SmallestQ, LargestQ };

inline const char* to_string(RootPolicy p) {
  return p == RootPolicy::SmallestQ ? "smallest" : "largest";
}

struct SolverOptions {
  RootPolicy policy = RootPolicy::SmallestQ;
  int grid_points = 512;
  double tol = 1e-12;
  int max_iter = 200;
};

struct StateSolution {
  double q = 0.0;
  double cost = 0.0;
  int root_count = 0;  // equilibrium candidates found at this state
  double residual = 0.0;
};

struct StateDiagnostics {
  QueueState state;
  int root_count = 0;
  double residual = 0.0;
};

struct EquilibriumSolution {
  GameParams params;
  EntryProfile profile;
  CostTable per_player;
  double total_cost = 0.0;  // n * per_player(n, 0)
  RootPolicy policy = RootPolicy::SmallestQ;
  std::vector<StateDiagnostics> diagnostics;

  double q_n0() const { return profile.q({params.n, 0}); }
  double cost_per_player() const { return per_player.at({params.n, 0}); }
};

/// cost_enter - cost_wait at q. Negative means entering is strictly better.
inline double indifference_gap(QueueState s, double q, double w,
                               const CostTable& continuation) {
  return cost_enter(s, q, w) - cost_wait(s, q, w, continuation);
}

namespace detail {

struct Candidate {
  double q;
  double cost;
  double residual;
};

}  // namespace detail

/// Equilibrium entry probability at one state, given equilibrium costs for
/// every state with one fewer agent in the system.
///
/// The gap is sign-scanned on a grid (log-spaced near zero plus uniform) and
/// every sign change is refined by bisection. Corners count as candidates when
/// the corner action is strictly preferred there: q = 1 when entering beats
/// waiting at q = 1, and q = 0 (non-empty queue only) when waiting beats
/// entering at q = 0. The policy picks among all candidates.
///
/// At an empty queue waiting diverges as q -> 0, so the scan starts from a
/// point found by halving 1/(m-1) until the gap is negative and q is below
/// sqrt(2/w)/(m-1); no root lies below that point.
inline StateSolution solve_state(QueueState s, double w,
                                 const CostTable& continuation,
                                 const SolverOptions& opt = {}) {
  if (s.m < 1 || s.k < 0) throw InvalidParameter("solve_state needs m >= 1");
  if (!(w > 1.0)) throw InvalidParameter("solve_state needs w > 1");
  if (s.m == 1) return {s.k == 0 ? 1.0 : 0.0, static_cast<double>(s.k), 1, 0.0};
  if (opt.grid_points < 4) throw InvalidParameter("grid_points must be >= 4");
  detail::check_continuation(s, continuation);

  std::vector<double> row(static_cast<std::size_t>(s.m));
  auto wait = [&](double q) {
    return detail::cost_wait_unchecked(s, q, continuation, row);
  };
  auto gap = [&](double q) { return cost_enter(s, q, w) - wait(q); };
  auto accept = [&](double q, double g) {
    return std::abs(g) <= opt.tol * std::max(1.0, cost_enter(s, q, w));
  };

  std::vector<double> grid;
  if (s.k == 0) {
    const double safe = std::sqrt(2.0 / w) / (s.m - 1);
    double lo = 1.0 / (s.m - 1);
    while (lo > safe || gap(lo) >= 0.0) {
      lo /= 2.0;
      if (lo < 1e-300)
        throw InternalInconsistency("no negative gap near q=0 at " +
                                    to_string(s));
    }
    grid = numeric::mixed_grid(lo, std::max(lo, std::min(0.5, 1.0 / (s.m - 1))),
                               1.0, opt.grid_points);
  } else {
    grid = numeric::mixed_grid(1e-12, std::min(0.5, 1.0 / s.m), 1.0,
                               opt.grid_points - 1);
    grid.insert(grid.begin(), 0.0);
  }

  std::vector<double> g(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) g[j] = gap(grid[j]);

  std::vector<detail::Candidate> cands;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (g[j] == 0.0) {
      cands.push_back({grid[j], cost_enter(s, grid[j], w), 0.0});
      continue;
    }
    if (j + 1 < grid.size() && g[j + 1] != 0.0 &&
        (g[j] < 0.0) != (g[j + 1] < 0.0)) {
      auto r = numeric::bisect(gap, grid[j], grid[j + 1], g[j], g[j + 1],
                               accept, opt.max_iter);
      cands.push_back({r.x, cost_enter(s, r.x, w), std::abs(r.fx)});
    }
  }
  if (g.back() < 0.0) cands.push_back({1.0, cost_enter(s, 1.0, w), 0.0});
  if (s.k >= 1 && g.front() > 0.0) cands.push_back({0.0, wait(0.0), 0.0});

  if (cands.empty())
    throw InternalInconsistency("no equilibrium candidate at state " +
                                to_string(s));
  std::sort(cands.begin(), cands.end(),
            [](const auto& a, const auto& b) { return a.q < b.q; });
  const auto& pick =
      opt.policy == RootPolicy::SmallestQ ? cands.front() : cands.back();
  return {pick.q, pick.cost, static_cast<int>(cands.size()), pick.residual};
}

/// Backward induction over all states of G(n; w). Lone agents enter an empty
/// queue and otherwise wait, so c(1, k) = k. For w <= 2 entering an empty
/// queue is dominant and those states are set to q = 1 directly.
inline EquilibriumSolution solve_equilibrium(const GameParams& params,
                                             const SolverOptions& opt = {}) {
  params.validate(1);
  const int n = params.n;
  const double w = params.w;
  EquilibriumSolution sol{params, EntryProfile(n),
                          CostTable(CostRole::PerOutsidePlayer, n), 0.0,
                          opt.policy, {}};
  for (auto s : enumerate_states(n)) {
    StateSolution r;
    if (s.m == 1) {
      r = {s.k == 0 ? 1.0 : 0.0, static_cast<double>(s.k), 1, 0.0};
    } else if (w <= 2.0 && s.k == 0) {
      r = {1.0, (s.m - 1) * w / 2.0, 1, 0.0};
    } else {
      r = solve_state(s, w, sol.per_player, opt);
    }
    sol.profile.set(s, r.q);
    sol.per_player.set(s, r.cost);
    sol.diagnostics.push_back({s, r.root_count, r.residual});
  }
  sol.total_cost = n * sol.per_player.at({n, 0});
  return sol;
}

/// Per-player cost of every state when all agents follow `profile`. Used to
/// audit profiles that did not come out of the solver. Empty-queue states
/// where nobody enters get +inf.
inline CostTable evaluate_per_player(const EntryProfile& profile,
                                     const GameParams& params) {
  params.validate(1);
  if (profile.n() != params.n)
    throw InvalidParameter("profile and game disagree on n");
  if (!profile.complete())
    throw InvalidParameter("profile lacks state " +
                           to_string(profile.missing_states().front()));
  const double inf = std::numeric_limits<double>::infinity();
  CostTable c(CostRole::PerOutsidePlayer, params.n);
  std::vector<double> row(static_cast<std::size_t>(params.n));
  for (auto s : enumerate_states(params.n)) {
    const double q = profile.q(s);
    const double enter = cost_enter(s, q, params.w);
    fill_binom_row(s.m - 1, q, row);
    if (s.k == 0) {
      if (q == 0.0) {
        c.set(s, inf);
        continue;
      }
      // c = q*enter + (1-q)*(1 + row0*c + sum_{i>=1} row_i c(next))
      double rest = 1.0;
      for (int i = 1; i < s.m; ++i)
        if (row[i] > 0.0) rest += row[i] * c.raw(s.m - i, i - 1);
      c.set(s, (q * enter + (1.0 - q) * rest) / (1.0 - (1.0 - q) * row[0]));
    } else {
      double wait = 1.0;
      for (int i = 0; i < s.m; ++i)
        if (row[i] > 0.0) wait += row[i] * c.raw(s.m - i, s.k + i - 1);
      c.set(s, q * enter + (1.0 - q) * wait);
    }
  }
  return c;
}

/// Wraps an arbitrary profile as a candidate solution so it can be audited by
/// verify_equilibrium.
inline EquilibriumSolution candidate_from_profile(const EntryProfile& profile,
                                                  const GameParams& params) {
  EquilibriumSolution sol{params, profile, evaluate_per_player(profile, params),
                          0.0, RootPolicy::SmallestQ, {}};
  sol.total_cost = params.n * sol.per_player.at({params.n, 0});
  return sol;
}

struct StateCheck {
  QueueState state;
  double q = 0.0;
  double cost = 0.0;
  double cost_enter = 0.0;
  double cost_wait = 0.0;
  double residual = 0.0;
  bool passed = true;
  std::string reason;
};

struct VerificationReport {
  std::vector<StateCheck> states;
  double worst_residual = 0.0;

  bool passed() const {
    return std::all_of(states.begin(), states.end(),
                       [](const StateCheck& c) { return c.passed; });
  }
  std::vector<StateCheck> failures() const {
    std::vector<StateCheck> out;
    for (const auto& c : states)
      if (!c.passed) out.push_back(c);
    return out;
  }
};

/// Checks every state of a candidate solution: indifference at interior q,
/// the corner preference at q in {0, 1}, that the stored cost is the cost of
/// the prescribed play, and that neither pure deviation is cheaper. Each
/// residual is compared against tol * max(1, c(m, k)).
inline VerificationReport verify_equilibrium(const EquilibriumSolution& sol,
                                             double tol = 1e-9) {
  const int n = sol.params.n;
  const double w = sol.params.w;
  const double inf = std::numeric_limits<double>::infinity();
  VerificationReport rep;
  std::vector<double> row(static_cast<std::size_t>(n));
  for (auto s : enumerate_states(n)) {
    StateCheck chk;
    chk.state = s;
    chk.q = sol.profile.q(s);
    chk.cost = sol.per_player.at(s);
    const double q = chk.q;
    chk.cost_enter = cost_enter(s, q, w);
    if (s.k == 0 && (s.m == 1 || q == 0.0)) {
      chk.cost_wait = inf;
    } else {
      chk.cost_wait =
          detail::cost_wait_unchecked(s, q, sol.per_player, row);
    }

    double cond = 0.0;
    double played = 0.0;
    if (q == 0.0) {
      cond = std::max(0.0, chk.cost_wait - chk.cost_enter);
      played = chk.cost_wait;
    } else if (q == 1.0) {
      cond = std::max(0.0, chk.cost_enter - chk.cost_wait);
      played = chk.cost_enter;
    } else {
      cond = std::abs(chk.cost_enter - chk.cost_wait);
      played = chk.cost_enter;
    }
    const double consistency = std::abs(chk.cost - played);
    const double deviation =
        std::max(0.0, chk.cost - std::min(chk.cost_enter, chk.cost_wait));
    chk.residual = std::max({cond, consistency, deviation});
    if (std::isnan(chk.residual)) chk.residual = inf;

    const double scale = tol * std::max(1.0, std::isfinite(chk.cost) ? chk.cost : 1.0);
    if (!(chk.residual <= scale)) {
      chk.passed = false;
      if (s.k == 0 && q == 0.0 && s.m >= 2)
        chk.reason = "nobody enters the empty queue";
      else if (cond > scale)
        chk.reason = (q > 0.0 && q < 1.0) ? "not indifferent"
                                          : "corner action not preferred";
      else if (consistency > scale)
        chk.reason = "stored cost differs from prescribed play";
      else
        chk.reason = "profitable deviation";
    }
    rep.worst_residual = std::max(rep.worst_residual, chk.residual);
    rep.states.push_back(chk);
  }
  return rep;
}

struct ClosedForm2p {
  double q = 0.0;
  double total = 0.0;
};

/// Two-player equilibrium for w > 2: q = sqrt(2/w), social cost sqrt(2w).
inline ClosedForm2p eq_closed_form_2p(double w) {
  if (!(w > 2.0))
    throw DomainError("two-player mixing equilibrium needs w > 2");
  return {std::sqrt(2.0 / w), std::sqrt(2.0 * w)};
}

}  // namespace bneck
