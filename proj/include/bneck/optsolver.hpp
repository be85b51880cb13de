#pragma once

// Optimal symmetric profile when agents only enter an empty queue. After a
// batch of i entrants the queue drains in i steps while the m - i outsiders
// wait, so the problem reduces to a one-dimensional choice of p_m per m.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "bneck/errors.hpp"
#include "bneck/model.hpp"
#include "bneck/numeric.hpp"

namespace bneck {

struct OptStageDiagnostics {
  int m = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int local_minima = 0;
  double grid_best = 0.0;  // best grid value before refinement
};

struct OptSolution {
  GameParams params;
  std::vector<double> p;    // p[m-1] for m = 1..n
  std::vector<double> opt;  // opt[m] for m = 0..n
  std::vector<OptStageDiagnostics> diagnostics;

  double p_at(int m) const { return p.at(static_cast<std::size_t>(m - 1)); }
  double total() const { return opt.back(); }
};

namespace detail {

inline double opt_stage_cost_unchecked(int m, double p, double w,
                                       std::span<const double> opt_prefix,
                                       std::span<double> row) {
  fill_binom_row(m, p, row);
  double acc = row[0] * m;
  for (int i = 1; i <= m; ++i) {
    if (row[i] == 0.0) continue;
    acc += row[i] * (w * i * (i - 1) / 2.0 + static_cast<double>(i) * (m - i) +
                     opt_prefix[m - i]);
  }
  return acc / prob_any(m, p);
}

}  // namespace detail

/// Expected social cost from an empty queue with m agents outside when each
/// enters with probability p and play continues optimally afterwards.
/// `opt_prefix` holds OPT(0..m-1).
inline double opt_stage_cost(int m, double p, double w,
                             std::span<const double> opt_prefix) {
  if (m < 1) throw InvalidParameter("opt_stage_cost needs m >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidParameter("opt_stage_cost: p must lie in [0,1]");
  if (p == 0.0)
    throw DivergentCost("opt_stage_cost with p=0: nobody ever enters");
  if (opt_prefix.size() < static_cast<std::size_t>(m))
    throw InvalidParameter("opt_stage_cost needs OPT(0..m-1)");
  std::vector<double> row(static_cast<std::size_t>(m) + 1);
  return detail::opt_stage_cost_unchecked(m, p, w, opt_prefix, row);
}

/// Minimises the stage cost for m = 2..n in turn. Each stage is scanned on a
/// grid (half log-spaced on [1e-8/m, 1/m], half uniform on [1/m, 1]) and every
/// local grid minimum is refined by golden-section search; the global best is
/// kept. `tol` is the relative width at which golden-section stops.
inline OptSolution solve_opt(const GameParams& params, int grid_points = 2048,
                             double tol = 1e-12) {
  params.validate(1);
  if (grid_points < 4) throw InvalidParameter("grid_points must be >= 4");
  const int n = params.n;
  const double w = params.w;
  OptSolution sol{params, std::vector<double>(static_cast<std::size_t>(n), 1.0),
                  std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0),
                  {}};
  std::vector<double> row(static_cast<std::size_t>(n) + 1);
  for (int m = 2; m <= n; ++m) {
    std::span<const double> prefix(sol.opt.data(), static_cast<std::size_t>(m));
    auto f = [&](double p) {
      return detail::opt_stage_cost_unchecked(m, p, w, prefix, row);
    };
    const auto grid = numeric::mixed_grid(1e-8 / m, 1.0 / m, 1.0, grid_points);
    std::vector<double> val(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) val[j] = f(grid[j]);

    OptStageDiagnostics diag{m};
    std::size_t j_best = 0;
    for (std::size_t j = 1; j < grid.size(); ++j)
      if (val[j] < val[j_best]) j_best = j;
    diag.grid_best = val[j_best];
    double best_p = grid[j_best];
    double best_v = val[j_best];
    diag.bracket_lo = grid[j_best == 0 ? 0 : j_best - 1];
    diag.bracket_hi = grid[std::min(j_best + 1, grid.size() - 1)];

    for (std::size_t j = 0; j < grid.size(); ++j) {
      const bool left_ok = j == 0 || val[j] <= val[j - 1];
      const bool right_ok = j + 1 == grid.size() || val[j] <= val[j + 1];
      if (!left_ok || !right_ok) continue;
      ++diag.local_minima;
      const double a = grid[j == 0 ? 0 : j - 1];
      const double b = grid[std::min(j + 1, grid.size() - 1)];
      if (b <= a) continue;
      auto r = numeric::golden_section(f, a, b, tol * b);
      if (r.fx < best_v) {
        best_v = r.fx;
        best_p = r.x;
        diag.bracket_lo = r.lo;
        diag.bracket_hi = r.hi;
      }
    }
    sol.p[static_cast<std::size_t>(m - 1)] = best_p;
    sol.opt[static_cast<std::size_t>(m)] = best_v;
    sol.diagnostics.push_back(diag);
  }
  return sol;
}

struct OptClosedForm2p {
  double p = 0.0;
  double opt = 0.0;
};

/// Two-player optimum: p = (sqrt(2w-1) - 1)/(w-1), written as
/// 2/(sqrt(2w-1) + 1) to stay accurate near w = 1, and OPT = sqrt(2w-1).
inline OptClosedForm2p opt_closed_form_2p(double w) {
  if (!(w > 1.0) || !std::isfinite(w))
    throw InvalidParameter("opt_closed_form_2p needs finite w > 1");
  const double root = std::sqrt(2.0 * w - 1.0);
  return {2.0 / (root + 1.0), root};
}

/// p_m = min(1, (ln m / m) sqrt(2/w)), p_1 = 1.
inline std::vector<double> heuristic_profile_small_w(int n, double w) {
  if (n < 2) throw InvalidParameter("heuristic_profile_small_w needs n >= 2");
  if (!(w > 2.0)) throw DomainError("heuristic_profile_small_w needs w > 2");
  std::vector<double> p(static_cast<std::size_t>(n), 1.0);
  for (int m = 2; m <= n; ++m)
    p[m - 1] = std::min(1.0, std::log(m) / m * std::sqrt(2.0 / w));
  return p;
}

/// p_m = min(1, sqrt(2(m-1)/(w-1)) / m), p_1 = 1.
inline std::vector<double> heuristic_profile_large_w(int n, double w) {
  if (n < 2) throw InvalidParameter("heuristic_profile_large_w needs n >= 2");
  if (!(w > 1.0)) throw InvalidParameter("heuristic_profile_large_w needs w > 1");
  std::vector<double> p(static_cast<std::size_t>(n), 1.0);
  for (int m = 2; m <= n; ++m)
    p[m - 1] = std::min(1.0, std::sqrt(2.0 * (m - 1) / (w - 1.0)) / m);
  return p;
}

/// Profile that enters an empty queue with probability p[m-1] and never
/// joins a non-empty one.
inline EntryProfile empty_queue_profile(std::span<const double> p) {
  const int n = static_cast<int>(p.size());
  EntryProfile prof(n);
  for (auto s : enumerate_states(n)) prof.set(s, s.k == 0 ? p[s.m - 1] : 0.0);
  return prof;
}

inline EntryProfile opt_profile(const OptSolution& sol) {
  return empty_queue_profile(sol.p);
}

/// Social cost of sequential entry, n(n-1)/2.
inline double sc_unrestricted(int n) {
  if (n < 1) throw InvalidParameter("sc_unrestricted needs n >= 1");
  return n * (n - 1.0) / 2.0;
}

}  // namespace bneck
