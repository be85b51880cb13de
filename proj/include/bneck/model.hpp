#pragma once

// Core types of the observable-queue bottleneck game: n agents, each paying 1
// per step outside the queue and w per step waiting behind the head of the
// queue. One agent is served per step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bneck/errors.hpp"

namespace bneck {

struct GameParams {
  int n = 2;
  double w = 2.0;

  bool operator==(const GameParams&) const = default;

  void validate(int min_n = 1) const {
    if (n < min_n)
      throw InvalidParameter("n must be >= " + std::to_string(min_n) +
                             ", got " + std::to_string(n));
    if (!(w > 1.0) || !std::isfinite(w))
      throw InvalidParameter("w must be a finite value > 1, got " +
                             std::to_string(w));
  }
};

/// (m, k): m agents still outside, k agents in the queue.
struct QueueState {
  int m = 0;
  int k = 0;

  auto operator<=>(const QueueState&) const = default;
  int total() const { return m + k; }
};

inline std::string to_string(const QueueState& s) {
  return "(" + std::to_string(s.m) + "," + std::to_string(s.k) + ")";
}

namespace detail {

/// Dense storage for values indexed by states with m + k <= n. Unset entries
/// hold NaN.
class StateArray {
 public:
  StateArray() = default;
  explicit StateArray(int n)
      : n_(n),
        values_(static_cast<std::size_t>(n + 1) * (n + 1),
                std::numeric_limits<double>::quiet_NaN()) {}

  int n() const { return n_; }

  bool in_range(QueueState s) const {
    return s.m >= 0 && s.k >= 0 && s.m + s.k <= n_;
  }
  bool contains(QueueState s) const {
    return in_range(s) && !std::isnan(values_[index(s)]);
  }
  double get(QueueState s) const {
    if (!contains(s))
      throw InvalidParameter("no value stored for state " + to_string(s));
    return values_[index(s)];
  }
  // Unchecked; callers guarantee the state is in range.
  double raw(int m, int k) const {
    return values_[static_cast<std::size_t>(m) * (n_ + 1) + k];
  }
  void put(QueueState s, double v) {
    if (!in_range(s))
      throw InvalidParameter("state " + to_string(s) + " outside n=" +
                             std::to_string(n_));
    values_[index(s)] = v;
  }

 private:
  std::size_t index(QueueState s) const {
    return static_cast<std::size_t>(s.m) * (n_ + 1) + s.k;
  }

  int n_ = 0;
  std::vector<double> values_;
};

}  // namespace detail

/// All states with m >= 1 and m + k <= n, ordered by m + k then m. Every
/// continuation of (m, k) has total m + k - 1 and so precedes it.
inline std::vector<QueueState> enumerate_states(int n) {
  if (n < 1) throw InvalidParameter("enumerate_states: n must be >= 1");
  std::vector<QueueState> out;
  out.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int t = 1; t <= n; ++t)
    for (int m = 1; m <= t; ++m) out.push_back({m, t - m});
  return out;
}

/// Symmetric anonymous stationary strategy: the entry probability q(m, k)
/// every outside agent uses at state (m, k).
///
/// A lone agent (m = 1) enters an empty queue at once and waits out a
/// non-empty one; those rows are filled in on construction and may be
/// overwritten.
class EntryProfile {
 public:
  EntryProfile() = default;
  explicit EntryProfile(int n) : q_(n) {
    if (n < 1) throw InvalidParameter("EntryProfile: n must be >= 1");
    for (int k = 0; k < n; ++k) q_.put({1, k}, k == 0 ? 1.0 : 0.0);
  }

  int n() const { return q_.n(); }

  bool has(QueueState s) const { return s.m >= 1 && q_.contains(s); }

  double q(QueueState s) const {
    if (s.m < 1) throw InvalidParameter("entry probability needs m >= 1");
    return q_.get(s);
  }

  void set(QueueState s, double q) {
    if (s.m < 1) throw InvalidParameter("entry probability needs m >= 1");
    if (!(q >= 0.0 && q <= 1.0))
      throw InvalidParameter("entry probability at " + to_string(s) +
                             " must lie in [0,1], got " + std::to_string(q));
    q_.put(s, q);
  }

  /// True when every state with m >= 1 has a probability.
  bool complete() const {
    for (auto s : enumerate_states(n()))
      if (!has(s)) return false;
    return true;
  }

  std::vector<QueueState> missing_states() const {
    std::vector<QueueState> out;
    for (auto s : enumerate_states(n()))
      if (!has(s)) out.push_back(s);
    return out;
  }

 private:
  detail::StateArray q_;
};

enum class CostRole { PerOutsidePlayer, TotalSocial };

/// Expected costs per state. PerOutsidePlayer tables hold the cost of one
/// outside agent (m >= 1); TotalSocial tables hold the summed cost of all
/// agents still in the system and include the m = 0 drain rows.
class CostTable {
 public:
  CostTable() = default;
  CostTable(CostRole role, int n) : role_(role), values_(n) {}

  CostRole role() const { return role_; }
  int n() const { return values_.n(); }

  bool contains(QueueState s) const {
    if (role_ == CostRole::PerOutsidePlayer && s.m < 1) return false;
    return values_.contains(s);
  }
  double at(QueueState s) const {
    if (role_ == CostRole::PerOutsidePlayer && s.m < 1)
      throw InvalidParameter("per-player cost needs m >= 1");
    return values_.get(s);
  }
  void set(QueueState s, double v) {
    if (role_ == CostRole::PerOutsidePlayer && s.m < 1)
      throw InvalidParameter("per-player cost needs m >= 1");
    if (!(v >= 0.0))
      throw InvalidParameter("cost at " + to_string(s) +
                             " must be non-negative, got " + std::to_string(v));
    values_.put(s, v);
  }

  double raw(int m, int k) const { return values_.raw(m, k); }

 private:
  CostRole role_ = CostRole::PerOutsidePlayer;
  detail::StateArray values_;
};

// ---------------------------------------------------------------------------
// Binomial arithmetic

/// Fills out[0..m] with Binomial(m, q) probabilities. The row is built by the
/// ratio recurrence outward from the mode and then normalised, so no entry
/// overflows and small q (down to denormals) stays finite.
inline void fill_binom_row(int m, double q, std::span<double> out) {
  if (m < 0) throw InvalidParameter("binomial row needs m >= 0");
  if (out.size() < static_cast<std::size_t>(m) + 1)
    throw InvalidParameter("binomial row buffer too small");
  auto row = out.first(static_cast<std::size_t>(m) + 1);
  std::fill(row.begin(), row.end(), 0.0);
  if (q <= 0.0) {
    row[0] = 1.0;
    return;
  }
  if (q >= 1.0) {
    row[m] = 1.0;
    return;
  }
  int mode = static_cast<int>(std::floor((m + 1) * q));
  if (mode > m) mode = m;
  const double up = q / (1.0 - q);
  const double down = (1.0 - q) / q;
  row[mode] = 1.0;
  for (int i = mode; i > 0 && row[i] > 0.0; --i)
    row[i - 1] = row[i] * (static_cast<double>(i) / (m - i + 1)) * down;
  for (int i = mode; i < m && row[i] > 0.0; ++i)
    row[i + 1] = row[i] * (static_cast<double>(m - i) / (i + 1)) * up;
  double sum = 0.0;
  for (double v : row) sum += v;
  for (double& v : row) v /= sum;
}

inline std::vector<double> binom_row(int m, double q) {
  std::vector<double> row(static_cast<std::size_t>(m) + 1);
  fill_binom_row(m, q, row);
  return row;
}

/// C(m, i) q^i (1-q)^(m-i).
inline double binom_pmf(int m, int i, double q) {
  if (m < 0 || i < 0 || i > m)
    throw InvalidParameter("binom_pmf: need 0 <= i <= m");
  if (!(q >= 0.0 && q <= 1.0))
    throw InvalidParameter("binom_pmf: q must lie in [0,1]");
  if (m <= 1000) return binom_row(m, q)[i];
  if (q == 0.0) return i == 0 ? 1.0 : 0.0;
  if (q == 1.0) return i == m ? 1.0 : 0.0;
  const double log_pmf = std::lgamma(m + 1.0) - std::lgamma(i + 1.0) -
                         std::lgamma(m - i + 1.0) + i * std::log(q) +
                         (m - i) * std::log1p(-q);
  return std::exp(log_pmf);
}

/// 1 - (1-q)^trials, accurate for small q.
inline double prob_any(int trials, double q) {
  if (q >= 1.0) return trials > 0 ? 1.0 : 0.0;
  return -std::expm1(trials * std::log1p(-q));
}

// ---------------------------------------------------------------------------
// Per-player cost primitives

/// Expected cost of entering now while each of the m-1 peers enters with
/// probability q: half the simultaneous entrants land ahead, plus the k
/// already queued.
inline double cost_enter(QueueState s, double q, double w) {
  if (s.m < 1 || s.k < 0) throw InvalidParameter("cost_enter needs m >= 1");
  return (s.m - 1) / 2.0 * q * w + s.k * w;
}

namespace detail {

inline void check_continuation(QueueState s, const CostTable& cont) {
  if (cont.role() != CostRole::PerOutsidePlayer)
    throw InvalidParameter("continuation must be a per-player table");
  const int t = s.m + s.k - 1;
  for (int i = 0; i < s.m; ++i) {
    QueueState next{s.m - i, t - (s.m - i)};
    if (s.k == 0 && i == 0) continue;
    if (!cont.contains(next))
      throw InvalidParameter("continuation lacks state " + to_string(next));
  }
}

// Unchecked core of cost_wait; `row` must hold at least m entries.
inline double cost_wait_unchecked(QueueState s, double q, const CostTable& cont,
                                  std::span<double> row) {
  const int others = s.m - 1;
  fill_binom_row(others, q, row);
  if (s.k == 0) {
    double acc = 1.0;
    for (int i = 1; i <= others; ++i)
      if (row[i] > 0.0) acc += row[i] * cont.raw(s.m - i, i - 1);
    return acc / prob_any(others, q);
  }
  double acc = 1.0;
  for (int i = 0; i <= others; ++i)
    if (row[i] > 0.0) acc += row[i] * cont.raw(s.m - i, s.k + i - 1);
  return acc;
}

}  // namespace detail

/// Expected cost of sitting out this step while the m-1 peers enter with
/// probability q and play continues per `continuation`. At an empty queue the
/// agent keeps waiting until someone enters, which is where the
/// 1/(1-(1-q)^(m-1)) factor comes from.
inline double cost_wait(QueueState s, double q, double w,
                        const CostTable& continuation) {
  (void)w;
  if (s.m < 1 || s.k < 0) throw InvalidParameter("cost_wait needs m >= 1");
  if (!(q >= 0.0 && q <= 1.0))
    throw InvalidParameter("cost_wait: q must lie in [0,1]");
  if (s.k == 0) {
    if (s.m < 2)
      throw InvalidParameter("cost_wait at (1,0): a lone agent never waits");
    if (q == 0.0)
      throw DivergentCost("cost_wait at " + to_string(s) +
                          " with q=0: nobody ever enters");
  }
  detail::check_continuation(s, continuation);
  std::vector<double> row(static_cast<std::size_t>(s.m));
  return detail::cost_wait_unchecked(s, q, continuation, row);
}

// ---------------------------------------------------------------------------
// Social cost

/// Total cost incurred by everyone during one step from state s when i of
/// the m outside agents enter.
inline double step_cost_total(QueueState s, int i, double w) {
  if (i < 0 || i > s.m)
    throw InvalidParameter("step_cost_total: need 0 <= i <= m");
  if (s.k + i >= 1) return (s.k + i - 1) * w + (s.m - i);
  return s.m;
}

/// Successor of state s after i entrants.
inline QueueState successor(QueueState s, int i) {
  if (s.k + i >= 1) return {s.m - i, s.k + i - 1};
  return s;
}

/// Social cost of draining a queue of k with nobody outside.
inline double drain_cost(int k, double w) { return w * k * (k - 1) / 2.0; }

struct TotalCostResult {
  CostTable table{CostRole::TotalSocial, 1};
  double total = 0.0;  // T(n, 0)
};

/// Expected social cost T(m, k) of every state under a symmetric profile,
/// including the drain rows T(0, k). The self-loop at (m, 0) when nobody
/// enters is folded in by dividing through by 1 - (1-q)^m.
inline TotalCostResult total_cost_evaluate(const EntryProfile& profile,
                                           const GameParams& params) {
  params.validate(1);
  const int n = params.n;
  const double w = params.w;
  if (profile.n() != n)
    throw InvalidParameter("profile was built for n=" +
                           std::to_string(profile.n()) + ", game has n=" +
                           std::to_string(n));
  if (!profile.complete())
    throw InvalidParameter("profile lacks state " +
                           to_string(profile.missing_states().front()));

  TotalCostResult out{CostTable(CostRole::TotalSocial, n), 0.0};
  const double inf = std::numeric_limits<double>::infinity();
  // Values may be +inf for states that never terminate; they are kept in a
  // side array and only surfaced if (n, 0) depends on them.
  detail::StateArray t(n);
  for (int k = 0; k <= n; ++k) t.put({0, k}, drain_cost(k, w));

  std::vector<double> row(static_cast<std::size_t>(n) + 1);
  for (auto s : enumerate_states(n)) {
    const double q = profile.q(s);
    fill_binom_row(s.m, q, row);
    double acc = 0.0;
    if (s.k == 0) {
      if (q == 0.0) {
        t.put(s, inf);
        continue;
      }
      acc = row[0] * s.m;
      for (int i = 1; i <= s.m; ++i) {
        if (row[i] == 0.0) continue;
        auto next = successor(s, i);
        acc += row[i] * (step_cost_total(s, i, w) + t.raw(next.m, next.k));
      }
      acc /= prob_any(s.m, q);
    } else {
      for (int i = 0; i <= s.m; ++i) {
        if (row[i] == 0.0) continue;
        auto next = successor(s, i);
        acc += row[i] * (step_cost_total(s, i, w) + t.raw(next.m, next.k));
      }
    }
    t.put(s, acc);
  }

  const double root = t.get({n, 0});
  if (!std::isfinite(root)) {
    // Name a reachable empty-queue state with q = 0.
    detail::StateArray reach(n);
    reach.put({n, 0}, 1.0);
    auto states = enumerate_states(n);
    for (auto it = states.rbegin(); it != states.rend(); ++it) {
      auto s = *it;
      if (!reach.contains(s)) continue;
      const double q = profile.q(s);
      if (s.k == 0 && q == 0.0)
        throw NonTerminatingProfile("non-terminating profile: q" +
                                    to_string(s) +
                                    " = 0 at a reachable empty-queue state");
      fill_binom_row(s.m, q, row);
      for (int i = 0; i <= s.m; ++i) {
        auto next = successor(s, i);
        if (row[i] > 0.0 && next.m >= 1 && next != s) reach.put(next, 1.0);
      }
    }
    throw NonTerminatingProfile("non-terminating profile");
  }
  for (int k = 0; k <= n; ++k) out.table.set({0, k}, t.get({0, k}));
  for (auto s : enumerate_states(n))
    if (std::isfinite(t.get(s))) out.table.set(s, t.get(s));
  out.total = root;
  return out;
}

}  // namespace bneck
