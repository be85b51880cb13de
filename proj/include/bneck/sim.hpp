#pragma once

// Monte Carlo play of the game under a symmetric profile.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bneck/errors.hpp"
#include "bneck/model.hpp"

namespace bneck {

struct SimOutcome {
  double total = 0.0;
  std::vector<double> per_agent;
  std::uint64_t steps = 0;
  bool truncated = false;
};

/// One play from (n, 0). Each step every outside agent enters with
/// probability q(m, k); entrants join the back of the queue in random order;
/// the head of a non-empty queue is served; everyone else in the queue pays w
/// and everyone outside pays 1. Stops after `max_steps` steps with the
/// truncation flag set.
template <class Rng>
SimOutcome simulate_once(const EntryProfile& profile, const GameParams& params,
                         Rng& rng, std::uint64_t max_steps) {
  const int n = params.n;
  SimOutcome out{0.0, std::vector<double>(static_cast<std::size_t>(n), 0.0), 0,
                 false};
  std::vector<int> outside(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) outside[a] = a;
  std::deque<int> queue;
  std::vector<int> stay, entrants;
  stay.reserve(outside.size());
  entrants.reserve(outside.size());

  while (!outside.empty() || !queue.empty()) {
    if (out.steps >= max_steps) {
      out.truncated = true;
      break;
    }
    ++out.steps;
    if (!outside.empty()) {
      const QueueState s{static_cast<int>(outside.size()),
                         static_cast<int>(queue.size())};
      std::bernoulli_distribution enter(profile.q(s));
      stay.clear();
      entrants.clear();
      for (int a : outside) (enter(rng) ? entrants : stay).push_back(a);
      for (std::size_t i = entrants.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(entrants[i - 1], entrants[pick(rng)]);
      }
      outside.swap(stay);
      queue.insert(queue.end(), entrants.begin(), entrants.end());
    }
    if (!queue.empty()) queue.pop_front();
    for (int a : queue) out.per_agent[a] += params.w;
    for (int a : outside) out.per_agent[a] += 1.0;
  }
  for (double c : out.per_agent) out.total += c;
  return out;
}

struct SimOptions {
  std::uint64_t max_steps = 0;  // 0: 1e6 * n / min_m q(m,0)
  int threads = -1;             // -1: BNECK_THREADS, 0: hardware concurrency
};

struct SimReport {
  long long trials = 0;
  double mean_total = 0.0;
  double std_error = 0.0;
  double per_agent_mean = 0.0;  // mean_total / n
  std::vector<double> agent_means;
  std::vector<double> agent_std_errors;
  long long max_steps_hit = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 0;
};

/// Threads requested through BNECK_THREADS, 0 when unset or invalid.
inline int env_threads() {
  const char* v = std::getenv("BNECK_THREADS");
  if (v == nullptr) return 0;
  char* end = nullptr;
  long t = std::strtol(v, &end, 10);
  if (end == v || t < 0) return 0;
  return static_cast<int>(std::min(t, 1024L));
}

inline int resolve_threads(int requested) {
  int t = requested < 0 ? env_threads() : requested;
  if (t == 0) t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return t;
}

/// Rejects profiles in which some empty-queue state has nobody entering.
inline void require_terminating(const EntryProfile& profile) {
  for (int m = 1; m <= profile.n(); ++m)
    if (profile.q({m, 0}) == 0.0)
      throw NonTerminatingProfile("non-terminating profile: q(" +
                                  std::to_string(m) + ",0) = 0");
}

inline std::uint64_t default_max_steps(const EntryProfile& profile) {
  double q_min = 1.0;
  for (int m = 1; m <= profile.n(); ++m) q_min = std::min(q_min, profile.q({m, 0}));
  const double cap = 1e6 * profile.n() / q_min;
  return cap >= 9e18 ? std::uint64_t{9000000000000000000ULL}
                     : static_cast<std::uint64_t>(cap);
}

/// Stream for trial `t`: a pure function of (seed, t).
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

namespace detail {

// Mean and sum of squared deviations, merged with Chan's update.
struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    count += 1.0;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.count == 0.0) return;
    const double total = count + o.count;
    const double d = o.mean - mean;
    mean += d * o.count / total;
    m2 += o.m2 + d * d * count * o.count / total;
    count = total;
  }
  double std_error() const {
    return count > 1.0 ? std::sqrt(m2 / (count - 1.0) / count) : 0.0;
  }
};

struct Chunk {
  Moments total;
  std::vector<Moments> agents;
  long long truncated = 0;
};

}  // namespace detail

/// Runs `trials` independent plays. Trials are grouped in fixed chunks whose
/// statistics are merged in chunk order, so the report does not depend on
/// the number of threads.
inline SimReport simulate(const EntryProfile& profile, const GameParams& params,
                          long long trials, std::uint64_t seed,
                          const SimOptions& opt = {}) {
  params.validate(1);
  if (trials < 1) throw InvalidParameter("simulate needs trials >= 1");
  if (profile.n() != params.n)
    throw InvalidParameter("profile and game disagree on n");
  if (!profile.complete())
    throw InvalidParameter("profile lacks state " +
                           to_string(profile.missing_states().front()));
  require_terminating(profile);
  const std::uint64_t cap = opt.max_steps ? opt.max_steps : default_max_steps(profile);
  const std::size_t n = static_cast<std::size_t>(params.n);

  constexpr long long kChunk = 4096;
  const long long n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<detail::Chunk> chunks(static_cast<std::size_t>(n_chunks));
  auto run_chunk = [&](long long c) {
    auto& ch = chunks[static_cast<std::size_t>(c)];
    ch.agents.assign(n, {});
    const long long end = std::min(trials, (c + 1) * kChunk);
    for (long long t = c * kChunk; t < end; ++t) {
      auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
      auto o = simulate_once(profile, params, rng, cap);
      ch.total.add(o.total);
      for (std::size_t a = 0; a < n; ++a) ch.agents[a].add(o.per_agent[a]);
      if (o.truncated) ++ch.truncated;
    }
  };

  const int threads =
      static_cast<int>(std::min<long long>(resolve_threads(opt.threads), n_chunks));
  if (threads <= 1) {
    for (long long c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (long long c = t; c < n_chunks; c += threads) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  detail::Moments total;
  std::vector<detail::Moments> agents(n);
  SimReport rep;
  for (const auto& ch : chunks) {
    total.merge(ch.total);
    for (std::size_t a = 0; a < n; ++a) agents[a].merge(ch.agents[a]);
    rep.max_steps_hit += ch.truncated;
  }
  rep.trials = trials;
  rep.mean_total = total.mean;
  rep.std_error = total.std_error();
  rep.per_agent_mean = total.mean / params.n;
  for (const auto& a : agents) {
    rep.agent_means.push_back(a.mean);
    rep.agent_std_errors.push_back(a.std_error());
  }
  rep.seed = seed;
  rep.max_steps = cap;
  return rep;
}

}  // namespace bneck
