#pragma once

// JSON and CSV renderings of solver results, and the strict profile document
// format {"n", "w", "entries": [{"m", "k", "q"}]}.

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "bneck/bounds.hpp"
#include "bneck/eqsolver.hpp"
#include "bneck/errors.hpp"
#include "bneck/model.hpp"
#include "bneck/optsolver.hpp"
#include "bneck/sim.hpp"

namespace bneck::io {

using json = nlohmann::ordered_json;

/// %.12g, with non-finite values spelled nan/inf.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Finite numbers as-is, everything else as null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Profile documents

inline json profile_to_json(const EntryProfile& profile, double w) {
  json entries = json::array();
  for (auto s : enumerate_states(profile.n()))
    entries.push_back({{"m", s.m}, {"k", s.k}, {"q", profile.q(s)}});
  return {{"n", profile.n()}, {"w", w}, {"entries", std::move(entries)}};
}

struct ProfileDocument {
  GameParams params;
  EntryProfile profile;
};

namespace detail {

inline void only_keys(const json& obj, std::initializer_list<const char*> keys,
                      const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known)
      throw InvalidParameter("unknown field \"" + it.key() + "\" in " + where);
  }
  for (const char* k : keys)
    if (!obj.contains(k))
      throw InvalidParameter("missing field \"" + std::string(k) + "\" in " + where);
}

inline int as_int(const json& v, const std::string& what) {
  if (!v.is_number_integer())
    throw InvalidParameter(what + " must be an integer");
  return v.get<int>();
}

inline double as_real(const json& v, const std::string& what) {
  if (!v.is_number()) throw InvalidParameter(what + " must be a number");
  return v.get<double>();
}

}  // namespace detail

/// Parses and validates a profile document. Every state with m >= 2 must
/// appear exactly once; omitted (1, k) rows default to entering an empty
/// queue and waiting otherwise.
inline ProfileDocument profile_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidParameter("profile document must be an object");
  detail::only_keys(doc, {"n", "w", "entries"}, "profile document");
  ProfileDocument out{{detail::as_int(doc["n"], "n"), detail::as_real(doc["w"], "w")},
                      {}};
  out.params.validate(1);
  out.profile = EntryProfile(out.params.n);
  const auto& entries = doc["entries"];
  if (!entries.is_array()) throw InvalidParameter("\"entries\" must be an array");
  std::set<QueueState> seen;
  for (const auto& e : entries) {
    if (!e.is_object()) throw InvalidParameter("profile entry must be an object");
    detail::only_keys(e, {"m", "k", "q"}, "profile entry");
    const QueueState s{detail::as_int(e["m"], "m"), detail::as_int(e["k"], "k")};
    if (s.m < 1 || s.k < 0 || s.m + s.k > out.params.n)
      throw InvalidParameter("profile entry " + to_string(s) + " is not a state of n=" +
                             std::to_string(out.params.n));
    if (!seen.insert(s).second)
      throw InvalidParameter("duplicate profile entry " + to_string(s));
    out.profile.set(s, detail::as_real(e["q"], "q"));
  }
  for (auto s : enumerate_states(out.params.n))
    if (s.m >= 2 && !seen.count(s))
      throw InvalidParameter("profile lacks state " + to_string(s));
  return out;
}

inline ProfileDocument profile_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidParameter(std::string("malformed profile JSON: ") + e.what());
  }
  return profile_from_json(doc);
}

// ---------------------------------------------------------------------------
// Results

inline json to_json(const EquilibriumSolution& sol) {
  json costs = json::array();
  json diag = json::array();
  for (auto s : enumerate_states(sol.params.n))
    costs.push_back({{"m", s.m}, {"k", s.k}, {"cost", num(sol.per_player.at(s))}});
  for (const auto& d : sol.diagnostics)
    diag.push_back({{"m", d.state.m},
                    {"k", d.state.k},
                    {"root_count", d.root_count},
                    {"residual", num(d.residual)}});
  return {{"n", sol.params.n},
          {"w", sol.params.w},
          {"policy", to_string(sol.policy)},
          {"q_n0", sol.q_n0()},
          {"cost_per_player", num(sol.cost_per_player())},
          {"total_cost", num(sol.total_cost)},
          {"profile", profile_to_json(sol.profile, sol.params.w)},
          {"per_player_costs", std::move(costs)},
          {"diagnostics", std::move(diag)}};
}

inline std::string eq_csv(const EquilibriumSolution& sol) {
  std::ostringstream os;
  os << "m,k,q,cost,root_count,residual\n";
  for (const auto& d : sol.diagnostics)
    os << d.state.m << ',' << d.state.k << ',' << fmt(sol.profile.q(d.state)) << ','
       << fmt(sol.per_player.at(d.state)) << ',' << d.root_count << ','
       << fmt(d.residual) << '\n';
  return os.str();
}

inline json to_json(const OptSolution& sol) {
  json stages = json::array();
  for (const auto& d : sol.diagnostics)
    stages.push_back({{"m", d.m},
                      {"bracket_lo", d.bracket_lo},
                      {"bracket_hi", d.bracket_hi},
                      {"local_minima", d.local_minima},
                      {"grid_best", num(d.grid_best)}});
  return {{"n", sol.params.n},
          {"w", sol.params.w},
          {"p", sol.p},
          {"opt", sol.opt},
          {"total_cost", sol.total()},
          {"diagnostics", std::move(stages)}};
}

inline std::string opt_csv(const OptSolution& sol) {
  std::ostringstream os;
  os << "m,p,opt\n";
  os << 0 << ",," << fmt(sol.opt[0]) << '\n';
  for (int m = 1; m <= sol.params.n; ++m)
    os << m << ',' << fmt(sol.p_at(m)) << ',' << fmt(sol.opt[m]) << '\n';
  return os.str();
}

inline json to_json(const SimReport& r, const GameParams& params, double analytic) {
  return {{"n", params.n},
          {"w", params.w},
          {"trials", r.trials},
          {"seed", r.seed},
          {"max_steps", r.max_steps},
          {"mean_total", r.mean_total},
          {"std_error", r.std_error},
          {"per_agent_mean", r.per_agent_mean},
          {"agent_means", r.agent_means},
          {"agent_std_errors", r.agent_std_errors},
          {"max_steps_hit", r.max_steps_hit},
          {"analytic_total", num(analytic)}};
}

inline std::string sim_csv(const SimReport& r, const GameParams& params,
                           double analytic) {
  std::ostringstream os;
  os << "n,w,trials,seed,mean_total,std_error,per_agent_mean,max_steps_hit,"
        "analytic_total\n";
  os << params.n << ',' << fmt(params.w) << ',' << r.trials << ',' << r.seed << ','
     << fmt(r.mean_total) << ',' << fmt(r.std_error) << ',' << fmt(r.per_agent_mean)
     << ',' << r.max_steps_hit << ',' << fmt(analytic) << '\n';
  return os.str();
}

inline const char* to_string(Direction d) {
  return d == Direction::AtMost ? "observed<=bound" : "observed>=bound";
}

inline json to_json(const BoundsReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"name", e.name},
                       {"relation", e.relation},
                       {"bound", num(e.bound)},
                       {"observed", num(e.observed)},
                       {"direction", to_string(e.direction)},
                       {"passed", e.passed},
                       {"advisory", e.advisory},
                       {"applicable", e.applicable}});
  json ratios = json::array();
  for (const auto& r : rep.ratios)
    ratios.push_back({{"name", r.name}, {"observed", num(r.observed)}, {"target", num(r.target)}});
  return {{"n", rep.params.n},
          {"w", rep.params.w},
          {"eps", rep.eps_used},
          {"hard_failures", rep.hard_failures()},
          {"entries", std::move(entries)},
          {"ratios", std::move(ratios)}};
}

inline std::string bounds_csv(const BoundsReport& rep) {
  std::ostringstream os;
  os << "name,bound,observed,direction,passed,advisory,applicable\n";
  for (const auto& e : rep.entries)
    os << e.name << ',' << fmt(e.bound) << ',' << fmt(e.observed) << ','
       << to_string(e.direction) << ',' << e.passed << ',' << e.advisory << ','
       << e.applicable << '\n';
  for (const auto& r : rep.ratios)
    os << r.name << ',' << fmt(r.target) << ',' << fmt(r.observed) << ",ratio,1,1,1\n";
  return os.str();
}

inline json to_json(const VerificationReport& rep, std::size_t max_states = 50) {
  json failed = json::array();
  for (const auto& c : rep.failures()) {
    if (failed.size() >= max_states) break;
    failed.push_back({{"m", c.state.m},
                      {"k", c.state.k},
                      {"q", c.q},
                      {"cost", num(c.cost)},
                      {"cost_enter", num(c.cost_enter)},
                      {"cost_wait", num(c.cost_wait)},
                      {"residual", num(c.residual)},
                      {"reason", c.reason}});
  }
  return {{"passed", rep.passed()},
          {"states_checked", rep.states.size()},
          {"worst_residual", num(rep.worst_residual)},
          {"failures", std::move(failed)}};
}

inline json to_json(const LemmaCheck& c) {
  return {{"name", c.name},
          {"checked", c.checked},
          {"failures", c.failures},
          {"worst_margin", num(c.worst_margin)},
          {"witness", c.witness},
          {"passed", c.passed()}};
}

inline json to_json(const NiceCheckResult& r) {
  json wit = json::array();
  for (const auto& w : r.witnesses)
    wit.push_back({{"condition", w.condition},
                   {"m", w.at.m},
                   {"k", w.at.k},
                   {"other_m", w.other.m},
                   {"other_k", w.other.k},
                   {"margin", num(w.margin)}});
  return {{"name", r.name},
          {"n_max", r.n_max},
          {"condition1_failures", r.condition1_failures},
          {"condition2_failures", r.condition2_failures},
          {"passed", r.passed()},
          {"witnesses", std::move(wit)}};
}

// ---------------------------------------------------------------------------
// Sweep

inline const char* sweep_header() {
  return "n,w,policy,q_n0,eq_cost_per_player,eq_cost_total,opt_cost_total,"
         "sc_unrestricted,ratio_eq_sc,ratio_eq_opt,ratio_opt_sc,hard_bound_failures";
}

struct SweepRow {
  int n = 0;
  double w = 0.0;
  RootPolicy policy = RootPolicy::SmallestQ;
  double q_n0 = 0.0;
  double eq_cost_per_player = 0.0;
  double eq_cost_total = 0.0;
  double opt_cost_total = 0.0;
  double sc_unrestricted = 0.0;
  int hard_bound_failures = 0;
};

inline std::string sweep_line(const SweepRow& r) {
  std::ostringstream os;
  os << r.n << ',' << fmt(r.w) << ',' << to_string(r.policy) << ',' << fmt(r.q_n0)
     << ',' << fmt(r.eq_cost_per_player) << ',' << fmt(r.eq_cost_total) << ','
     << fmt(r.opt_cost_total) << ',' << fmt(r.sc_unrestricted) << ','
     << fmt(r.eq_cost_total / r.sc_unrestricted) << ','
     << fmt(r.eq_cost_total / r.opt_cost_total) << ','
     << fmt(r.opt_cost_total / r.sc_unrestricted) << ',' << r.hard_bound_failures;
  return os.str();
}

}  // namespace bneck::io
