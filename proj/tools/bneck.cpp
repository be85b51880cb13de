// bneck: command-line front end for the bottleneck game solvers.
//
// Exit codes: 0 success, 1 bound or verification failure, 2 bad input,
// 3 internal inconsistency.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bneck/bounds.hpp"
#include "bneck/eqsolver.hpp"
#include "bneck/io.hpp"
#include "bneck/optsolver.hpp"
#include "bneck/sim.hpp"

namespace {

using bneck::io::json;

enum Exit { kOk = 0, kFailed = 1, kBadInput = 2, kInternal = 3 };

struct Output {
  std::string format = "json";
  std::string path;

  void write(const std::string& text) const {
    if (path.empty() || path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw bneck::InvalidParameter("cannot open output file " + path);
    f << text;
  }
  void write(const json& doc) const { write(doc.dump(2) + "\n"); }
};

void add_output(CLI::App* cmd, Output& out, bool csv = true) {
  auto* f = cmd->add_option("--format", out.format, "Output format")
                ->capture_default_str();
  if (csv)
    f->check(CLI::IsMember({"json", "csv"}));
  else
    f->check(CLI::IsMember({"json"}));
  cmd->add_option("--out", out.path, "Output file (default stdout)");
}

bneck::RootPolicy parse_policy(const std::string& s) {
  return s == "largest" ? bneck::RootPolicy::LargestQ : bneck::RootPolicy::SmallestQ;
}

bneck::io::ProfileDocument read_profile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw bneck::InvalidParameter("cannot read profile file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return bneck::io::profile_from_string(ss.str());
}

int as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != static_cast<int>(v))
    throw bneck::InvalidParameter(std::string(what) + " must be a positive integer");
  return static_cast<int>(v);
}

// "A:B" or "A:B:step".
std::vector<int> parse_range(const std::string& spec) {
  std::vector<int> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw bneck::InvalidParameter("bad --n-range \"" + spec + "\"");
    }
  }
  if (parts.size() < 2 || parts.size() > 3)
    throw bneck::InvalidParameter("--n-range must be A:B or A:B:step");
  const int step = parts.size() == 3 ? parts[2] : 1;
  if (step < 1 || parts[0] < 2 || parts[1] < parts[0])
    throw bneck::InvalidParameter("--n-range needs 2 <= A <= B and step >= 1");
  std::vector<int> out;
  for (int n = parts[0]; n <= parts[1]; n += step) out.push_back(n);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver for the observable-queue bottleneck game G(n; w)"};
  app.require_subcommand(1);

  // eq
  int eq_n = 0;
  double eq_w = 0.0;
  std::string eq_policy = "smallest";
  bneck::SolverOptions eq_opts;
  Output eq_out;
  auto* eq = app.add_subcommand("eq", "Symmetric equilibrium by backward induction");
  eq->add_option("--n", eq_n, "Number of agents")->required();
  eq->add_option("--w", eq_w, "Queue waiting cost per step")->required();
  eq->add_option("--policy", eq_policy, "Root selection")
      ->check(CLI::IsMember({"smallest", "largest"}))
      ->capture_default_str();
  eq->add_option("--grid", eq_opts.grid_points, "Sign-scan grid points")
      ->capture_default_str();
  eq->add_option("--tol", eq_opts.tol, "Relative root tolerance")->capture_default_str();
  add_output(eq, eq_out);

  // opt
  int opt_n = 0;
  double opt_w = 0.0;
  int opt_grid = 2048;
  double opt_tol = 1e-12;
  Output opt_out;
  auto* opt = app.add_subcommand("opt", "Optimal symmetric profile");
  opt->add_option("--n", opt_n, "Number of agents")->required();
  opt->add_option("--w", opt_w, "Queue waiting cost per step")->required();
  opt->add_option("--grid", opt_grid, "Scan grid points")->capture_default_str();
  opt->add_option("--tol", opt_tol, "Relative minimiser tolerance")->capture_default_str();
  add_output(opt, opt_out);

  // sim
  std::string sim_profile;
  std::vector<double> sim_from_eq, sim_from_opt;
  long long sim_trials = 100000;
  std::uint64_t sim_seed = 0;
  std::uint64_t sim_max_steps = 0;
  std::string sim_policy = "smallest";
  Output sim_out;
  auto* sim = app.add_subcommand("sim", "Monte Carlo simulation of a profile");
  auto* src_file = sim->add_option("--profile", sim_profile, "Profile JSON file");
  auto* src_eq = sim->add_option("--from-eq", sim_from_eq, "Solve equilibrium for N W")
                     ->expected(2);
  auto* src_opt = sim->add_option("--from-opt", sim_from_opt, "Solve optimum for N W")
                      ->expected(2);
  src_file->excludes(src_eq)->excludes(src_opt);
  src_eq->excludes(src_opt);
  sim->add_option("--trials", sim_trials, "Number of plays")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Base seed")->capture_default_str();
  sim->add_option("--max-steps", sim_max_steps, "Step cap per play (0: default)")
      ->capture_default_str();
  sim->add_option("--policy", sim_policy, "Root selection for --from-eq")
      ->check(CLI::IsMember({"smallest", "largest"}));
  add_output(sim, sim_out);

  // bounds
  int b_n = 0;
  double b_w = 0.0;
  double b_eps = 0.1;
  std::string b_policy = "smallest";
  Output b_out;
  auto* bnd = app.add_subcommand("bounds", "Compare solutions against the bounds");
  bnd->add_option("--n", b_n, "Number of agents")->required();
  bnd->add_option("--w", b_w, "Queue waiting cost per step")->required();
  bnd->add_option("--eps", b_eps, "Epsilon for threshold-dependent bounds")
      ->capture_default_str();
  bnd->add_option("--policy", b_policy, "Root selection")
      ->check(CLI::IsMember({"smallest", "largest"}));
  add_output(bnd, b_out);

  // sweep
  std::string sw_range;
  std::vector<double> sw_ws;
  std::string sw_policy = "smallest";
  double sw_eps = 0.1;
  std::string sw_path;
  auto* sweep = app.add_subcommand("sweep", "CSV of costs and ratios over a grid");
  sweep->add_option("--n-range", sw_range, "A:B[:step]")->required();
  sweep->add_option("--w-list", sw_ws, "Comma-separated w values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--policy", sw_policy, "Root selection")
      ->check(CLI::IsMember({"smallest", "largest"}));
  sweep->add_option("--eps", sw_eps, "Epsilon for threshold-dependent bounds");
  sweep->add_option("--out", sw_path, "Output CSV file (default stdout)");

  // verify
  int v_n = 0;
  double v_w = 0.0;
  long long v_samples = 100000;
  std::uint64_t v_seed = 0;
  double v_tol = 1e-9;
  int v_nice = 50;
  std::string v_profile;
  std::string v_policy = "smallest";
  Output v_out;
  auto* ver = app.add_subcommand("verify", "Verify an equilibrium and the lemma suite");
  auto* v_n_opt = ver->add_option("--n", v_n, "Number of agents");
  auto* v_w_opt = ver->add_option("--w", v_w, "Queue waiting cost per step");
  auto* v_p_opt = ver->add_option("--profile", v_profile, "Audit this profile instead");
  v_p_opt->excludes(v_n_opt)->excludes(v_w_opt);
  ver->add_option("--samples", v_samples, "Random samples per lemma")->capture_default_str();
  ver->add_option("--seed", v_seed, "Seed for lemma sampling")->capture_default_str();
  ver->add_option("--tol", v_tol, "Relative tolerance per state")->capture_default_str();
  ver->add_option("--nice-max", v_nice, "n_max for the bound-function checks")
      ->capture_default_str();
  ver->add_option("--policy", v_policy, "Root selection")
      ->check(CLI::IsMember({"smallest", "largest"}));
  add_output(ver, v_out, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (eq->parsed()) {
      const bneck::GameParams p{eq_n, eq_w};
      p.validate(2);
      eq_opts.policy = parse_policy(eq_policy);
      auto sol = bneck::solve_equilibrium(p, eq_opts);
      eq_out.format == "csv" ? eq_out.write(bneck::io::eq_csv(sol))
                             : eq_out.write(bneck::io::to_json(sol));
      return kOk;
    }

    if (opt->parsed()) {
      const bneck::GameParams p{opt_n, opt_w};
      p.validate(1);
      auto sol = bneck::solve_opt(p, opt_grid, opt_tol);
      opt_out.format == "csv" ? opt_out.write(bneck::io::opt_csv(sol))
                              : opt_out.write(bneck::io::to_json(sol));
      return kOk;
    }

    if (sim->parsed()) {
      bneck::GameParams p;
      bneck::EntryProfile prof;
      if (!sim_profile.empty()) {
        auto doc = read_profile(sim_profile);
        p = doc.params;
        prof = doc.profile;
      } else if (!sim_from_eq.empty()) {
        p = {as_count(sim_from_eq[0], "--from-eq N"), sim_from_eq[1]};
        p.validate(1);
        bneck::SolverOptions o;
        o.policy = parse_policy(sim_policy);
        prof = bneck::solve_equilibrium(p, o).profile;
      } else if (!sim_from_opt.empty()) {
        p = {as_count(sim_from_opt[0], "--from-opt N"), sim_from_opt[1]};
        p.validate(1);
        prof = bneck::opt_profile(bneck::solve_opt(p));
      } else {
        throw bneck::InvalidParameter("sim needs --profile, --from-eq or --from-opt");
      }
      bneck::require_terminating(prof);
      const double analytic = bneck::total_cost_evaluate(prof, p).total;
      bneck::SimOptions so;
      so.max_steps = sim_max_steps;
      auto rep = bneck::simulate(prof, p, sim_trials, sim_seed, so);
      sim_out.format == "csv" ? sim_out.write(bneck::io::sim_csv(rep, p, analytic))
                              : sim_out.write(bneck::io::to_json(rep, p, analytic));
      return rep.max_steps_hit == 0 ? kOk : kFailed;
    }

    if (bnd->parsed()) {
      const bneck::GameParams p{b_n, b_w};
      p.validate(2);
      bneck::SolverOptions o;
      o.policy = parse_policy(b_policy);
      auto e = bneck::solve_equilibrium(p, o);
      auto s = bneck::solve_opt(p);
      auto rep = bneck::bounds_report(e, s, b_eps);
      b_out.format == "csv" ? b_out.write(bneck::io::bounds_csv(rep))
                            : b_out.write(bneck::io::to_json(rep));
      return rep.hard_failures() == 0 ? kOk : kFailed;
    }

    if (sweep->parsed()) {
      const auto ns = parse_range(sw_range);
      for (double w : sw_ws) bneck::GameParams{2, w}.validate(2);
      const auto policy = parse_policy(sw_policy);
      struct Cell {
        int n;
        double w;
      };
      std::vector<Cell> cells;
      for (int n : ns)
        for (double w : sw_ws) cells.push_back({n, w});
      std::vector<std::string> lines(cells.size());
      std::vector<std::exception_ptr> errors(cells.size());
      auto run = [&](std::size_t i) {
        try {
          const bneck::GameParams p{cells[i].n, cells[i].w};
          bneck::SolverOptions o;
          o.policy = policy;
          auto e = bneck::solve_equilibrium(p, o);
          auto s = bneck::solve_opt(p);
          auto rep = bneck::bounds_report(e, s, sw_eps);
          lines[i] = bneck::io::sweep_line({p.n, p.w, policy, e.q_n0(),
                                            e.cost_per_player(), e.total_cost,
                                            s.total(), bneck::sc_unrestricted(p.n),
                                            rep.hard_failures()});
        } catch (...) {
          errors[i] = std::current_exception();
        }
      };
      const int threads = std::min<int>(bneck::resolve_threads(-1),
                                         static_cast<int>(cells.size()));
      if (threads <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run(i);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
          pool.emplace_back([&, t] {
            for (std::size_t i = t; i < cells.size(); i += threads) run(i);
          });
        for (auto& th : pool) th.join();
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
      std::string csv = std::string(bneck::io::sweep_header()) + "\n";
      for (const auto& l : lines) csv += l + "\n";
      Output{"csv", sw_path}.write(csv);
      return kOk;
    }

    if (ver->parsed()) {
      bneck::EquilibriumSolution sol;
      std::string source;
      if (!v_profile.empty()) {
        auto doc = read_profile(v_profile);
        doc.params.validate(2);
        sol = bneck::candidate_from_profile(doc.profile, doc.params);
        source = "profile";
      } else {
        if (v_n_opt->count() == 0 || v_w_opt->count() == 0)
          throw bneck::InvalidParameter("verify needs --n and --w, or --profile");
        const bneck::GameParams p{v_n, v_w};
        p.validate(2);
        bneck::SolverOptions o;
        o.policy = parse_policy(v_policy);
        sol = bneck::solve_equilibrium(p, o);
        source = "solver";
      }
      auto rep = bneck::verify_equilibrium(sol, v_tol);
      auto lemmas = bneck::aux_lemma_validators(v_samples, v_seed);
      std::vector<bneck::NiceCheckResult> nice;
      if (sol.params.w > 2.0) {
        nice.push_back(bneck::nice_function_check(bneck::phi_A(sol.params.w), v_nice));
        nice.push_back(bneck::nice_function_check(bneck::phi_B(sol.params.w, 1.0), v_nice));
      }
      bool ok = rep.passed();
      json lj = json::array(), nj = json::array();
      for (const auto& l : lemmas) {
        ok = ok && l.passed();
        lj.push_back(bneck::io::to_json(l));
      }
      for (const auto& r : nice) {
        ok = ok && r.passed();
        nj.push_back(bneck::io::to_json(r));
      }
      json doc = {{"n", sol.params.n},
                  {"w", sol.params.w},
                  {"source", source},
                  {"passed", ok},
                  {"equilibrium", bneck::io::to_json(rep)},
                  {"lemmas", std::move(lj)},
                  {"nice_functions", std::move(nj)}};
      v_out.write(doc);
      for (const auto& c : rep.failures())
        std::cerr << "state " << bneck::to_string(c.state) << " failed: " << c.reason
                  << " (q=" << c.q << ", residual=" << c.residual << ")\n";
      return ok ? kOk : kFailed;
    }
  } catch (const bneck::InternalInconsistency& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return kInternal;
  } catch (const bneck::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << "\n";
    return kInternal;
  }
  return kBadInput;
}
