#include "mpoi/cli/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpoi/adaptive.hpp"
#include "mpoi/commitment.hpp"
#include "mpoi/error.hpp"
#include "mpoi/oracle.hpp"
#include "mpoi/random.hpp"
#include "mpoi/scenario.hpp"
#include "mpoi/stats.hpp"

namespace mpoi::cli {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::size_t runs = 1000;
  double tol = 1e-9;
  bool json = false;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string command_line;
  std::uint64_t seed = 0;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MPOI_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::invalid_argument, std::string("MPOI_SEED is not an unsigned integer: ") + env);
  }
  return 0;
}

void header(const Context& ctx) {
  ctx.out << fmt::format("# mpoi {}, seed {}, command: {}\n", MPOI_VERSION, ctx.seed, ctx.command_line);
}

Scenario load(const Context& ctx, const std::string& path) {
  auto sc = load_scenario(path);
  for (const auto& w : sc.warnings) ctx.err << "warning: " << w << "\n";
  return sc;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string set_string(const ElementSet& s) {
  std::string r;
  for (auto e : s.elements()) r += (r.empty() ? "" : ";") + std::to_string(e);
  return r;
}

GradeOptions grade_options(const Common& c) {
  GradeOptions o;
  o.tol = c.tol;
  return o;
}

json state_map(const MarkovSystem& ms, const std::vector<double>& v) {
  json j = json::object();
  for (auto s : ms.states()) j[ms.state_name(s)] = v[s.index];
  return j;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Context& ctx, const Common& c) {
  const auto sc = load(ctx, c.scenario);
  header(ctx);
  for (const auto& w : sc.warnings) ctx.out << "# warning: " << w << "\n";
  const auto inst = sc.instance();
  const auto size = input_size(sc);
  ctx.out << fmt::format("# scenario {}, mode {}, constraint {}, objective {}, marginal {}\n", sc.name,
                         to_string(sc.mode),
                         sc.packing ? sc.packing->describe() : sc.covering->describe(),
                         sc.objective_name, to_string(inst.marginal().kind()));
  ctx.out << fmt::format("# n {}, k {}, D {}, B {}, declared bound {}\n", size.n, size.k, size.D,
                         num(size.B), num(size.bound));
  ctx.out << "system,system_index,state,state_index,role,parameter,dag,depth\n";
  for (std::size_t i = 0; i < sc.systems.size(); ++i) {
    const auto& ms = sc.systems[i];
    const auto cl = classify(ms);
    for (auto s : ms.states()) {
      const bool dest = ms.is_destination(s);
      const std::string role = dest ? "destination" : (s == ms.start() ? "start" : "transient");
      ctx.out << fmt::format("{},{},{},{},{},{},{},{}\n", ms.name(), i, ms.state_name(s), s.index,
                             role, num(dest ? ms.value(s) : ms.price(s)), cl.is_dag ? "yes" : "no",
                             cl.depth ? std::to_string(*cl.depth) : "");
    }
  }
  return 0;
}

int cmd_grade(const Context& ctx, const Common& c) {
  const auto sc = load(ctx, c.scenario);
  const auto tables = grade_tables(sc.systems, grade_options(c));
  if (c.json) {
    json j = json::object();
    for (std::size_t i = 0; i < sc.systems.size(); ++i)
      j[sc.systems[i].name()] = {{"method", std::string(to_string(tables[i].method))},
                                 {"tolerance", tables[i].tolerance},
                                 {"grades", state_map(sc.systems[i], tables[i].grades)}};
    ctx.out << j.dump(2) << "\n";
    return 0;
  }
  header(ctx);
  ctx.out << "system,state,grade,method,tolerance\n";
  for (std::size_t i = 0; i < sc.systems.size(); ++i) {
    const auto& ms = sc.systems[i];
    for (auto s : ms.states())
      ctx.out << fmt::format("{},{},{},{},{}\n", ms.name(), ms.state_name(s), num(tables[i][s]),
                             to_string(tables[i].method), num(tables[i].tolerance));
  }
  return 0;
}

struct SimulateFlags {
  bool robust = false;
  double epsilon = 0.1;
  double perturb = 0.0;
};

int cmd_simulate(const Context& ctx, const Common& c, const SimulateFlags& f) {
  const auto sc = load(ctx, c.scenario);
  const auto inst = sc.instance();
  const auto opts = grade_options(c);
  const auto grades = decision_grades(inst, opts);
  std::vector<RunOutcome> outcomes(c.runs);

  Runner runner;
  if (f.robust) {
    if (inst.sense() != Sense::utimax)
      throw Error(ErrorCode::invalid_argument, "robust play is defined for UtiMax scenarios");
    const auto params = robustness_params(inst, f.epsilon);
    std::vector<MarkovSystem> estimated_systems;
    for (std::size_t i = 0; i < inst.size(); ++i)
      estimated_systems.push_back(perturb_transitions(inst.system(i), f.perturb, mix_seed(ctx.seed, i)));
    const auto estimated = grade_tables(estimated_systems, opts);
    runner = [&, params, estimated](std::size_t id, std::uint64_t s) {
      outcomes[id] = run_robust_utimax(inst, estimated, params, sampled_source(inst, s));
      return outcomes[id].utility;
    };
  } else {
    runner = [&](std::size_t id, std::uint64_t s) {
      outcomes[id] = inst.sense() == Sense::utimax ? run_utimax(inst, grades, s) : run_dismin(inst, grades, s);
      return outcomes[id].utility;
    };
  }
  const auto utilities = mc_samples(runner, c.runs, ctx.seed);
  std::vector<double> prices;
  for (const auto& o : outcomes) prices.push_back(o.total_price);
  const auto u = summarize(utilities);
  const auto p = summarize(prices);

  if (c.json) {
    json runs = json::array();
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
      json traj = json::object();
      for (std::size_t i = 0; i < inst.size(); ++i) {
        json states = json::array();
        for (auto s : outcomes[r].traversed[i].visited) states.push_back(inst.system(i).state_name(s));
        traj[inst.system(i).name()] = states;
      }
      runs.push_back({{"run_id", r},
                      {"utility", outcomes[r].utility},
                      {"total_price", outcomes[r].total_price},
                      {"selected", outcomes[r].selected.elements()},
                      {"trajectories", traj}});
    }
    ctx.out << json{{"seed", ctx.seed},
                    {"runs", runs},
                    {"mean", u.mean},
                    {"stderr", u.stderr_mean}}
                   .dump(2)
            << "\n";
    return 0;
  }
  header(ctx);
  ctx.out << "run_id,utility,total_price,selected_set\n";
  for (std::size_t r = 0; r < outcomes.size(); ++r)
    ctx.out << fmt::format("{},{},{},{}\n", r, num(outcomes[r].utility), num(outcomes[r].total_price),
                           set_string(outcomes[r].selected));
  ctx.out << fmt::format("mean,{},{},\n", num(u.mean), num(p.mean));
  ctx.out << fmt::format("stderr,{},{},\n", num(u.stderr_mean), num(p.stderr_mean));
  return 0;
}

int cmd_oracle(const Context& ctx, const Common& c) {
  const auto sc = load(ctx, c.scenario);
  const auto inst = sc.instance();
  DpOptions opts;
  opts.record_policy = c.json;
  const auto dp = optimal_policy_dp(inst, opts);
  if (c.json) {
    json policy = json::array();
    for (const auto& e : dp.policy) {
      json states = json::object();
      for (std::size_t i = 0; i < inst.size(); ++i)
        states[inst.system(i).name()] = inst.system(i).state_name(e.states[i]);
      json entry{{"states", states}, {"action", to_string(e.action)}, {"value", e.value}};
      if (e.action.kind == ActionKind::stop) entry["chosen"] = e.chosen.elements();
      policy.push_back(std::move(entry));
    }
    ctx.out << json{{"optimal_value", dp.optimal_value}, {"state_count", dp.state_count}, {"policy", policy}}
                   .dump(2)
            << "\n";
    return 0;
  }
  header(ctx);
  ctx.out << "metric,value\n";
  ctx.out << fmt::format("optimal_value,{}\nstate_count,{}\n", num(dp.optimal_value), dp.state_count);
  return 0;
}

// Advance every system to a destination, then take the best feasible subset.
double probe_everything(const Instance& inst, std::uint64_t seed) {
  const auto profile = sample_profile(inst.systems(), seed);
  double price = 0.0;
  std::vector<double> values(inst.size(), 0.0);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& ms = inst.system(i);
    const auto& v = profile[i].visited;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) price += ms.price(v[k]);
    values[i] = ms.value(v.back());
  }
  const auto best = inst.best_selection(values, ElementSet::full(inst.size()));
  const double f = best.found ? best.value : (inst.sense() == Sense::utimax ? -kInf : kInf);
  return inst.sense() == Sense::utimax ? f - price : f + price;
}

struct Row {
  std::string name;
  double value;
  double stderr_mean;
  bool exact;
};

int cmd_compare(const Context& ctx, const Common& c, bool with_oracle) {
  const auto sc = load(ctx, c.scenario);
  const auto inst = sc.instance();
  const auto grades = decision_grades(inst, grade_options(c));
  std::vector<Row> rows;

  const auto adaptive = mc_estimate(
      [&](std::size_t, std::uint64_t s) {
        return (inst.sense() == Sense::utimax ? run_utimax(inst, grades, s) : run_dismin(inst, grades, s))
            .utility;
      },
      c.runs, ctx.seed);
  rows.push_back({"adaptive", adaptive.mean, adaptive.stderr_mean, false});
  if (inst.all_dag()) {
    try {
      rows.push_back({"adaptive_exact", exact_policy_value(inst, grades, adaptive_strategy(inst, grades)), 0.0, true});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::state_space_too_large) throw;
    }
  }
  SurrogateEstimate sur;
  try {
    sur = surrogate_estimate(inst, grades, c.runs, ctx.seed, true);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::too_large_for_exact) throw;
    sur = surrogate_estimate(inst, grades, c.runs, ctx.seed, false);
  }
  rows.push_back({"surrogate_bound", sur.mean, sur.stderr_mean, sur.exact});
  const auto everything =
      mc_estimate([&](std::size_t, std::uint64_t s) { return probe_everything(inst, s); }, c.runs, ctx.seed);
  rows.push_back({"probe_everything", everything.mean, everything.stderr_mean, false});
  const ElementSet none(inst.size());
  const std::vector<double> zeros(inst.size(), 0.0);
  const double nothing = inst.is_feasible(none) ? inst.score(none, zeros, 0.0)
                                                : (inst.sense() == Sense::utimax ? -kInf : kInf);
  rows.push_back({"probe_nothing", nothing, 0.0, true});

  std::optional<double> opt;
  if (with_oracle) {
    opt = optimal_policy_dp(inst).optimal_value;
    rows.push_back({"oracle_opt", *opt, 0.0, true});
  }
  header(ctx);
  ctx.out << "strategy,value,stderr,exact,ratio_to_opt\n";
  for (const auto& r : rows) {
    std::string ratio;
    if (opt && *opt != 0.0) ratio = fmt::format("{:.3f}", r.value / *opt);
    ctx.out << fmt::format("{},{},{},{},{}\n", r.name, num(r.value), num(r.stderr_mean),
                           r.exact ? "yes" : "no", ratio);
  }
  return 0;
}

int cmd_robustness(const Context& ctx, const Common& c, std::vector<double> epsilons,
                   std::vector<double> deltas) {
  const auto sc = load(ctx, c.scenario);
  const auto inst = sc.instance();
  if (inst.sense() != Sense::utimax)
    throw Error(ErrorCode::invalid_argument, "the robustness sweep runs UtiMax scenarios");
  if (epsilons.empty()) epsilons = {0.1, 0.01};
  if (deltas.empty()) deltas = {0.0, 1e-6};
  robustness_params(inst, epsilons.front());
  const auto opts = grade_options(c);
  const double opt = optimal_policy_dp(inst).optimal_value;

  header(ctx);
  ctx.out << "epsilon,delta,value,stderr,exact,opt,gap,delta_budget,within_budget,gap_within_epsilon\n";
  bool failed = false;
  for (double eps : epsilons) {
    const auto params = robustness_params(inst, eps);
    std::size_t kd = 0;
    for (auto d : params.depth) kd = std::max(kd, d);
    const double budget = eps / (8.0 * params.L * static_cast<double>(params.k * std::max<std::size_t>(kd, 1)));
    for (double delta : deltas) {
      std::vector<MarkovSystem> est_systems;
      for (std::size_t i = 0; i < inst.size(); ++i)
        est_systems.push_back(perturb_transitions(inst.system(i), delta, mix_seed(ctx.seed, i)));
      const auto est = grade_tables(est_systems, opts);
      double value = 0.0;
      double se = 0.0;
      bool exact = true;
      try {
        value = robust_expected_utility(inst, est, params);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::too_large_for_exact) throw;
        exact = false;
        const auto m = mc_estimate(
            [&](std::size_t, std::uint64_t s) {
              return run_robust_utimax(inst, est, params, sampled_source(inst, s)).utility;
            },
            c.runs, ctx.seed);
        value = m.mean;
        se = m.stderr_mean;
      }
      const double gap = opt - value;
      const bool within = delta <= budget;
      const bool ok = gap <= eps + 3.0 * se + 1e-9;
      if (within && !ok) failed = true;
      ctx.out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", num(eps), num(delta), num(value), num(se),
                             exact ? "yes" : "no", num(opt), num(gap), num(budget), within ? "yes" : "no",
                             ok ? "yes" : "no");
    }
  }
  if (failed) {
    ctx.err << "robustness check failed: a gap exceeded epsilon inside the perturbation budget\n";
    return kExitCheckFailed;
  }
  return 0;
}

int cmd_commitment(const Context& ctx, const Common& c, const std::string& order_mode) {
  const auto sc = load(ctx, c.scenario);
  if (!sc.packing)
    throw Error(ErrorCode::invalid_argument, "commitment play is defined for packing (UtiMax) scenarios");
  if (order_mode != "identity" && order_mode != "adversarial")
    throw Error(ErrorCode::invalid_argument, "--order must be identity or adversarial");
  const auto lp = build_lp(sc.systems, *sc.packing);
  const auto sol = solve_lp(lp);
  const std::size_t n = sc.systems.size();

  if (c.json) {
    json x = json::object();
    json y = json::object();
    json z = json::object();
    for (std::size_t i = 0; i < n; ++i) {
      x[sc.systems[i].name()] = sol.x[i];
      y[sc.systems[i].name()] = state_map(sc.systems[i], sol.y[i]);
      z[sc.systems[i].name()] = state_map(sc.systems[i], sol.z[i]);
    }
    ctx.out << json{{"lp_value", sol.objective_value}, {"x", x}, {"y", y}, {"z", z}}.dump(2) << "\n";
    return 0;
  }

  const auto fixed = OcrsScheme::for_polytope(*sc.packing, sol.x, identity_order(n));
  std::vector<unsigned char> hits(c.runs * n, 0);
  const auto est = mc_estimate(
      [&](std::size_t id, std::uint64_t s) {
        CommitmentOutcome o;
        if (order_mode == "adversarial") {
          const auto scheme = OcrsScheme::for_polytope(*sc.packing, sol.x, random_order(n, mix_seed(s, 1)));
          o = run_commitment(sc.systems, sol, scheme, s);
        } else {
          o = run_commitment(sc.systems, sol, fixed, s);
        }
        for (auto e : o.selected.elements()) hits[id * n + e] = 1;
        return o.utility;
      },
      c.runs, ctx.seed);

  header(ctx);
  ctx.out << fmt::format("# ocrs {}, order {}\n", to_string(fixed.kind()), order_mode);
  std::string cols = "lp_value,mean_utility,stderr";
  std::string vals = fmt::format("{},{},{}", num(sol.objective_value), num(est.mean), num(est.stderr_mean));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t r = 0; r < c.runs; ++r) count += hits[r * n + i];
    cols += ",selectability_" + sc.systems[i].name();
    vals += "," + (sol.x[i] > 1e-12 ? num(static_cast<double>(count) / (static_cast<double>(c.runs) * sol.x[i]))
                                    : std::string("nan"));
  }
  ctx.out << cols << "\n" << vals << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markovian price of information: grades, adaptive probing, oracles and commitment"};
  app.set_version_flag("--version", std::string(MPOI_VERSION));
  app.require_subcommand(1);

  Common c;
  SimulateFlags sim;
  bool with_oracle = false;
  std::vector<double> epsilons;
  std::vector<double> deltas;
  std::string order = "identity";

  auto add_common = [&](CLI::App* sub, bool runs) {
    sub->add_option("scenario", c.scenario, "Scenario JSON file")->required();
    sub->add_option("--seed", c.seed, "Master seed (overrides MPOI_SEED)");
    sub->add_option("--tol", c.tol, "Grade tolerance")->check(CLI::PositiveNumber);
    sub->add_flag("--json", c.json, "Emit JSON instead of CSV");
    if (runs) sub->add_option("--runs", c.runs, "Monte Carlo runs")->check(CLI::Range(2ULL, 100'000'000ULL));
  };

  auto* validate = app.add_subcommand("validate", "Load and check a scenario, print its name maps");
  add_common(validate, false);
  auto* grade_cmd = app.add_subcommand("grade", "Per-state grade table");
  add_common(grade_cmd, false);
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo runs of the adaptive strategy");
  add_common(simulate_cmd, true);
  simulate_cmd->add_flag("--robust", sim.robust, "Play the robust variant");
  simulate_cmd->add_option("--epsilon", sim.epsilon, "Additive error target of the robust variant")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--perturb", sim.perturb, "Transition perturbation used to estimate grades")
      ->check(CLI::NonNegativeNumber);
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact optimal adaptive value by dynamic programming");
  add_common(oracle_cmd, false);
  auto* compare_cmd = app.add_subcommand("compare", "Adaptive strategy against bounds and baselines");
  add_common(compare_cmd, true);
  compare_cmd->add_flag("--with-oracle", with_oracle, "Also run the exact oracle");
  auto* robust_cmd = app.add_subcommand("robustness", "Sweep over epsilon and transition perturbations");
  add_common(robust_cmd, true);
  robust_cmd->add_option("--epsilon", epsilons, "Epsilon values")->delimiter(',');
  robust_cmd->add_option("--perturb", deltas, "Perturbation magnitudes")->delimiter(',');
  auto* commit_cmd = app.add_subcommand("commitment", "LP relaxation and OCRS play under commitment");
  add_common(commit_cmd, true);
  commit_cmd->add_option("--order", order, "identity or adversarial (random order per run)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  std::string line = "mpoi";
  for (int i = 1; i < argc; ++i) line += std::string(" ") + argv[i];
  try {
    Context ctx{out, err, line, resolve_seed(c.seed)};
    if (validate->parsed()) return cmd_validate(ctx, c);
    if (grade_cmd->parsed()) return cmd_grade(ctx, c);
    if (simulate_cmd->parsed()) return cmd_simulate(ctx, c, sim);
    if (oracle_cmd->parsed()) return cmd_oracle(ctx, c);
    if (compare_cmd->parsed()) return cmd_compare(ctx, c, with_oracle);
    if (robust_cmd->parsed()) return cmd_robustness(ctx, c, epsilons, deltas);
    if (commit_cmd->parsed()) return cmd_commitment(ctx, c, order);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::not_dag) err << "see docs/robustness.md for why cyclic systems are refused\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace mpoi::cli
