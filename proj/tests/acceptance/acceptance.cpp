// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "mpoi/adaptive.hpp"
#include "mpoi/commitment.hpp"
#include "mpoi/error.hpp"
#include "mpoi/grade.hpp"
#include "mpoi/oracle.hpp"
#include "mpoi/scenario.hpp"
#include "mpoi/stats.hpp"
#include "mpoi/teasing.hpp"
#include "oracles.hpp"

using namespace mpoi;
using namespace mpoi::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

Scenario fixture(const std::string& name) { return load_scenario(std::string(MPOI_FIXTURE_DIR) + "/" + name); }

const std::vector<std::string> kDagFixtures = {
    "pandora_weitzman.json", "two_system.json",        "triangle_graphic.json", "triangle_spanning_tree.json",
    "set_cover_trio.json",   "commitment_partition.json", "matching_path.json",  "asymmetric_pair.json",
    "epoch_rise_fall.json",  "f2_bounded_input.json"};

std::vector<Instance> dag_fixture_instances(bool utimax_only, bool matroid_only) {
  std::vector<Instance> out;
  for (const auto& f : kDagFixtures) {
    auto sc = fixture(f);
    if (utimax_only && sc.mode != Sense::utimax) continue;
    if (matroid_only && sc.packing && !sc.packing->is_matroid()) continue;
    if (matroid_only && sc.covering && sc.covering->kind() != CoveringKind::matroid_base) continue;
    out.push_back(sc.instance());
  }
  return out;
}

// The 100 + 100 small instances shared by criteria 4 to 6.
struct SmallBatch {
  std::vector<Instance> utimax;
  std::vector<Instance> dismin;
};

const SmallBatch& small_batch() {
  static const SmallBatch batch = [] {
    SmallBatch b;
    RandomStream rng(mix_seed(2024, 4));
    for (int i = 0; i < 100; ++i) b.utimax.push_back(random_utimax(rng, 3, 6, 2));
    for (int i = 0; i < 100; ++i) b.dismin.push_back(random_base_dismin(rng, 3, 6, 2));
    return b;
  }();
  return batch;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------

Verdict criterion_1() {
  RandomStream rng(mix_seed(2024, 1));
  double worst_zero = 0.0;
  double worst_ref = 0.0;
  std::size_t monotone_breaks = 0;
  for (int k = 0; k < 50; ++k) {
    const auto ms = random_dag(rng, 12);
    const auto table = grade_table(ms);
    for (auto v : ms.states()) {
      worst_zero = std::max(worst_zero, std::abs(ref_penalized_utility(ms, v, table[v])));
      worst_ref = std::max(worst_ref, std::abs(table[v] - ref_grade(ms, v)));
      double prev = kInfinity;
      for (int j = 0; j < 100; ++j) {
        const double tau = -30.0 + 0.45 * j;
        const double u = penalized_utility(ms, v, tau);
        if (u > prev + 1e-12) ++monotone_breaks;
        prev = u;
      }
    }
  }
  return {worst_zero <= 1e-9 && monotone_breaks == 0 && worst_ref <= 1e-8,
          "max |U(grade)| " + fmt_double(worst_zero) + ", max |grade - play-set reference| " +
              fmt_double(worst_ref) + ", monotonicity breaks " + std::to_string(monotone_breaks)};
}

Verdict criterion_2() {
  RandomStream rng(mix_seed(2024, 2));
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto box = random_box(rng);
    const double w = weitzman_index(box.outcomes, box.price);
    const auto ms = box_system(box);
    worst = std::max(worst, std::abs(w - grade(ms, ms.start())));
  }
  return {worst <= 2e-9, "max |index - grade| " + fmt_double(worst) + " over 50 boxes"};
}

Verdict criterion_3() {
  RandomStream rng(mix_seed(2024, 3));
  std::size_t failures = 0;
  std::array<std::size_t, 4> counts{};
  for (int k = 0; k < 500; ++k) {
    const int family = k % 4;
    Instance inst = family == 0   ? random_utimax(rng, 4, 6, 3)
                    : family == 1 ? random_matching(rng)
                    : family == 2 ? random_set_cover(rng)
                                  : random_base_dismin(rng, 4, 6, 3);
    ++counts[static_cast<std::size_t>(family)];
    const auto grades = decision_grades(inst);
    const auto profile = sample_profile(inst.systems(), rng.next_u64());
    std::vector<double> proxies;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      const auto g = inst.sense() == Sense::utimax ? ref_grades(inst.system(i)) : ref_negated_grades(inst.system(i));
      const double y = ref_prevailing(g, profile[i].visited);
      proxies.push_back(inst.sense() == Sense::utimax ? y : -y);
    }
    const auto outcome = inst.sense() == Sense::utimax ? run_utimax_replayed(inst, grades, profile)
                                                       : run_dismin_replayed(inst, grades, profile);
    if (!(outcome.selected == inst.frugal(proxies).selected)) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " mismatches over 500 profiles (matroid " +
                             std::to_string(counts[0]) + ", matching " + std::to_string(counts[1]) +
                             ", set cover " + std::to_string(counts[2]) + ", matroid base " +
                             std::to_string(counts[3]) + ")"};
}

Verdict criterion_4() {
  std::size_t failures = 0;
  double worst = 0.0;
  for (const auto* batch : {&small_batch().utimax, &small_batch().dismin}) {
    for (const auto& inst : *batch) {
      const auto grades = decision_grades(inst);
      const double adaptive = exact_policy_value(inst, grades, adaptive_strategy(inst, grades));
      const double opt = optimal_policy_dp(inst).optimal_value;
      worst = std::max(worst, std::abs(adaptive - opt));
      if (std::abs(adaptive - opt) > 1e-6) ++failures;
    }
  }
  return {failures == 0, std::to_string(failures) + " of 200 instances off OPT, max |adaptive - OPT| " +
                             fmt_double(worst)};
}

// E over profiles of the surrogate optimum and of the frugal value on the
// surrogate, both from reference prevailing values.
std::pair<double, double> surrogate_pair(const Instance& inst) {
  std::vector<std::vector<double>> g;
  for (const auto& ms : inst.systems())
    g.push_back(inst.sense() == Sense::utimax ? ref_grades(ms) : ref_negated_grades(ms));
  double sur = 0.0;
  double frugal = 0.0;
  for (const auto& wp : enumerate_profiles(inst.systems())) {
    std::vector<double> y;
    std::vector<double> proxies;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      const double p = ref_prevailing(g[i], wp.profile[i].visited);
      y.push_back(inst.sense() == Sense::utimax ? p : -p);
      proxies.push_back(y.back());
    }
    sur += wp.weight * ref_best_subset(inst, y);
    frugal += wp.weight * inst.objective().evaluate(inst.frugal(proxies).selected, y);
  }
  return {sur, frugal};
}

Verdict criterion_5() {
  std::size_t violations = 0;
  double slack = kInfinity;
  for (const auto* batch : {&small_batch().utimax, &small_batch().dismin}) {
    for (const auto& inst : *batch) {
      const double opt = optimal_policy_dp(inst).optimal_value;
      const double sur = surrogate_pair(inst).first;
      const double margin = inst.sense() == Sense::utimax ? sur - opt : opt - sur;
      slack = std::min(slack, margin);
      if (margin < -1e-9) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over 200 instances, smallest margin " +
                               fmt_double(slack)};
}

Verdict criterion_6() {
  std::vector<const Instance*> all;
  for (const auto& inst : small_batch().utimax) all.push_back(&inst);
  for (const auto& inst : small_batch().dismin) all.push_back(&inst);
  const auto fixtures = dag_fixture_instances(false, false);
  for (const auto& inst : fixtures) all.push_back(&inst);
  double worst = 0.0;
  for (const auto* inst : all) {
    const auto grades = decision_grades(*inst);
    const double adaptive = exact_policy_value(*inst, grades, adaptive_strategy(*inst, grades));
    worst = std::max(worst, std::abs(adaptive - surrogate_pair(*inst).second));
  }
  return {worst <= 1e-9, "max |adaptive - E[f(A(Y), Y)]| " + fmt_double(worst) + " over " +
                             std::to_string(all.size()) + " instances"};
}

Verdict criterion_7() {
  double worst = 0.0;
  std::size_t games = 0;
  auto check = [&](const std::vector<MarkovSystem>& systems) {
    const auto grades = grade_tables(systems);
    for (const auto& schedule : {index_schedule(systems, grades), sequential_schedule(systems)}) {
      worst = std::max(worst, std::abs(teasing_game_value(systems, grades, schedule, select_if_not_below_prevailing())));
      ++games;
    }
  };
  for (const auto& f : kDagFixtures) check(fixture(f).systems);
  for (const auto& inst : small_batch().utimax) check(inst.systems());

  const auto inst = fixture("asymmetric_pair.json").instance();
  const auto grades = decision_grades(inst);
  EvalOptions opts;
  opts.track_steps = true;
  const double alternating = exact_policy_value(inst, grades, alternating_strategy(inst, grades), opts);
  const double opt = optimal_policy_dp(inst).optimal_value;
  return {worst <= 1e-9 && alternating < opt - 1e-9,
          "max |teasing value| " + fmt_double(worst) + " over " + std::to_string(games) +
              " games; alternating play " + fmt_double(alternating) + " vs OPT " + fmt_double(opt)};
}

Verdict criterion_8() {
  std::vector<Instance> insts = dag_fixture_instances(true, true);
  for (const auto& inst : small_batch().utimax) insts.push_back(inst);
  std::size_t value_failures = 0;
  std::size_t bound_failures = 0;
  std::size_t runs = 0;
  double min_margin = kInfinity;
  std::uint64_t seed = mix_seed(2024, 8);
  for (const double eps : {0.1, 0.01}) {
    for (const auto& inst : insts) {
      const auto params = robustness_params(inst, eps);
      const auto truth = decision_grades(inst);
      std::vector<double> magnitude;
      for (std::size_t i = 0; i < inst.size(); ++i) magnitude.push_back(params.grade_budget(i));
      const auto est = inject_grade_noise(inst, truth, magnitude, ++seed);
      const double opt = optimal_policy_dp(inst).optimal_value;
      double value = 0.0;
      for (const auto& wp : enumerate_profiles(inst.systems())) {
        const auto out = run_robust_utimax(inst, est, params, replay_source(wp.profile));
        value += wp.weight * out.utility;
        ++runs;
        for (std::size_t i = 0; i < inst.size(); ++i) {
          const double y = ref_prevailing(truth[i].grades, out.traversed[i].visited);
          if (std::abs(out.prevailing[i] - y) > eps / (2.0 * static_cast<double>(params.k)) + 1e-12) ++bound_failures;
        }
      }
      min_margin = std::min(min_margin, value - (opt - eps));
      if (value < opt - eps) ++value_failures;
    }
  }
  bool cyclic_refused = false;
  try {
    robustness_params(fixture("f1_dag_necessity.json").instance(), 0.1);
  } catch (const Error& e) {
    cyclic_refused = e.code() == ErrorCode::not_dag;
  }
  return {value_failures == 0 && bound_failures == 0 && cyclic_refused,
          std::to_string(value_failures) + " of " + std::to_string(2 * insts.size()) +
              " (instance, eps) pairs below OPT - eps (smallest margin " + fmt_double(min_margin) + "), " +
              std::to_string(bound_failures) + " Y-hat bound breaches over " + std::to_string(runs) +
              " replays, cyclic input " + (cyclic_refused ? "refused" : "accepted")};
}

Verdict criterion_9() {
  std::vector<std::pair<std::string, MarkovSystem>> systems;
  for (const auto& f : kDagFixtures)
    for (const auto& ms : fixture(f).systems) systems.emplace_back(f + ":" + ms.name(), ms);
  RandomStream rng(mix_seed(2024, 9));
  for (int k = 0; k < 20; ++k) systems.emplace_back("random" + std::to_string(k), random_dag(rng, 8));
  double worst_c = 0.0;
  std::string worst_name;
  std::ostringstream report;
  for (const auto& [name, ms] : systems) {
    const auto cl = classify(ms);
    const double D = static_cast<double>(std::max<std::size_t>(1, *cl.depth));
    const double L = D * D * std::max(1.0, ms.max_abs_parameter()) / ms.min_positive_probability();
    const auto truth = grade_table(ms);
    double c = 0.0;
    for (const double delta : {1e-6, 1e-7}) {
      const auto est = grade_table(perturb_transitions(ms, delta, rng.next_u64()));
      for (auto v : ms.states()) c = std::max(c, std::abs(est[v] - truth[v]) / (L * delta));
    }
    report << " " << name << "=" << fmt_double(c);
    if (c > worst_c) {
      worst_c = c;
      worst_name = name;
    }
  }
  std::cout << "  per-fixture C:" << report.str() << "\n";
  return {worst_c <= 10.0, "measured C = " + fmt_double(worst_c) + " (worst " + worst_name + ") over " +
                               std::to_string(systems.size()) + " systems"};
}

Verdict criterion_10() {
  RandomStream rng(mix_seed(2024, 10));
  std::size_t lp_failures = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = pick(rng, 1, 3);
    auto systems = random_systems(rng, n, 6);
    const auto oracle = PackingOracle::matroid(Matroid::uniform(n, 1));
    const double opt = optimal_policy_dp(Instance::packing(systems, oracle)).optimal_value;
    if (!lp_upper_bound_check(systems, oracle, opt)) ++lp_failures;
  }

  double worst_sel = 0.0;
  double worst_q = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<double> x(n);
      double total = 0.0;
      for (auto& v : x) total += (v = rng.uniform());
      const double scale = between(rng, 0.3, 1.0) / total;
      for (auto& v : x) v *= scale;
      const auto order = random_order(n, rng.next_u64());
      const auto scheme = OcrsScheme::rank1(x, order);
      const auto ref_q = ref_rank1_q(x, order);
      for (std::size_t i = 0; i < n; ++i) worst_q = std::max(worst_q, std::abs(scheme.q()[i] - ref_q[i]));
      for (double s : ref_rank1_selectability(x, scheme.q(), order)) worst_sel = std::max(worst_sel, std::abs(s - 0.5));
    }
  }

  std::string mc_detail;
  bool mc_ok = true;
  for (const auto* name : {"pandora_weitzman.json", "two_system.json", "asymmetric_pair.json",
                           "commitment_partition.json"}) {
    const auto sc = fixture(name);
    const auto sol = solve_lp(build_lp(sc.systems, *sc.packing));
    const auto scheme = OcrsScheme::for_polytope(*sc.packing, sol.x, identity_order(sc.systems.size()));
    const auto est = mc_estimate(
        [&](std::size_t, std::uint64_t s) { return run_commitment(sc.systems, sol, scheme, s).utility; },
        1'000'000, mix_seed(2024, 1010));
    const bool ok = est.mean >= 0.5 * sol.objective_value - 3.0 * est.stderr_mean;
    mc_ok = mc_ok && ok;
    mc_detail += std::string(" ") + sc.name + " " + fmt_double(est.mean) + "/" + fmt_double(sol.objective_value);
  }
  return {lp_failures == 0 && worst_sel <= 1e-12 && worst_q <= 1e-12 && mc_ok,
          std::to_string(lp_failures) + " of 100 LP bounds below OPT, max |selectability - 1/2| " +
              fmt_double(worst_sel) + ", mean/LP over 1e6 runs:" + mc_detail};
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  pclose(pipe);
  return out;
}

Verdict criterion_11() {
  const std::string cmd = std::string("\"") + MPOI_CLI_PATH + "\" simulate \"" + MPOI_FIXTURE_DIR +
                          "/two_system.json\" --runs 1000 --seed 7";
  const auto a = capture(cmd);
  const auto b = capture(cmd);
  const bool ok = !a.empty() && a == b && a.find("mean,") != std::string::npos;
  return {ok, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"grade correctness", criterion_1},
      {"index equivalence on single-stage boxes", criterion_2},
      {"replay equals frugal on prevailing values", criterion_3},
      {"matroid optimality against the DP", criterion_4},
      {"surrogate bound", criterion_5},
      {"adaptive utility equals frugal-on-surrogate expectation", criterion_6},
      {"teasing game fairness", criterion_7},
      {"robust play within epsilon", criterion_8},
      {"grade sensitivity to transition noise", criterion_9},
      {"commitment LP and OCRS", criterion_10},
      {"CLI determinism", criterion_11},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << " (" << criteria[k].first
              << "): " << v.detail << " [" << fmt_double(secs) << " s]" << std::endl;
    if (!v.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
