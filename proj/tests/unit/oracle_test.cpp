#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "generators.hpp"
#include "mpoi/adaptive.hpp"
#include "mpoi/error.hpp"
#include "mpoi/oracle.hpp"
#include "oracles.hpp"

using namespace mpoi;
using namespace mpoi::testing;

namespace {

Instance rank1(std::vector<MarkovSystem> systems) {
  const std::size_t n = systems.size();
  return Instance::packing(std::move(systems), PackingOracle::matroid(Matroid::uniform(n, 1)));
}

MarkovSystem coin_box() {
  const std::pair<double, double> out[] = {{10.0, 0.5}, {0.0, 0.5}};
  return single_stage(1.0, out, "A");
}

// A deterministic but otherwise arbitrary legal strategy keyed by `salt`.
Strategy scrambled(const Instance& inst, std::uint64_t salt) {
  return [&inst, salt](const JointState& s) {
    std::uint64_t h = salt;
    for (auto c : s.current) h = mix_seed(h, c.index);
    for (auto p : s.picks) h = mix_seed(h, p + 101);
    std::vector<Action> legal;
    for (std::size_t i = 0; i < inst.size(); ++i)
      for (const auto& a : {Action::advance(i), Action::select(i)}) {
        try {
          check_action(inst, s, a);
          legal.push_back(a);
        } catch (const Error&) {
        }
      }
    if (legal.empty() || h % 5 == 0) return Action::stop();
    return legal[h % legal.size()];
  };
}

}  // namespace

TEST(Dp, SingleChain) {
  const auto inst = rank1({deterministic_chain(1.0, 5.0)});
  EXPECT_NEAR(optimal_policy_dp(inst).optimal_value, 4.0, 1e-12);
}

TEST(Dp, TwoSystemFixture) {
  const auto inst = rank1({coin_box(), deterministic_chain(0.0, 3.0, "B")});
  EXPECT_NEAR(optimal_policy_dp(inst).optimal_value, 5.5, 1e-12);
  EXPECT_NEAR(optimal_policy_dp(fixture("two_system.json").instance()).optimal_value, 5.5, 1e-12);
}

TEST(Dp, NegativeSystemsStopAtOnce) {
  const auto inst = rank1({deterministic_chain(6.0, 5.0), deterministic_chain(2.0, 1.0, "b")});
  EXPECT_DOUBLE_EQ(optimal_policy_dp(inst).optimal_value, 0.0);
}

TEST(Dp, RecordsPolicy) {
  DpOptions opts;
  opts.record_policy = true;
  const auto r = optimal_policy_dp(rank1({deterministic_chain(1.0, 5.0)}), opts);
  ASSERT_FALSE(r.policy.empty());
  EXPECT_GT(r.state_count, 0U);
}

TEST(Dp, StateCap) {
  DpOptions opts;
  opts.state_cap = 1;
  try {
    optimal_policy_dp(rank1({coin_box(), deterministic_chain(0.0, 3.0, "B")}), opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::state_space_too_large);
  }
}

TEST(Dp, RefusesCyclicSystems) {
  const auto sc = fixture("f1_dag_necessity.json");
  try {
    optimal_policy_dp(sc.instance());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_dag);
  }
}

TEST(PolicyValue, StopImmediately) {
  const auto inst = rank1({coin_box(), deterministic_chain(0.0, 3.0, "B")});
  const auto grades = decision_grades(inst);
  EXPECT_DOUBLE_EQ(exact_policy_value(inst, grades, [](const JointState&) { return Action::stop(); }), 0.0);
}

TEST(PolicyValue, IllegalActionIsReported) {
  const auto inst = rank1({deterministic_chain(1.0, 5.0)});
  const auto grades = decision_grades(inst);
  try {
    exact_policy_value(inst, grades, [](const JointState&) { return Action::select(0); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undefined_action);
  }
}

TEST(PolicyValue, DpDominatesScrambledStrategies) {
  for (const char* name : {"two_system.json", "triangle_graphic.json", "asymmetric_pair.json"}) {
    const auto inst = fixture(name).instance();
    const auto grades = decision_grades(inst);
    const double opt = optimal_policy_dp(inst).optimal_value;
    for (std::uint64_t salt = 0; salt < 50; ++salt)
      EXPECT_LE(exact_policy_value(inst, grades, scrambled(inst, salt)), opt + 1e-9) << name << " " << salt;
  }
}

TEST(PolicyValue, AdaptiveBelowDpBelowSurrogate) {
  RandomStream rng(77);
  for (int t = 0; t < 40; ++t) {
    const auto inst = random_utimax(rng);
    const auto grades = decision_grades(inst);
    const double adaptive = exact_policy_value(inst, grades, adaptive_strategy(inst, grades));
    const double opt = optimal_policy_dp(inst).optimal_value;
    const auto sur = surrogate_estimate(inst, grades, 0, 1, true);
    EXPECT_LE(adaptive, opt + 1e-9);
    EXPECT_LE(opt, sur.mean + 1e-9);
  }
}

TEST(Profiles, Counts) {
  const auto chain = deterministic_chain(1.0, 5.0);
  auto one = enumerate_profiles(std::span(&chain, 1));
  ASSERT_EQ(one.size(), 1U);
  EXPECT_DOUBLE_EQ(one[0].weight, 1.0);

  const std::vector<MarkovSystem> pair = {coin_box(), deterministic_chain(0.0, 3.0, "B")};
  const auto two = enumerate_profiles(pair);
  ASSERT_EQ(two.size(), 2U);
  EXPECT_DOUBLE_EQ(two[0].weight, 0.5);

  const std::pair<double, double> a[] = {{1.0, 0.25}, {0.0, 0.75}};
  const std::pair<double, double> b[] = {{1.0, 0.5}, {0.0, 0.5}};
  const std::pair<double, double> c[] = {{1.0, 0.1}, {0.0, 0.9}};
  const std::vector<MarkovSystem> three = {single_stage(0.1, a, "a"), single_stage(0.1, b, "b"),
                                           single_stage(0.1, c, "c")};
  const auto eight = enumerate_profiles(three);
  ASSERT_EQ(eight.size(), 8U);
  double total = 0.0;
  double min_w = 1.0;
  for (const auto& p : eight) {
    total += p.weight;
    min_w = std::min(min_w, p.weight);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(min_w, 0.25 * 0.5 * 0.1, 1e-15);
}

TEST(Profiles, CapIsEnforced) {
  const std::vector<MarkovSystem> pair = {coin_box(), coin_box()};
  try {
    enumerate_profiles(pair, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::too_many_profiles);
  }
}
