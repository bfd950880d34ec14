#include <gtest/gtest.h>

#include "mpoi/error.hpp"
#include "mpoi/markov_system.hpp"
#include "mpoi/random.hpp"

using namespace mpoi;

namespace {

StateId S(std::uint32_t i) { return StateId{i}; }

SystemDraft chain_draft() {
  SystemDraft d("chain");
  const auto s = d.add_state("s");
  const auto t = d.add_state("t");
  d.start(s).price(s, 1.0).destination(t, 5.0).edge(s, t, 1.0);
  return d;
}

MarkovSystem weitzman(double p = 0.5) {
  const std::pair<double, double> out[] = {{2.0, p}, {0.0, 1.0 - p}};
  return single_stage(0.5, out, "w");
}

MarkovSystem cycle_system(double exit) {
  SystemDraft d("cyc");
  const auto s = d.add_state("s");
  const auto v = d.add_state("v");
  const auto t = d.add_state("t");
  d.start(s).price(s, 0.1).price(v, 0.0).destination(t, 1.0);
  d.edge(s, v, 1.0).edge(v, s, 1.0 - exit).edge(v, t, exit);
  return MarkovSystem::from_draft(d);
}

}  // namespace

TEST(Validate, MinimalChainIsLegal) { EXPECT_TRUE(validate_system(chain_draft()).ok()); }

TEST(Validate, ShortRowIsNotStochastic) {
  SystemDraft d("short");
  const auto s = d.add_state("s");
  const auto a = d.add_state("a");
  const auto b = d.add_state("b");
  d.start(s).price(s, 1.0).destination(a, 1.0).destination(b, 0.0).edge(s, a, 0.5).edge(s, b, 0.4);
  const auto r = validate_system(d);
  EXPECT_TRUE(r.has(IssueKind::row_not_stochastic));
  EXPECT_THROW(MarkovSystem::from_draft(d), Error);
}

TEST(Validate, ProbabilityAboveOneIsNotStochastic) {
  SystemDraft d("big");
  const auto s = d.add_state("s");
  const auto a = d.add_state("a");
  d.start(s).price(s, 1.0).destination(a, 1.0).edge(s, a, 1.2);
  EXPECT_TRUE(validate_system(d).has(IssueKind::row_not_stochastic));
}

TEST(Validate, ClosedCycleCannotReachDestination) {
  SystemDraft d("loop");
  const auto s = d.add_state("s");
  const auto v = d.add_state("v");
  const auto t = d.add_state("t");
  d.start(s).price(s, 1.0).price(v, 1.0).destination(t, 1.0).edge(s, v, 1.0).edge(v, s, 1.0);
  EXPECT_TRUE(validate_system(d).has(IssueKind::unreachable_destination));
}

TEST(Validate, MissingPriceAndValueAreReported) {
  SystemDraft d("holes");
  const auto s = d.add_state("s");
  const auto t = d.add_state("t");
  d.start(s).destination(t).edge(s, t, 1.0);
  const auto r = validate_system(d);
  EXPECT_TRUE(r.has(IssueKind::price_missing));
  EXPECT_TRUE(r.has(IssueKind::value_missing));
}

TEST(Validate, NegativePriceIsRejected) {
  auto d = chain_draft();
  d.price(S(0), -1.0);
  EXPECT_TRUE(validate_system(d).has(IssueKind::negative_price));
}

TEST(Classify, DirectEdgeHasDepthOne) {
  const auto c = classify(deterministic_chain(1.0, 5.0));
  EXPECT_TRUE(c.is_dag);
  EXPECT_EQ(c.depth, 1U);
}

TEST(Classify, DepthIsLongestPath) {
  SystemDraft d("two");
  const auto s = d.add_state("s");
  const auto v = d.add_state("v");
  const auto t = d.add_state("t");
  d.start(s).price(s, 1.0).price(v, 1.0).destination(t, 1.0).edge(s, v, 0.5).edge(s, t, 0.5).edge(v, t, 1.0);
  const auto c = classify(MarkovSystem::from_draft(d));
  EXPECT_TRUE(c.is_dag);
  EXPECT_EQ(c.depth, 2U);
}

TEST(Classify, CycleHasNoDepth) {
  const auto c = classify(cycle_system(1.0 / 64));
  EXPECT_FALSE(c.is_dag);
  EXPECT_FALSE(c.depth.has_value());
  EXPECT_FALSE(topological_order(cycle_system(0.5)).has_value());
}

TEST(SampleStep, DeterministicEdge) {
  RandomStream rng(1);
  const auto ms = deterministic_chain(1.0, 5.0);
  EXPECT_EQ(sample_step(ms, ms.start(), rng), S(1));
}

TEST(SampleStep, EmpiricalFrequencyMatchesRow) {
  RandomStream rng(42);
  const auto ms = weitzman();
  int hits = 0;
  for (int k = 0; k < 100000; ++k) hits += sample_step(ms, ms.start(), rng) == S(1);
  EXPECT_NEAR(hits / 100000.0, 0.5, 0.01);
}

TEST(SampleStep, FromDestinationThrows) {
  RandomStream rng(1);
  const auto ms = deterministic_chain(1.0, 5.0);
  try {
    sample_step(ms, S(1), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::step_from_destination);
  }
}

TEST(SampleTrajectory, ChainVisitsBothStates) {
  RandomStream rng(3);
  const auto traj = sample_trajectory(deterministic_chain(1.0, 5.0), 0, rng);
  ASSERT_EQ(traj.visited.size(), 2U);
  EXPECT_TRUE(traj.terminated);
  EXPECT_EQ(traj.last(), S(1));
}

TEST(SampleTrajectory, SplitsEvenly) {
  RandomStream rng(5);
  const auto ms = weitzman();
  int first = 0;
  for (int k = 0; k < 100000; ++k) {
    const auto traj = sample_trajectory(ms, 0, rng);
    EXPECT_EQ(traj.steps(), 1U);
    first += traj.last() == S(1);
  }
  EXPECT_NEAR(first / 100000.0, 0.5, 0.01);
}

TEST(SampleTrajectory, CeilingStopsNearlyClosedCycle) {
  RandomStream rng(9);
  try {
    sample_trajectory(cycle_system(1e-9), 0, rng, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_terminating);
  }
}

TEST(SampleTrajectory, DagTrajectoriesRespectDepthAndPassChecks) {
  SystemDraft d("tree");
  const auto s = d.add_state("s");
  const auto a = d.add_state("a");
  const auto b = d.add_state("b");
  const auto t = d.add_state("t");
  d.start(s).price(s, 1).price(a, 1).destination(b, 1).destination(t, 2);
  d.edge(s, a, 0.3).edge(s, b, 0.7).edge(a, t, 1.0);
  const auto ms = MarkovSystem::from_draft(d);
  const auto depth = *classify(ms).depth;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomStream rng(seed);
    const auto traj = sample_trajectory(ms, 0, rng);
    EXPECT_LE(traj.steps(), depth);
    EXPECT_EQ(check_trajectory(ms, traj), "");
  }
}

TEST(Profile, IdsMustFormPermutation) {
  Trajectory a;
  a.system_id = 0;
  a.visited = {S(0)};
  Trajectory b = a;
  EXPECT_THROW(TrajectoryProfile({a, b}), Error);
  b.system_id = 1;
  EXPECT_NO_THROW(TrajectoryProfile({b, a}));
}

TEST(Profile, SamplingIsSeedDeterministic) {
  const std::vector<MarkovSystem> systems = {weitzman(), weitzman(0.3), deterministic_chain(1, 2)};
  const auto p = sample_profile(systems, 77);
  const auto q = sample_profile(systems, 77);
  for (std::size_t i = 0; i < systems.size(); ++i) EXPECT_EQ(p[i].visited, q[i].visited);
}

TEST(MarkovSystem, DraftNormalizesAndNegates) {
  const auto ms = MarkovSystem::from_draft(chain_draft());
  EXPECT_EQ(ms.find_state("t"), S(1));
  EXPECT_DOUBLE_EQ(ms.probability(S(0), S(1)), 1.0);
  const auto neg = ms.with_values_negated();
  EXPECT_DOUBLE_EQ(neg.value(S(1)), -5.0);
  EXPECT_DOUBLE_EQ(neg.price(S(0)), 1.0);
}
