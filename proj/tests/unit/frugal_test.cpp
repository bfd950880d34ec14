#include <gtest/gtest.h>

#include <cmath>

#include "mpoi/error.hpp"
#include "mpoi/frugal.hpp"

using namespace mpoi;

namespace {

const PackingOracle kTriangle = PackingOracle::matroid(Matroid::graphic(3, {{0, 1}, {1, 2}, {0, 2}}));

}  // namespace

TEST(FrugalPacking, UniformKeepsPositives) {
  const std::vector<double> y = {3, 1, -2};
  const auto r = run_frugal_packing(MarginalValueFn::additive(), PackingOracle::matroid(Matroid::uniform(3, 2)), y);
  EXPECT_EQ(r.selected, ElementSet(3, {0, 1}));
  EXPECT_DOUBLE_EQ(SemiadditiveObjective::additive().evaluate(r.selected, y), 4.0);
}

TEST(FrugalPacking, NoPositiveMarginalSelectsNothing) {
  const std::vector<double> y = {-1, -5};
  const auto r = run_frugal_packing(MarginalValueFn::additive(), PackingOracle::matroid(Matroid::uniform(2, 1)), y);
  EXPECT_TRUE(r.selected.empty());
}

TEST(FrugalPacking, ZeroMarginalStops) {
  const std::vector<double> y = {0, 0};
  const auto r = run_frugal_packing(MarginalValueFn::additive(), PackingOracle::matroid(Matroid::uniform(2, 2)), y);
  EXPECT_TRUE(r.selected.empty());
}

TEST(FrugalPacking, TriangleTakesHeaviestForest) {
  const std::vector<double> y = {5, 4, 3};
  const auto r = run_frugal_packing(MarginalValueFn::additive(), kTriangle, y);
  EXPECT_EQ(r.selected, ElementSet(3, {0, 1}));
  EXPECT_EQ(r.picks.size(), 2U);
  EXPECT_EQ(r.picks[0].element, 0U);
}

TEST(FrugalPacking, TiesGoToLowestId) {
  const std::vector<double> y = {2, 2, 2};
  const auto r = run_frugal_packing(MarginalValueFn::additive(), PackingOracle::matroid(Matroid::uniform(3, 1)), y);
  EXPECT_EQ(r.selected, ElementSet(3, {0}));
}

TEST(FrugalPacking, MatchingGreedy) {
  const auto path = PackingOracle::matching(4, {{0, 1}, {1, 2}, {2, 3}});
  const std::vector<double> y = {2, 3, 2};
  const auto r = run_frugal_packing(MarginalValueFn::matching_greedy(path), path, y);
  EXPECT_EQ(r.selected, ElementSet(3, {1}));
}

TEST(FrugalPacking, RaisingSelectedValueKeepsIt) {
  const auto o = PackingOracle::matroid(Matroid::partition({0, 0, 1, 1, 2, 2}, {1, 1, 1}));
  const std::vector<double> base = {5, 1, 4, 2, 3, 0.5};
  const auto r = run_frugal_packing(MarginalValueFn::additive(), o, base);
  for (auto e : r.selected.elements()) {
    auto raised = base;
    raised[e] += 1.0;
    EXPECT_TRUE(run_frugal_packing(MarginalValueFn::additive(), o, raised).selected.contains(e));
  }
}

TEST(FrugalCovering, SetCoverRatioGreedy) {
  const auto cover = CoveringOracle::set_cover(3, {{0, 1}, {1, 2}});
  const std::vector<double> y = {1, 3};
  const auto r = run_frugal_covering(MarginalValueFn::set_cover_ratio(cover), cover, y);
  EXPECT_EQ(r.selected, ElementSet(2, {0, 1}));
  EXPECT_EQ(r.picks.front().element, 0U);
  EXPECT_DOUBLE_EQ(SemiadditiveObjective::set_cover_h(cover).evaluate(r.selected, y), 4.0);
}

TEST(FrugalCovering, SpanningTreeOfTriangle) {
  const auto base = CoveringOracle::matroid_base(Matroid::graphic(3, {{0, 1}, {1, 2}, {0, 2}}));
  const std::vector<double> y = {1, 2, 3};
  const auto r = run_frugal_covering(MarginalValueFn::matroid_base_min(base), base, y);
  EXPECT_EQ(r.selected, ElementSet(3, {0, 1}));
}

TEST(FrugalCovering, SingleSetUniverse) {
  const auto cover = CoveringOracle::set_cover(1, {{0}});
  const std::vector<double> y = {7};
  const auto r = run_frugal_covering(MarginalValueFn::set_cover_ratio(cover), cover, y);
  EXPECT_EQ(r.selected, ElementSet(1, {0}));
}

TEST(FrugalCovering, BrokenEncodingIsNoProgress) {
  const auto cover = CoveringOracle::set_cover(1, {{0}});
  const MarginalValueFn never(MarginalKind::custom, Monotonicity::decreasing_in_y,
                              [](const MarginalContext&, std::size_t, double) { return 0.0; });
  const std::vector<double> y = {1};
  try {
    run_frugal_covering(never, cover, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_progress);
  }
}

TEST(Objective, Evaluation) {
  const std::vector<double> x = {3, 1};
  EXPECT_DOUBLE_EQ(SemiadditiveObjective::additive().evaluate(ElementSet(2, {0, 1}), x), 4.0);
  const auto table = SemiadditiveObjective::custom_table({{1, -2.0}, {0, 0.25}});
  EXPECT_DOUBLE_EQ(table.evaluate(ElementSet(2, {0}), x), 1.0);
  EXPECT_DOUBLE_EQ(table.evaluate(ElementSet(2), x), 0.25);
  const auto cover = CoveringOracle::set_cover(2, {{0}, {1}});
  EXPECT_TRUE(std::isinf(SemiadditiveObjective::set_cover_h(cover).evaluate(ElementSet(2, {0}), x)));
}

TEST(BestSubset, PackingAndCovering) {
  const std::vector<double> y = {5, 4, 3};
  const auto best = best_packing_subset(kTriangle, SemiadditiveObjective::additive(), y, ElementSet::full(3));
  EXPECT_DOUBLE_EQ(best.value, 9.0);
  const auto base = CoveringOracle::matroid_base(Matroid::graphic(3, {{0, 1}, {1, 2}, {0, 2}}));
  const auto low = best_covering_subset(base, SemiadditiveObjective::additive(), y, ElementSet::full(3));
  EXPECT_DOUBLE_EQ(low.value, 7.0);
  EXPECT_FALSE(best_covering_subset(base, SemiadditiveObjective::additive(), y, ElementSet(3, {0})).found);
}

TEST(Marginal, LookupByName) {
  const auto cover = CoveringOracle::set_cover(1, {{0}});
  EXPECT_EQ(marginal_by_name("set_cover_ratio", nullptr, &cover).kind(), MarginalKind::set_cover_ratio);
  EXPECT_THROW(marginal_by_name("matching_greedy", nullptr, &cover), Error);
}
