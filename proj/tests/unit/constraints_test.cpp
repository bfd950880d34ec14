#include <gtest/gtest.h>

#include "mpoi/constraints.hpp"
#include "mpoi/error.hpp"

using namespace mpoi;

namespace {

ElementSet set_of(std::size_t n, std::initializer_list<std::size_t> e) { return ElementSet(n, e); }

std::vector<ElementSet> all_subsets(std::size_t n) {
  std::vector<ElementSet> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) out.push_back(ElementSet::from_mask(n, m));
  return out;
}

bool subset_of(const ElementSet& a, const ElementSet& b) {
  for (auto e : a.elements())
    if (!b.contains(e)) return false;
  return true;
}

std::vector<Matroid> sample_matroids() {
  return {Matroid::uniform(5, 2), Matroid::uniform(4, 0),
          Matroid::partition({0, 0, 1, 1, 2}, {1, 2, 1}),
          Matroid::graphic(3, {{0, 1}, {1, 2}, {0, 2}}),
          Matroid::graphic(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {0, 1}})};
}

}  // namespace

TEST(Packing, UniformMembership) {
  const auto o = PackingOracle::matroid(Matroid::uniform(3, 2));
  EXPECT_TRUE(o.is_feasible(set_of(3, {0, 1})));
  EXPECT_FALSE(o.is_feasible(set_of(3, {0, 1, 2})));
}

TEST(Packing, MatchingRejectsSharedVertex) {
  const auto o = PackingOracle::matching(3, {{0, 1}, {1, 2}});
  EXPECT_FALSE(o.is_feasible(set_of(2, {0, 1})));
  EXPECT_TRUE(o.is_feasible(set_of(2, {1})));
}

TEST(Covering, SetCoverMembership) {
  const auto o = CoveringOracle::set_cover(3, {{0, 1}, {1, 2}});
  EXPECT_TRUE(o.is_feasible(set_of(2, {0, 1})));
  EXPECT_FALSE(o.is_feasible(set_of(2, {0})));
  EXPECT_EQ(o.frequency(), 2U);
}

TEST(Packing, CanExtend) {
  const auto u1 = PackingOracle::matroid(Matroid::uniform(2, 1));
  EXPECT_TRUE(u1.can_extend(ElementSet(2), 0));
  EXPECT_FALSE(u1.can_extend(set_of(2, {0}), 1));
  const auto tri = PackingOracle::matroid(Matroid::graphic(3, {{0, 1}, {1, 2}, {0, 2}}));
  EXPECT_FALSE(tri.can_extend(set_of(3, {0, 1}), 2));
  try {
    u1.can_extend(set_of(2, {0, 1}), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::infeasible_base);
  }
}

TEST(Packing, MaxFeasibleSize) {
  EXPECT_EQ(PackingOracle::matroid(Matroid::uniform(5, 3)).max_feasible_size(), 3U);
  EXPECT_EQ(PackingOracle::matroid(Matroid::graphic(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}})).max_feasible_size(), 4U);
  EXPECT_EQ(PackingOracle::matching(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}).max_feasible_size(), 2U);
  EXPECT_EQ(PackingOracle::matching(3, {{0, 1}, {1, 2}, {0, 2}}).max_feasible_size(), 1U);
}

TEST(Packing, KSystemIsIntersection) {
  const auto o = PackingOracle::k_system({Matroid::uniform(3, 2), Matroid::partition({0, 0, 1}, {1, 1})});
  EXPECT_FALSE(o.is_feasible(set_of(3, {0, 1})));
  EXPECT_TRUE(o.is_feasible(set_of(3, {0, 2})));
  EXPECT_EQ(o.max_feasible_size(), 2U);
}

TEST(Matroid, ExchangeAxiomHoldsExhaustively) {
  for (const auto& m : sample_matroids()) {
    const auto subsets = all_subsets(m.ground_size());
    for (const auto& a : subsets) {
      if (!m.is_independent(a)) continue;
      for (const auto& b : subsets) {
        if (!m.is_independent(b) || b.size() <= a.size()) continue;
        bool extends = false;
        for (auto e : b.elements())
          if (!a.contains(e) && m.is_independent(a.with(e))) extends = true;
        EXPECT_TRUE(extends) << m.describe() << " A=" << a.to_string() << " B=" << b.to_string();
      }
    }
  }
}

TEST(Packing, DownwardClosedAndExtendConsistent) {
  std::vector<PackingOracle> oracles;
  for (const auto& m : sample_matroids()) oracles.push_back(PackingOracle::matroid(m));
  oracles.push_back(PackingOracle::matching(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
  for (const auto& o : oracles) {
    const auto subsets = all_subsets(o.ground_size());
    EXPECT_TRUE(o.is_feasible(ElementSet(o.ground_size())));
    for (const auto& s : subsets) {
      if (!o.is_feasible(s)) continue;
      for (const auto& t : subsets)
        if (subset_of(t, s)) {
          EXPECT_TRUE(o.is_feasible(t));
        }
      for (std::size_t i = 0; i < o.ground_size(); ++i)
        if (!s.contains(i)) {
          EXPECT_EQ(o.can_extend(s, i), o.is_feasible(s.with(i)));
        }
    }
  }
}

TEST(Covering, UpwardClosed) {
  const std::vector<CoveringOracle> oracles = {
      CoveringOracle::set_cover(4, {{0, 1}, {1, 2}, {3}, {0, 3}}),
      CoveringOracle::matroid_base(Matroid::graphic(3, {{0, 1}, {1, 2}, {0, 2}})),
      CoveringOracle::matroid_base(Matroid::uniform(4, 2))};
  for (const auto& o : oracles) {
    const auto subsets = all_subsets(o.ground_size());
    EXPECT_TRUE(o.is_feasible(ElementSet::full(o.ground_size())));
    for (const auto& s : subsets) {
      if (!o.is_feasible(s)) continue;
      for (const auto& t : subsets)
        if (subset_of(s, t)) {
          EXPECT_TRUE(o.is_feasible(t));
        }
    }
  }
}

TEST(Covering, UncoverableUniverseIsRejected) {
  EXPECT_THROW(CoveringOracle::set_cover(3, {{0}, {1}}), Error);
}
