#include <gtest/gtest.h>

#include <string>

#include "fixtures.hpp"
#include "mpoi/error.hpp"
#include "mpoi/scenario.hpp"

using namespace mpoi;
using namespace mpoi::testing;

namespace {

const char* kBox = R"({
  "name": "box",
  "systems": [{
    "name": "A",
    "states": ["s", "hi", "lo"],
    "start": "s",
    "edges": [["s", "hi", P], ["s", "lo", 0.5]],
    "prices": {"s": 1},
    "destinations": {"hi": 10, "lo": 0}
  }],
  "constraint": {"kind": "uniform_matroid", "k": 1}
})";

std::string with_probability(const std::string& p) {
  std::string text = kBox;
  text.replace(text.find(", P]"), 4, ", " + p + "]");
  return text;
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::io_error;
}

}  // namespace

TEST(Scenario, PandoraFixture) {
  const auto sc = fixture("pandora_weitzman.json");
  EXPECT_EQ(sc.systems.size(), 1U);
  ASSERT_TRUE(sc.packing.has_value());
  EXPECT_EQ(sc.packing->max_feasible_size(), 1U);
  EXPECT_EQ(sc.mode, Sense::utimax);
  EXPECT_TRUE(sc.warnings.empty());
}

TEST(Scenario, InlineParse) {
  const auto sc = parse_scenario(with_probability("0.5"));
  EXPECT_EQ(sc.name, "box");
  EXPECT_EQ(sc.system_index("A"), 0U);
  EXPECT_EQ(sc.instance().size(), 1U);
}

TEST(Scenario, BadProbabilityIsValidationError) {
  EXPECT_EQ(code_of(with_probability("1.2")), ErrorCode::validation_error);
  try {
    parse_scenario(with_probability("1.2"));
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("RowNotStochastic"), std::string::npos) << e.what();
  }
}

TEST(Scenario, MalformedJsonReportsPosition) {
  try {
    parse_scenario("{\n  \"name\": ,\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Scenario, BoundedInputWarning) {
  const auto sc = fixture("f2_bounded_input.json");
  ASSERT_EQ(sc.warnings.size(), 1U);
  EXPECT_NE(sc.warnings[0].find("AssumptionBViolated"), std::string::npos);
  const auto size = input_size(sc);
  EXPECT_DOUBLE_EQ(size.B, 54.0);
  EXPECT_EQ(size.n, 3U);
}

TEST(Scenario, EveryFixtureLoads) {
  for (const char* name : {"pandora_weitzman.json", "two_system.json", "triangle_graphic.json",
                           "triangle_spanning_tree.json", "set_cover_trio.json", "f1_dag_necessity.json",
                           "f2_bounded_input.json", "commitment_partition.json", "matching_path.json",
                           "asymmetric_pair.json", "epoch_rise_fall.json"}) {
    EXPECT_NO_THROW(fixture(name).instance()) << name;
  }
  EXPECT_EQ(fixture("set_cover_trio.json").mode, Sense::dismin);
}

TEST(Scenario, MissingFileIsIoError) {
  try {
    load_scenario("/nonexistent/nowhere.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
}

TEST(Scenario, ProblemsAreAggregated) {
  std::string text = with_probability("1.2");
  const auto a = text.find("{\n    \"name\": \"A\"");
  const auto end = text.find("}]", a) + 1;
  std::string second = text.substr(a, end - a);
  second.replace(second.find("\"A\""), 3, "\"B\"");
  text.insert(end, ", " + second);
  try {
    parse_scenario(text);
    FAIL();
  } catch (const Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("'A'"), std::string::npos) << what;
    EXPECT_NE(what.find("'B'"), std::string::npos) << what;
    EXPECT_NE(what.find("; "), std::string::npos) << what;
  }
}
