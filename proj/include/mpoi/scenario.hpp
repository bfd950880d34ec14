#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpoi/instance.hpp"

namespace mpoi {

/// Declared polynomial bound B <= coefficient * (n k D)^degree on the
/// largest absolute price or value.
struct InputBound {
  double coefficient = 10.0;
  double degree = 1.0;
};

struct Scenario {
  std::string name;
  std::string description;
  Sense mode = Sense::utimax;
  std::vector<MarkovSystem> systems;
  std::optional<PackingOracle> packing;
  std::optional<CoveringOracle> covering;
  SemiadditiveObjective objective = SemiadditiveObjective::additive();
  std::string objective_name = "additive";
  std::optional<std::string> marginal_name;
  InputBound input_bound;
  std::vector<std::string> warnings;

  Instance instance() const;
  std::size_t system_index(std::string_view system_name) const;
};

/// Throws ParseError with line and column for malformed JSON and a single
/// ValidationError listing every problem found otherwise.
Scenario parse_scenario(std::string_view text);
/// Reads and parses a file; IoError when it cannot be read.
Scenario load_scenario(const std::filesystem::path& path);

/// B, n, k and D as used by the input-bound check.
struct InputSize {
  double B = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t D = 0;
  double bound = 0.0;
};

InputSize input_size(const Scenario& sc);

}  // namespace mpoi
