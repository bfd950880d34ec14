#pragma once

#include <string>

#include "mpoi/scenario.hpp"

namespace mpoi::testing {

inline Scenario fixture(const std::string& name) {
  return load_scenario(std::string(MPOI_FIXTURE_DIR) + "/" + name);
}

}  // namespace mpoi::testing
