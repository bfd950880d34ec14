#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpoi {

// Every failure the library can report. The CLI maps each code to its own
// process exit status, so the numbering is part of the external interface.
enum class ErrorCode {
  parse_error = 2,
  validation_error = 3,
  step_from_destination = 4,
  non_terminating = 5,
  iteration_limit = 6,
  system_mismatch = 7,
  no_root = 8,
  infeasible_base = 9,
  no_progress = 10,
  profile_exhausted = 11,
  not_dag = 12,
  epoch_violation = 13,
  too_large_for_exact = 14,
  unsupported_polytope = 15,
  lp_infeasible = 16,
  lp_unbounded = 17,
  outside_polytope = 18,
  division_degenerate = 19,
  state_space_too_large = 20,
  undefined_action = 21,
  too_many_profiles = 22,
  invalid_argument = 23,
  io_error = 24,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mpoi
