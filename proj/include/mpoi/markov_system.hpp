#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpoi/error.hpp"
#include "mpoi/random.hpp"

namespace mpoi {

struct StateId {
  std::uint32_t index = 0;

  friend auto operator<=>(StateId, StateId) = default;
};

struct Transition {
  StateId to;
  double probability = 0.0;
};

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr std::size_t kDefaultStepCeiling = 1'000'000;

/// Mutable description of a Markov system before validation.
///
/// Prices and values are optional so that validation can report which ones
/// are missing instead of silently defaulting them.
class SystemDraft {
 public:
  explicit SystemDraft(std::string name = {}) : name_(std::move(name)) {}

  StateId add_state(std::string state_name);
  SystemDraft& edge(StateId from, StateId to, double probability);
  SystemDraft& price(StateId state, double amount);
  SystemDraft& destination(StateId state, double value);
  /// Marks a destination without assigning its value (reported as missing).
  SystemDraft& destination(StateId state);
  SystemDraft& start(StateId state);

  const std::string& name() const { return name_; }
  std::size_t state_count() const { return names_.size(); }
  const std::vector<std::string>& state_names() const { return names_; }
  const std::vector<std::vector<Transition>>& rows() const { return rows_; }
  const std::vector<std::optional<double>>& prices() const { return prices_; }
  const std::vector<std::optional<double>>& values() const { return values_; }
  const std::vector<bool>& destination_flags() const { return destination_; }
  std::optional<StateId> start_state() const { return start_; }

 private:
  void check_state(StateId s) const;

  std::string name_;
  std::vector<std::string> names_;
  std::vector<std::vector<Transition>> rows_;
  std::vector<std::optional<double>> prices_;
  std::vector<std::optional<double>> values_;
  std::vector<bool> destination_;
  std::optional<StateId> start_;
};

enum class IssueKind {
  row_not_stochastic,
  unreachable_destination,
  price_missing,
  value_missing,
  negative_price,
  price_on_destination,
  invalid_start,
  invalid_edge,
};

std::string_view to_string(IssueKind kind);

struct ValidationIssue {
  IssueKind kind;
  StateId state;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(IssueKind kind) const;
  std::string to_string() const;
};

/// Checks every structural requirement of a Markov system.
ValidationReport validate_system(const SystemDraft& draft);

class ValidationFailure : public Error {
 public:
  explicit ValidationFailure(ValidationReport report)
      : Error(ErrorCode::validation_error, report.to_string()), report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// A validated, immutable absorbing Markov chain with prices on transient
/// states and values on destinations.
class MarkovSystem {
 public:
  /// Validates and normalizes rows within kRowSumTolerance.
  /// Throws Error(validation_error) carrying the report on failure.
  static MarkovSystem from_draft(const SystemDraft& draft);

  const std::string& name() const { return name_; }
  std::size_t state_count() const { return names_.size(); }
  StateId start() const { return start_; }
  bool is_destination(StateId s) const { return destination_[s.index]; }
  double price(StateId s) const { return price_[s.index]; }
  double value(StateId s) const { return value_[s.index]; }
  const std::string& state_name(StateId s) const { return names_[s.index]; }
  std::optional<StateId> find_state(std::string_view state_name) const;

  /// Positive-probability successors. Destinations report a self-loop.
  std::span<const Transition> successors(StateId s) const { return rows_[s.index]; }
  double probability(StateId from, StateId to) const;

  std::vector<StateId> states() const;
  std::vector<StateId> destinations() const;

  double min_positive_probability() const;
  /// max over |prices| and |values|.
  double max_abs_parameter() const;

  /// Same chain with every destination value negated; used to turn a cost
  /// minimization into the reward form the grade is defined on.
  MarkovSystem with_values_negated() const;
  /// Same chain with the outgoing row of `state` replaced.
  MarkovSystem with_row(StateId state, std::vector<Transition> row) const;

  SystemDraft to_draft() const;

 private:
  MarkovSystem() = default;

  std::string name_;
  std::vector<std::string> names_;
  std::vector<std::vector<Transition>> rows_;
  std::vector<bool> destination_;
  std::vector<double> price_;
  std::vector<double> value_;
  StateId start_;
};

struct Classification {
  bool is_dag = false;
  std::optional<std::size_t> depth;  // longest start-to-destination path, in edges
};

Classification classify(const MarkovSystem& ms);

/// All states in a topological order of the positive-probability graph
/// (destination self-loops ignored), or nullopt if that graph has a cycle.
std::optional<std::vector<StateId>> topological_order(const MarkovSystem& ms);

StateId sample_step(const MarkovSystem& ms, StateId from, RandomStream& rng);

struct Trajectory {
  std::size_t system_id = 0;
  std::vector<StateId> visited;
  bool terminated = false;

  StateId last() const { return visited.back(); }
  std::size_t steps() const { return visited.empty() ? 0 : visited.size() - 1; }
};

Trajectory sample_trajectory(const MarkovSystem& ms, std::size_t system_id, RandomStream& rng,
                             std::size_t step_ceiling = kDefaultStepCeiling);

/// Empty string when `traj` is a legal (possibly partial) trajectory of `ms`.
std::string check_trajectory(const MarkovSystem& ms, const Trajectory& traj);

/// One trajectory per ground element, indexed by system id.
class TrajectoryProfile {
 public:
  TrajectoryProfile() = default;
  /// Throws invalid_argument unless the ids form a permutation of 0..n-1.
  explicit TrajectoryProfile(std::vector<Trajectory> trajectories);

  std::size_t size() const { return trajectories_.size(); }
  const Trajectory& operator[](std::size_t system_id) const { return trajectories_[system_id]; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }

 private:
  std::vector<Trajectory> trajectories_;
};

TrajectoryProfile sample_profile(std::span<const MarkovSystem> systems, std::uint64_t master_seed,
                                 std::size_t step_ceiling = kDefaultStepCeiling);

// Small constructors shared by fixtures, tests and the CLI.

/// s -> t with probability one.
MarkovSystem deterministic_chain(double price, double value, std::string name = "chain");

/// One probing step from s straight into a destination per outcome
/// (a Pandora box). `outcomes` are (value, probability) pairs.
MarkovSystem single_stage(double price, std::span<const std::pair<double, double>> outcomes,
                          std::string name = "box");

/// A system consisting of one destination state.
MarkovSystem constant_system(double value, std::string name = "constant");

}  // namespace mpoi
