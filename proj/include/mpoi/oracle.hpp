#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mpoi/instance.hpp"

namespace mpoi {

/// Everything an adaptive strategy may condition on.
struct JointState {
  std::vector<StateId> current;
  // State of each trajectory where the running minimum of decision grades
  // was attained; the prevailing value is the grade there.
  std::vector<StateId> prevailing_at;
  // Advancements per system; kept at zero unless the evaluation tracks them.
  std::vector<std::uint32_t> steps;
  // Selected elements in selection order.
  std::vector<std::size_t> picks;
  ElementSet selected;
};

JointState initial_joint_state(const Instance& inst);

enum class ActionKind { advance, select, stop };

struct Action {
  ActionKind kind = ActionKind::stop;
  std::size_t element = 0;

  static Action advance(std::size_t i) { return {ActionKind::advance, i}; }
  static Action select(std::size_t i) { return {ActionKind::select, i}; }
  static Action stop() { return {}; }

  friend bool operator==(const Action&, const Action&) = default;
};

std::string to_string(const Action& a);

using Strategy = std::function<Action(const JointState&)>;

/// Throws UndefinedAction unless `a` is legal in `s`.
void check_action(const Instance& inst, const JointState& s, const Action& a);

/// Applies a legal advance/select; `next` is the successor state for advances.
JointState apply_action(const JointState& s, const Action& a, StateId next,
                        const std::vector<GradeTable>& grades, bool track_steps);

struct EvalOptions {
  bool track_steps = false;
  std::size_t state_cap = 1'000'000;
};

/// Exact expected score of a deterministic strategy, by memoized forward
/// expectation over the reachable joint states. `grades` maintain the
/// prevailing component of JointState.
double exact_policy_value(const Instance& inst, const std::vector<GradeTable>& grades,
                          const Strategy& strategy, const EvalOptions& opts = {},
                          std::size_t* state_count = nullptr);

struct PolicyEntry {
  std::vector<StateId> states;
  Action action;
  ElementSet chosen;  // final selection when action is stop
  double value = 0.0;
};

struct DpResult {
  double optimal_value = 0.0;
  std::size_t state_count = 0;
  std::vector<PolicyEntry> policy;  // filled when requested
};

struct DpOptions {
  std::size_t state_cap = 1'000'000;
  bool record_policy = false;
};

/// OPT without commitment: backward induction over raw joint states, with
/// the best feasible prepared subset as the stopping value.
DpResult optimal_policy_dp(const Instance& inst, const DpOptions& opts = {});

struct WeightedProfile {
  TrajectoryProfile profile;
  double weight = 0.0;
};

inline constexpr std::size_t kMaxProfiles = 1'000'000;

/// Every complete start-to-destination path of a DAG system with its probability.
std::vector<std::pair<Trajectory, double>> enumerate_paths(const MarkovSystem& ms,
                                                           std::size_t system_id,
                                                           std::size_t cap = kMaxProfiles);

std::vector<WeightedProfile> enumerate_profiles(std::span<const MarkovSystem> systems,
                                                std::size_t cap = kMaxProfiles);

double profile_expectation(const std::vector<WeightedProfile>& profiles,
                           const std::function<double(const TrajectoryProfile&)>& value);

}  // namespace mpoi
