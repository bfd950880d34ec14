#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mpoi/instance.hpp"
#include "mpoi/oracle.hpp"

namespace mpoi {

struct TraceEvent {
  ActionKind kind = ActionKind::advance;
  std::size_t element = 0;
  StateId from;
  StateId to;
};

struct RunOutcome {
  ElementSet selected;
  std::vector<Pick> picks;
  // Destination value of each selected element, 0 elsewhere.
  std::vector<double> values;
  double total_price = 0.0;
  double objective_value = 0.0;
  // objective - price for UtiMax; objective + price (a disutility) for DisMin.
  double utility = 0.0;
  // The realized prefix of every trajectory.
  std::vector<Trajectory> traversed;
  std::vector<TraceEvent> trace;
  // Prevailing decision proxy of every element over its traversed prefix.
  std::vector<double> prevailing;
};

/// Next state of `element` after `step` advancements from `from`.
using TransitionSource = std::function<StateId(std::size_t element, StateId from, std::size_t step)>;

/// Independent stream per element derived from (seed, element).
TransitionSource sampled_source(const Instance& inst, std::uint64_t seed);
/// Reads transitions from a recorded profile; throws ProfileExhausted past its end.
TransitionSource replay_source(const TrajectoryProfile& profile);

/// The round rule shared by every adaptive strategy: compute
/// v_i = g(Y_M, i, proxy_i) for the candidates, take the argmax (lowest id on
/// ties) and, if positive, advance it when unprepared or select it otherwise.
/// `shift_per_step` adds steps_i * shift_i to element i's proxy, as robust play does.
Action adaptive_decision(const Instance& inst, const std::vector<GradeTable>& grades,
                         const JointState& state, std::span<const double> shift_per_step = {});

Strategy adaptive_strategy(const Instance& inst, const std::vector<GradeTable>& grades);

/// Round-robin baseline that ignores epochs: advances the unprepared system
/// with positive grade and the fewest advancements so far, then selects the
/// best feasible prepared subset. Needs step tracking to alternate.
Strategy alternating_strategy(const Instance& inst, const std::vector<GradeTable>& grades);

/// Runs a strategy to completion against a transition source.
RunOutcome simulate(const Instance& inst, const std::vector<GradeTable>& grades,
                    const Strategy& strategy, const TransitionSource& source,
                    bool track_steps = false, std::size_t step_ceiling = kDefaultStepCeiling);

RunOutcome run_utimax(const Instance& inst, const std::vector<GradeTable>& grades, std::uint64_t seed);
RunOutcome run_utimax_replayed(const Instance& inst, const std::vector<GradeTable>& grades,
                               const TrajectoryProfile& profile);
/// `grades` are decision grades, i.e. those of the value-negated systems.
RunOutcome run_dismin(const Instance& inst, const std::vector<GradeTable>& grades, std::uint64_t seed);
RunOutcome run_dismin_replayed(const Instance& inst, const std::vector<GradeTable>& grades,
                               const TrajectoryProfile& profile);

/// Score and price recomputed from the traversed trajectories and selection.
double recompute_utility(const Instance& inst, const RunOutcome& outcome);

/// Empty when every advanced system keeps being advanced until its
/// prevailing value strictly changes or it is selected.
std::string check_epoch_atomicity(const Instance& inst, const std::vector<GradeTable>& grades,
                                  const RunOutcome& outcome);

struct RobustnessParams {
  double epsilon = 0.0;
  std::size_t k = 1;
  std::vector<std::size_t> depth;  // D_i
  double B = 0.0;
  double P = 1.0;
  double L = 0.0;  // D^2 B P with D the largest depth

  /// Proxy shift per advancement, eps / (2 k D_i); zero when D_i = 0.
  double shift(std::size_t i) const;
  /// Allowed grade estimation error, eps / (4 k D_i).
  double grade_budget(std::size_t i) const;
  std::vector<double> shifts() const;
};

/// Throws NotDag when any system is cyclic.
RobustnessParams robustness_params(const Instance& inst, double epsilon);

Strategy robust_strategy(const Instance& inst, const std::vector<GradeTable>& estimated,
                         const RobustnessParams& params);

/// Robust play: decisions from estimated grades, dynamics from the source.
/// `prevailing` in the outcome holds the shifted estimate Y-hat.
RunOutcome run_robust_utimax(const Instance& inst, const std::vector<GradeTable>& estimated,
                             const RobustnessParams& params, const TransitionSource& source);

/// Exact expected utility of robust play, replaying every trajectory profile.
/// TooLargeForExact when the profiles cannot be enumerated.
double robust_expected_utility(const Instance& inst, const std::vector<GradeTable>& estimated,
                               const RobustnessParams& params,
                               std::size_t profile_cap = 100'000);

/// Y-hat of every element over the traversed prefixes of `outcome`.
std::vector<double> shifted_prevailing(const std::vector<GradeTable>& estimated,
                                       const RobustnessParams& params,
                                       const std::vector<Trajectory>& traversed);

/// Moves every row with two or more successors by at most `delta` per entry,
/// keeping its support and its sum.
MarkovSystem perturb_transitions(const MarkovSystem& ms, double delta, std::uint64_t seed);

/// Grade tables with every non-destination grade moved by a uniform draw in
/// [-magnitude_i, magnitude_i]; destination grades stay exact.
std::vector<GradeTable> inject_grade_noise(const Instance& inst, const std::vector<GradeTable>& grades,
                                           std::span<const double> magnitude, std::uint64_t seed);

struct SurrogateEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  // Same statistic for the frugal algorithm's value on the surrogate.
  double frugal_mean = 0.0;
  double frugal_stderr = 0.0;
  std::size_t samples = 0;
  bool exact = false;
  // False when the inner optimum was replaced by the frugal value (n > 15).
  bool inner_exhaustive = true;
};

inline constexpr std::size_t kMaxExactSurrogateProfiles = 100'000;

/// E over trajectory profiles of the best objective on prevailing proxies.
SurrogateEstimate surrogate_estimate(const Instance& inst, const std::vector<GradeTable>& grades,
                                     std::size_t n_samples, std::uint64_t seed, bool exact);

}  // namespace mpoi
