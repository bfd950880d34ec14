#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mpoi/grade.hpp"
#include "mpoi/markov_system.hpp"

namespace mpoi {

// The teasing game: the player advances systems paying their prices and,
// on reaching a destination t, may collect r^t minus the prevailing cost of
// that system at that moment.

struct TeasingState {
  std::vector<StateId> current;
  std::vector<StateId> prevailing_at;
  std::optional<std::size_t> last;  // most recently advanced system
};

/// System to advance next, or nullopt to stop.
using TeasingSchedule = std::function<std::optional<std::size_t>(const TeasingState&)>;
/// Whether to collect at a destination: (element, value, prevailing cost).
using SelectionRule = std::function<bool(std::size_t, double, double)>;

/// Exact expected payoff. Throws EpochViolation if the schedule leaves a
/// system in the middle of an epoch, UndefinedAction if it advances a
/// prepared system.
double teasing_game_value(const std::vector<MarkovSystem>& systems,
                          const std::vector<GradeTable>& grades, const TeasingSchedule& schedule,
                          const SelectionRule& rule, std::size_t state_cap = 1'000'000);

/// Plays every system to its destination in id order.
TeasingSchedule sequential_schedule(const std::vector<MarkovSystem>& systems);
/// Finishes the current epoch, then starts the unprepared system whose
/// current grade is highest (lowest id on ties).
TeasingSchedule index_schedule(const std::vector<MarkovSystem>& systems,
                               const std::vector<GradeTable>& grades);
/// Plays one epoch of `element`, then stops.
TeasingSchedule single_epoch_schedule(const std::vector<MarkovSystem>& systems,
                                      const std::vector<GradeTable>& grades, std::size_t element);
/// Round-robin single steps; splits epochs whenever a system has one longer than a step.
TeasingSchedule alternating_schedule(const std::vector<MarkovSystem>& systems);

SelectionRule select_if_not_below_prevailing();
SelectionRule never_select();

}  // namespace mpoi
