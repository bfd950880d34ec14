#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mpoi/markov_system.hpp"

namespace mpoi {

enum class GradeMethod { dag_exact, bisection_value_iteration };

std::string_view to_string(GradeMethod method);

struct GradeOptions {
  double tol = 1e-9;
  double vi_tol = 1e-12;
  std::size_t max_iterations = 10'000'000;
  std::size_t step_ceiling = kDefaultStepCeiling;
  // Unset: dag_exact for acyclic systems, value iteration otherwise.
  std::optional<GradeMethod> method;
};

struct GradeTable {
  std::size_t system_id = 0;
  std::vector<double> grades;
  double tolerance = 0.0;
  GradeMethod method = GradeMethod::dag_exact;

  double operator[](StateId s) const { return grades[s.index]; }
};

/// U^v(tau) for every state of `ms` at once.
std::vector<double> penalized_utilities(const MarkovSystem& ms, double tau,
                                        const GradeOptions& opts = {});

double penalized_utility(const MarkovSystem& ms, StateId v, double tau,
                         const GradeOptions& opts = {});

/// sup{tau : U^v(tau) > 0}.
double grade(const MarkovSystem& ms, StateId v, const GradeOptions& opts = {});

GradeTable grade_table(const MarkovSystem& ms, std::size_t system_id = 0,
                       const GradeOptions& opts = {});

std::vector<GradeTable> grade_tables(std::span<const MarkovSystem> systems,
                                     const GradeOptions& opts = {});

struct PrevailingRecord {
  std::size_t system_id = 0;
  // running[k] is the prevailing value after visiting trajectory index k.
  std::vector<double> running;
  double prevailing = 0.0;
  std::vector<std::size_t> epoch_boundaries;
};

/// Running minimum of grades; a boundary at every strict decrease.
PrevailingRecord prevailing_cost(const GradeTable& grades, const Trajectory& traj);

/// Running maximum of negated grades; a boundary at every strict increase.
PrevailingRecord prevailing_reward(const GradeTable& grades, const Trajectory& traj);

/// Root of E[(X - tau)^+] = price for a discrete X given as (value, prob).
double weitzman_index(std::span<const std::pair<double, double>> outcomes, double price,
                      double tol = 1e-9);

}  // namespace mpoi
