#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace mpoi {

enum class Relation { less_equal, equal, greater_equal };

struct LinearRow {
  std::vector<std::pair<std::size_t, double>> coefficients;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
};

/// maximize c.v subject to the rows and v >= 0.
struct LinearProgram {
  std::size_t variable_count = 0;
  std::vector<double> objective;
  std::vector<LinearRow> rows;

  std::size_t add_variable(double cost = 0.0);
  void add_row(LinearRow row) { rows.push_back(std::move(row)); }
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string_view to_string(LpStatus status);

struct SimplexResult {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  std::size_t pivots = 0;
};

/// Dense two-phase primal simplex with Bland's rule; `tol` is the pivot and
/// feasibility tolerance.
SimplexResult solve_simplex(const LinearProgram& lp, double tol = 1e-9);

/// Largest violation of any row or sign constraint by `values`.
double max_violation(const LinearProgram& lp, const std::vector<double>& values);

}  // namespace mpoi
