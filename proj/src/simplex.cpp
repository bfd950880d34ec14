#include "mpoi/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "mpoi/error.hpp"

namespace mpoi {

std::size_t LinearProgram::add_variable(double cost) {
  objective.push_back(cost);
  return variable_count++;
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return data_.size() / (cols_ + 1); }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
  }

 private:
  std::size_t cols_;
  std::vector<double> data_;
};

enum class PhaseEnd { optimal, unbounded };

PhaseEnd run_phase(Tableau& t, std::vector<std::size_t>& basis, const std::vector<double>& cost,
                   const std::vector<bool>& allowed, double tol, std::size_t& pivots) {
  const std::size_t m = t.rows();
  const std::size_t cols = t.cols();
  for (std::size_t iter = 0; iter < 100'000; ++iter) {
    std::size_t entering = cols;
    for (std::size_t j = 0; j < cols && entering == cols; ++j) {
      if (!allowed[j]) continue;
      double rc = cost[j];
      for (std::size_t i = 0; i < m; ++i) rc -= cost[basis[i]] * t.at(i, j);
      if (rc > tol) entering = j;
    }
    if (entering == cols) return PhaseEnd::optimal;
    std::size_t leaving = m;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = t.at(i, entering);
      if (a <= tol) continue;
      const double ratio = t.rhs(i) / a;
      if (leaving == m || ratio < best_ratio - tol ||
          (std::abs(ratio - best_ratio) <= tol && basis[i] < basis[leaving])) {
        leaving = i;
        best_ratio = ratio;
      }
    }
    if (leaving == m) return PhaseEnd::unbounded;
    t.pivot(leaving, entering);
    basis[leaving] = entering;
    ++pivots;
  }
  throw Error(ErrorCode::iteration_limit, "simplex exceeded its pivot budget");
}

}  // namespace

SimplexResult solve_simplex(const LinearProgram& lp, double tol) {
  const std::size_t n = lp.variable_count;
  const std::size_t m = lp.rows.size();
  if (lp.objective.size() != n)
    throw Error(ErrorCode::invalid_argument, "objective length differs from the variable count");

  // Normalize to non-negative right-hand sides.
  std::vector<LinearRow> rows = lp.rows;
  for (auto& r : rows) {
    for (const auto& [j, a] : r.coefficients)
      if (j >= n) throw Error(ErrorCode::invalid_argument, "row references an unknown variable");
    if (r.rhs < 0.0) {
      r.rhs = -r.rhs;
      for (auto& c : r.coefficients) c.second = -c.second;
      if (r.relation == Relation::less_equal) {
        r.relation = Relation::greater_equal;
      } else if (r.relation == Relation::greater_equal) {
        r.relation = Relation::less_equal;
      }
    }
  }
  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const auto& r : rows) {
    if (r.relation != Relation::equal) ++slack_count;
    if (r.relation != Relation::less_equal) ++artificial_count;
  }
  const std::size_t first_artificial = n + slack_count;
  const std::size_t cols = first_artificial + artificial_count;
  Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  std::size_t slack = n;
  std::size_t art = first_artificial;
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& [j, a] : rows[i].coefficients) t.at(i, j) += a;
    t.rhs(i) = rows[i].rhs;
    switch (rows[i].relation) {
      case Relation::less_equal:
        t.at(i, slack) = 1.0;
        basis[i] = slack++;
        break;
      case Relation::greater_equal:
        t.at(i, slack++) = -1.0;
        t.at(i, art) = 1.0;
        basis[i] = art++;
        break;
      case Relation::equal:
        t.at(i, art) = 1.0;
        basis[i] = art++;
        break;
    }
  }

  SimplexResult result;
  std::vector<bool> allowed(cols, true);
  if (artificial_count > 0) {
    std::vector<double> cost(cols, 0.0);
    for (std::size_t j = first_artificial; j < cols; ++j) cost[j] = -1.0;
    run_phase(t, basis, cost, allowed, tol, result.pivots);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] >= first_artificial) infeasibility += t.rhs(i);
    if (infeasibility > std::max(1e-7, 100.0 * tol)) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < first_artificial) continue;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (std::abs(t.at(i, j)) > tol) {
          t.pivot(i, j);
          basis[i] = j;
          ++result.pivots;
          break;
        }
      }
    }
    for (std::size_t j = first_artificial; j < cols; ++j) allowed[j] = false;
  }

  std::vector<double> cost(cols, 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), cost.begin());
  if (run_phase(t, basis, cost, allowed, tol, result.pivots) == PhaseEnd::unbounded) {
    result.status = LpStatus::unbounded;
    return result;
  }
  result.status = LpStatus::optimal;
  result.values.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) result.values[basis[i]] = std::max(0.0, t.rhs(i));
  for (std::size_t j = 0; j < n; ++j) result.objective_value += lp.objective[j] * result.values[j];
  return result;
}

double max_violation(const LinearProgram& lp, const std::vector<double>& values) {
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, -v);
  for (const auto& r : lp.rows) {
    double lhs = 0.0;
    for (const auto& [j, a] : r.coefficients) lhs += a * values.at(j);
    switch (r.relation) {
      case Relation::less_equal: worst = std::max(worst, lhs - r.rhs); break;
      case Relation::greater_equal: worst = std::max(worst, r.rhs - lhs); break;
      case Relation::equal: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
    }
  }
  return worst;
}

}  // namespace mpoi
