#include "mpoi/grade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpoi {

std::string_view to_string(GradeMethod method) {
  return method == GradeMethod::dag_exact ? "dag_exact" : "bisection_value_iteration";
}

namespace {

struct Curve {
  std::vector<double> value;
  std::vector<double> slope;  // a subgradient in tau; only filled on DAGs
};

Curve backward_induction(const MarkovSystem& ms, const std::vector<StateId>& order, double tau) {
  Curve c;
  c.value.assign(ms.state_count(), 0.0);
  c.slope.assign(ms.state_count(), 0.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const StateId u = *it;
    if (ms.is_destination(u)) {
      const double gain = ms.value(u) - tau;
      if (gain > 0.0) {
        c.value[u.index] = gain;
        c.slope[u.index] = -1.0;
      }
      continue;
    }
    double play = -ms.price(u);
    double slope = 0.0;
    for (const auto& t : ms.successors(u)) {
      play += t.probability * c.value[t.to.index];
      slope += t.probability * c.slope[t.to.index];
    }
    if (play > 0.0) {
      c.value[u.index] = play;
      c.slope[u.index] = slope;
    }
  }
  return c;
}

std::vector<double> value_iteration(const MarkovSystem& ms, double tau, const GradeOptions& opts) {
  const std::size_t n = ms.state_count();
  std::vector<double> u(n, 0.0);
  for (auto s : ms.destinations()) u[s.index] = std::max(0.0, ms.value(s) - tau);
  for (std::size_t sweep = 0; sweep < opts.max_iterations; ++sweep) {
    double change = 0.0;
    double scale = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const StateId s{static_cast<std::uint32_t>(k)};
      if (ms.is_destination(s)) continue;
      double play = -ms.price(s);
      for (const auto& t : ms.successors(s)) play += t.probability * u[t.to.index];
      const double next = std::max(0.0, play);
      change = std::max(change, std::abs(next - u[k]));
      scale = std::max(scale, std::abs(next));
      u[k] = next;
    }
    // Relative test: far below the root the values are large and an absolute
    // 1e-12 would be finer than the floating-point spacing.
    if (change < opts.vi_tol * scale) return u;
  }
  throw Error(ErrorCode::iteration_limit,
              ms.name() + ": value iteration did not converge in " +
                  std::to_string(opts.max_iterations) + " sweeps");
}

struct Solver {
  const MarkovSystem& ms;
  GradeOptions opts;
  GradeMethod method;
  std::optional<std::vector<StateId>> order;
  std::size_t depth_bound = 0;

  Solver(const MarkovSystem& system, const GradeOptions& o) : ms(system), opts(o) {
    order = topological_order(ms);
    if (opts.method) {
      method = *opts.method;
      if (method == GradeMethod::dag_exact && !order)
        throw Error(ErrorCode::not_dag, ms.name() + " is cyclic; dag_exact unavailable");
    } else {
      method = order ? GradeMethod::dag_exact : GradeMethod::bisection_value_iteration;
    }
    if (order) {
      depth_bound = classify(ms).depth.value_or(ms.state_count());
      // Depth from start may miss states not reachable from start.
      depth_bound = std::max(depth_bound, ms.state_count());
    } else {
      depth_bound = ms.state_count();
    }
  }

  std::vector<double> utilities(double tau) const {
    if (method == GradeMethod::dag_exact) return backward_induction(ms, *order, tau).value;
    return value_iteration(ms, tau, opts);
  }

  double solve(StateId v) const {
    if (ms.is_destination(v)) return ms.value(v);
    const double b = std::max(ms.max_abs_parameter(), 1.0);
    double hi = 0.0;
    for (auto t : ms.destinations()) hi = std::max(hi, ms.value(t));
    if (ms.destinations().empty()) hi = b;
    // Expand the lower end until playing is strictly profitable there.
    double span = (static_cast<double>(depth_bound) + 1.0) * b + 1.0;
    double lo = std::min(-span, hi - 1.0);
    const double ceiling_span = (static_cast<double>(opts.step_ceiling) + 1.0) * b + 1.0;
    while (utilities(lo)[v.index] <= 0.0) {
      if (span > ceiling_span)
        throw Error(ErrorCode::no_root, ms.name() + ":" + ms.state_name(v) +
                                            " has no positive penalized utility in range");
      span *= 2.0;
      lo = std::min(-span, hi - 1.0);
    }
    auto bisect = [&](double width) {
      for (int it = 0; it < 400 && hi - lo > 0.5 * width; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (utilities(mid)[v.index] > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
    };
    if (method != GradeMethod::dag_exact) {
      bisect(opts.tol);
      return 0.5 * (lo + hi);
    }
    bisect(std::max(opts.tol, 1e-7));
    // U is convex and piecewise linear; Newton from below lands on the root
    // after at most a few pieces.
    double tau = lo;
    for (int it = 0; it < 200; ++it) {
      const Curve c = backward_induction(ms, *order, tau);
      const double u = c.value[v.index];
      const double g = c.slope[v.index];
      if (u <= 0.0 || g >= 0.0) break;
      const double next = std::min(tau - u / g, hi);
      if (!(next > tau)) break;
      tau = next;
    }
    if (std::abs(utilities(tau)[v.index]) <= opts.tol) return tau;
    bisect(opts.tol);
    return 0.5 * (lo + hi);
  }
};

PrevailingRecord running_record(const GradeTable& grades, const Trajectory& traj, bool minimize) {
  if (traj.system_id != grades.system_id)
    throw Error(ErrorCode::system_mismatch,
                "trajectory of system " + std::to_string(traj.system_id) +
                    " paired with grades of system " + std::to_string(grades.system_id));
  if (traj.visited.empty()) throw Error(ErrorCode::invalid_argument, "empty trajectory");
  PrevailingRecord rec;
  rec.system_id = traj.system_id;
  double current = 0.0;
  for (std::size_t k = 0; k < traj.visited.size(); ++k) {
    const auto s = traj.visited[k];
    if (s.index >= grades.grades.size())
      throw Error(ErrorCode::system_mismatch, "trajectory state outside the grade table");
    const double g = minimize ? grades.grades[s.index] : -grades.grades[s.index];
    if (k == 0) {
      current = g;
    } else if (minimize ? g < current : g > current) {
      current = g;
      rec.epoch_boundaries.push_back(k);
    }
    rec.running.push_back(current);
  }
  rec.prevailing = current;
  return rec;
}

}  // namespace

std::vector<double> penalized_utilities(const MarkovSystem& ms, double tau,
                                        const GradeOptions& opts) {
  return Solver(ms, opts).utilities(tau);
}

double penalized_utility(const MarkovSystem& ms, StateId v, double tau, const GradeOptions& opts) {
  if (v.index >= ms.state_count()) throw Error(ErrorCode::invalid_argument, "state out of range");
  return penalized_utilities(ms, tau, opts)[v.index];
}

double grade(const MarkovSystem& ms, StateId v, const GradeOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "grade tolerance must be > 0");
  if (v.index >= ms.state_count()) throw Error(ErrorCode::invalid_argument, "state out of range");
  return Solver(ms, opts).solve(v);
}

GradeTable grade_table(const MarkovSystem& ms, std::size_t system_id, const GradeOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "grade tolerance must be > 0");
  Solver solver(ms, opts);
  GradeTable table;
  table.system_id = system_id;
  table.tolerance = opts.tol;
  table.method = solver.method;
  table.grades.reserve(ms.state_count());
  for (auto s : ms.states()) table.grades.push_back(solver.solve(s));
  return table;
}

std::vector<GradeTable> grade_tables(std::span<const MarkovSystem> systems,
                                     const GradeOptions& opts) {
  std::vector<GradeTable> out;
  out.reserve(systems.size());
  for (std::size_t i = 0; i < systems.size(); ++i) out.push_back(grade_table(systems[i], i, opts));
  return out;
}

PrevailingRecord prevailing_cost(const GradeTable& grades, const Trajectory& traj) {
  return running_record(grades, traj, true);
}

PrevailingRecord prevailing_reward(const GradeTable& grades, const Trajectory& traj) {
  return running_record(grades, traj, false);
}

double weitzman_index(std::span<const std::pair<double, double>> outcomes, double price,
                      double tol) {
  if (outcomes.empty()) throw Error(ErrorCode::invalid_argument, "no outcomes");
  if (!(price >= 0.0)) throw Error(ErrorCode::invalid_argument, "price must be non-negative");
  double mass = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [x, p] : outcomes) {
    if (!(p >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative probability");
    mass += p;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (std::abs(mass - 1.0) > kRowSumTolerance)
    throw Error(ErrorCode::invalid_argument, "outcome probabilities do not sum to 1");

  auto excess = [&](double tau) {
    double e = 0.0;
    for (const auto& [x, p] : outcomes)
      if (x > tau) e += p * (x - tau);
    return e - price;
  };
  auto slope = [&](double tau) {
    double s = 0.0;
    for (const auto& [x, p] : outcomes)
      if (x > tau) s -= p;
    return s;
  };

  const double at_lo = excess(lo);
  if (at_lo < 0.0)
    throw Error(ErrorCode::no_root, "price exceeds E[(X - min X)^+]; the box is never worth opening");
  if (at_lo == 0.0) return lo;
  for (int it = 0; it < 400 && hi - lo > 0.5 * tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double tau = lo;
  for (int it = 0; it < 64; ++it) {
    const double e = excess(tau);
    const double g = slope(tau);
    if (e <= 0.0 || g >= 0.0) break;
    const double next = std::min(tau - e / g, hi);
    if (!(next > tau)) break;
    tau = next;
  }
  return tau;
}

}  // namespace mpoi
