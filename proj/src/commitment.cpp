#include "mpoi/commitment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpoi/error.hpp"

namespace mpoi {

std::string_view to_string(RowGroup group) {
  switch (group) {
    case RowGroup::start: return "start";
    case RowGroup::flow: return "flow";
    case RowGroup::selection: return "selection";
    case RowGroup::play_bound: return "play_bound";
    case RowGroup::polytope: return "polytope";
  }
  return "unknown";
}

std::size_t CommitmentLp::rows_in(RowGroup group) const {
  return static_cast<std::size_t>(std::count(row_groups.begin(), row_groups.end(), group));
}

CommitmentLp build_lp(const std::vector<MarkovSystem>& systems, const PackingOracle& polytope) {
  if (polytope.ground_size() != systems.size())
    throw Error(ErrorCode::validation_error, "polytope arity differs from the number of systems");
  if (polytope.kind() != PackingKind::uniform_matroid &&
      polytope.kind() != PackingKind::partition_matroid)
    throw Error(ErrorCode::unsupported_polytope,
                std::string(to_string(polytope.kind())) + " has no polytope description here");
  for (const auto& ms : systems)
    if (!classify(ms).is_dag)
      throw Error(ErrorCode::not_dag, ms.name() + " is cyclic; the commitment LP needs DAG systems");

  CommitmentLp lp;
  auto& prog = lp.program;
  auto row = [&](RowGroup g, LinearRow r) {
    prog.add_row(std::move(r));
    lp.row_groups.push_back(g);
  };

  for (const auto& ms : systems) {
    std::vector<std::size_t> y(ms.state_count());
    std::vector<std::size_t> z(ms.state_count());
    for (auto u : ms.states()) {
      y[u.index] = prog.add_variable(0.0);
      z[u.index] = prog.add_variable(ms.is_destination(u) ? ms.value(u) : -ms.price(u));
    }
    lp.y.push_back(std::move(y));
    lp.z.push_back(std::move(z));
    lp.x.push_back(prog.add_variable(0.0));
  }

  for (std::size_t i = 0; i < systems.size(); ++i) {
    const auto& ms = systems[i];
    const auto& y = lp.y[i];
    const auto& z = lp.z[i];
    row(RowGroup::start, {{{y[ms.start().index], 1.0}}, Relation::equal, 1.0});
    // Inflow: reaching u requires playing a predecessor that moves to u.
    std::vector<LinearRow> inflow(ms.state_count());
    for (auto u : ms.states()) inflow[u.index].coefficients.push_back({y[u.index], 1.0});
    for (auto v : ms.states()) {
      if (ms.is_destination(v)) continue;
      for (const auto& t : ms.successors(v))
        inflow[t.to.index].coefficients.push_back({z[v.index], -t.probability});
    }
    for (auto u : ms.states()) {
      if (u == ms.start()) continue;
      inflow[u.index].relation = Relation::equal;
      row(RowGroup::flow, std::move(inflow[u.index]));
    }
    LinearRow sel{{{lp.x[i], 1.0}}, Relation::equal, 0.0};
    for (auto t : ms.destinations()) sel.coefficients.push_back({z[t.index], -1.0});
    row(RowGroup::selection, std::move(sel));
    for (auto u : ms.states())
      row(RowGroup::play_bound, {{{z[u.index], 1.0}, {y[u.index], -1.0}}, Relation::less_equal, 0.0});
  }

  const auto& m = polytope.as_matroid();
  if (m.kind() == MatroidKind::uniform) {
    LinearRow cap{{}, Relation::less_equal, static_cast<double>(m.k())};
    for (auto xi : lp.x) cap.coefficients.push_back({xi, 1.0});
    row(RowGroup::polytope, std::move(cap));
  } else {
    for (std::size_t p = 0; p < m.capacities().size(); ++p) {
      LinearRow cap{{}, Relation::less_equal, static_cast<double>(m.capacities()[p])};
      for (std::size_t i = 0; i < systems.size(); ++i)
        if (m.part_of()[i] == p) cap.coefficients.push_back({lp.x[i], 1.0});
      if (!cap.coefficients.empty()) row(RowGroup::polytope, std::move(cap));
    }
  }
  return lp;
}

LpSolution solve_lp(const CommitmentLp& lp, double tol) {
  const auto res = solve_simplex(lp.program, tol);
  if (res.status == LpStatus::infeasible) throw Error(ErrorCode::lp_infeasible, "commitment LP");
  if (res.status == LpStatus::unbounded) throw Error(ErrorCode::lp_unbounded, "commitment LP");
  LpSolution sol;
  sol.status = res.status;
  sol.objective_value = res.objective_value;
  for (std::size_t i = 0; i < lp.x.size(); ++i) {
    std::vector<double> y;
    std::vector<double> z;
    for (auto j : lp.y[i]) y.push_back(res.values[j]);
    for (auto j : lp.z[i]) z.push_back(res.values[j]);
    sol.y.push_back(std::move(y));
    sol.z.push_back(std::move(z));
    sol.x.push_back(res.values[lp.x[i]]);
  }
  return sol;
}

double lp_objective(const std::vector<MarkovSystem>& systems, const LpSolution& sol) {
  double total = 0.0;
  for (std::size_t i = 0; i < systems.size(); ++i)
    for (auto u : systems[i].states()) {
      const double z = sol.z[i][u.index];
      total += systems[i].is_destination(u) ? systems[i].value(u) * z : -systems[i].price(u) * z;
    }
  return total;
}

double lp_violation(const CommitmentLp& lp, const LpSolution& sol) {
  std::vector<double> values(lp.program.variable_count, 0.0);
  for (std::size_t i = 0; i < lp.x.size(); ++i) {
    for (std::size_t u = 0; u < lp.y[i].size(); ++u) {
      values[lp.y[i][u]] = sol.y[i][u];
      values[lp.z[i][u]] = sol.z[i][u];
    }
    values[lp.x[i]] = sol.x[i];
  }
  return max_violation(lp.program, values);
}

bool lp_upper_bound_check(const std::vector<MarkovSystem>& systems, const PackingOracle& polytope,
                          double dp_opt) {
  return solve_lp(build_lp(systems, polytope)).objective_value >= dp_opt - 1e-6;
}

// ---------------------------------------------------------------------------
// OCRS

std::string_view to_string(OcrsKind kind) {
  return kind == OcrsKind::rank1_exact_half ? "rank1_exact_half" : "matroid_greedy_calibrated";
}

namespace {

void check_order(std::span<const std::size_t> order, std::size_t n) {
  std::vector<bool> seen(n, false);
  if (order.size() != n) throw Error(ErrorCode::invalid_argument, "order is not a permutation");
  for (auto i : order) {
    if (i >= n || seen[i]) throw Error(ErrorCode::invalid_argument, "order is not a permutation");
    seen[i] = true;
  }
}

void check_box(std::span<const double> x) {
  for (double v : x)
    if (!(v >= -1e-9 && v <= 1.0 + 1e-9))
      throw Error(ErrorCode::outside_polytope, "coordinate outside [0,1]");
}

}  // namespace

OcrsScheme OcrsScheme::rank1(std::span<const double> x, std::span<const std::size_t> order,
                             std::span<const std::size_t> part_of) {
  const std::size_t n = x.size();
  check_order(order, n);
  check_box(x);
  if (!part_of.empty() && part_of.size() != n)
    throw Error(ErrorCode::invalid_argument, "one part label per element expected");
  OcrsScheme s;
  s.kind_ = OcrsKind::rank1_exact_half;
  s.order_.assign(order.begin(), order.end());
  s.part_of_.assign(part_of.begin(), part_of.end());
  if (s.part_of_.empty()) s.part_of_.assign(n, 0);
  const std::size_t parts = n == 0 ? 0 : *std::max_element(s.part_of_.begin(), s.part_of_.end()) + 1;
  std::vector<double> before(parts, 0.0);
  s.q_.assign(n, 0.0);
  for (auto i : order) {
    const double xi = std::clamp(x[i], 0.0, 1.0);
    double& mass = before[s.part_of_[i]];
    s.q_[i] = std::min(1.0, 0.5 / (1.0 - 0.5 * mass));
    mass += xi;
    if (mass > 1.0 + 1e-9)
      throw Error(ErrorCode::outside_polytope, "coordinates of one part sum above 1");
  }
  return s;
}

OcrsScheme OcrsScheme::greedy_calibrated(const Matroid& m, std::span<const double> x,
                                         std::span<const std::size_t> order, double acceptance) {
  const std::size_t n = x.size();
  check_order(order, n);
  check_box(x);
  if (m.ground_size() != n) throw Error(ErrorCode::invalid_argument, "matroid arity mismatch");
  if (!(acceptance >= 0.0 && acceptance <= 1.0))
    throw Error(ErrorCode::invalid_argument, "acceptance must lie in [0,1]");
  OcrsScheme s;
  s.kind_ = OcrsKind::matroid_greedy_calibrated;
  s.order_.assign(order.begin(), order.end());
  s.q_.assign(n, acceptance);
  s.matroid_.push_back(m);
  return s;
}

OcrsScheme OcrsScheme::for_polytope(const PackingOracle& polytope, std::span<const double> x,
                                    std::span<const std::size_t> order) {
  if (!polytope.is_matroid())
    throw Error(ErrorCode::unsupported_polytope, "OCRS needs a matroid constraint");
  const auto& m = polytope.as_matroid();
  if (m.kind() == MatroidKind::uniform && m.k() == 1) return rank1(x, order);
  if (m.kind() == MatroidKind::partition &&
      std::all_of(m.capacities().begin(), m.capacities().end(), [](std::size_t c) { return c == 1; }))
    return rank1(x, order, m.part_of());
  return greedy_calibrated(m, x, order);
}

bool OcrsScheme::would_select(std::size_t i, const ElementSet& selected, RandomStream& rng) const {
  const double draw = rng.uniform();
  if (kind_ == OcrsKind::rank1_exact_half) {
    for (auto e : selected.elements())
      if (part_of_[e] == part_of_[i]) return false;
    return draw < q_[i];
  }
  return matroid_.front().is_independent(selected.with(i)) && draw < q_[i];
}

// ---------------------------------------------------------------------------
// Play under commitment

namespace {

double continue_probability(double z, double y) {
  if (y < 1e-12) {
    if (z > 1e-9)
      throw Error(ErrorCode::division_degenerate, "positive play mass on an unreachable state");
    return 0.0;
  }
  return std::clamp(z / y, 0.0, 1.0);
}

}  // namespace

CommitmentOutcome run_commitment(const std::vector<MarkovSystem>& systems, const LpSolution& lp,
                                 const OcrsScheme& ocrs, std::uint64_t seed) {
  const std::size_t n = systems.size();
  if (lp.z.size() != n || ocrs.q().size() != n)
    throw Error(ErrorCode::system_mismatch, "LP solution or OCRS does not match the systems");
  CommitmentOutcome out;
  out.selected = ElementSet(n);
  out.green_light.assign(n, false);
  out.active.assign(n, false);
  auto ocrs_rng = RandomStream::derive(seed, ~std::uint64_t{0});
  using Kind = CommitmentEvent::Kind;
  for (auto i : ocrs.order()) {
    const auto& ms = systems[i];
    if (!ocrs.would_select(i, out.selected, ocrs_rng)) {
      out.trace.push_back({i, Kind::skip, ms.start()});
      continue;
    }
    out.green_light[i] = true;
    auto rng = RandomStream::derive(seed, i);
    StateId u = ms.start();
    while (true) {
      const double p = continue_probability(lp.z[i][u.index], lp.y[i][u.index]);
      if (ms.is_destination(u)) {
        if (rng.bernoulli(p)) {
          out.active[i] = true;
          out.selected.insert(i);
          out.utility += ms.value(u);
          out.trace.push_back({i, Kind::select, u});
        } else {
          out.trace.push_back({i, Kind::reject, u});
        }
        break;
      }
      if (!rng.bernoulli(p)) {
        out.trace.push_back({i, Kind::abandon, u});
        break;
      }
      out.utility -= ms.price(u);
      out.total_price += ms.price(u);
      out.trace.push_back({i, Kind::advance, u});
      u = sample_step(ms, u, rng);
    }
  }
  return out;
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

std::vector<std::size_t> random_order(std::size_t n, std::uint64_t seed) {
  auto order = identity_order(n);
  RandomStream rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace mpoi
