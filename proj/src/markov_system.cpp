#include "mpoi/markov_system.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace mpoi {

// ---------------------------------------------------------------------------
// SystemDraft

StateId SystemDraft::add_state(std::string state_name) {
  StateId id{static_cast<std::uint32_t>(names_.size())};
  names_.push_back(std::move(state_name));
  rows_.emplace_back();
  prices_.emplace_back();
  values_.emplace_back();
  destination_.push_back(false);
  return id;
}

void SystemDraft::check_state(StateId s) const {
  if (s.index >= names_.size())
    throw Error(ErrorCode::invalid_argument,
                "state index " + std::to_string(s.index) + " out of range in '" + name_ + "'");
}

SystemDraft& SystemDraft::edge(StateId from, StateId to, double probability) {
  check_state(from);
  check_state(to);
  rows_[from.index].push_back({to, probability});
  return *this;
}

SystemDraft& SystemDraft::price(StateId state, double amount) {
  check_state(state);
  prices_[state.index] = amount;
  return *this;
}

SystemDraft& SystemDraft::destination(StateId state, double value) {
  check_state(state);
  destination_[state.index] = true;
  values_[state.index] = value;
  return *this;
}

SystemDraft& SystemDraft::destination(StateId state) {
  check_state(state);
  destination_[state.index] = true;
  return *this;
}

SystemDraft& SystemDraft::start(StateId state) {
  check_state(state);
  start_ = state;
  return *this;
}

// ---------------------------------------------------------------------------
// Validation

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::row_not_stochastic: return "RowNotStochastic";
    case IssueKind::unreachable_destination: return "UnreachableDestination";
    case IssueKind::price_missing: return "PriceMissing";
    case IssueKind::value_missing: return "ValueMissing";
    case IssueKind::negative_price: return "NegativePrice";
    case IssueKind::price_on_destination: return "PriceOnDestination";
    case IssueKind::invalid_start: return "InvalidStart";
    case IssueKind::invalid_edge: return "InvalidEdge";
  }
  return "Unknown";
}

bool ValidationReport::has(IssueKind kind) const {
  return std::any_of(issues.begin(), issues.end(),
                     [kind](const ValidationIssue& i) { return i.kind == kind; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < issues.size(); ++k) {
    if (k) out << "; ";
    out << mpoi::to_string(issues[k].kind) << "(" << issues[k].detail << ")";
  }
  return out.str();
}

namespace {

std::string state_label(const SystemDraft& d, std::size_t u) {
  const auto& n = d.state_names()[u];
  return n.empty() ? "#" + std::to_string(u) : n;
}

bool is_self_loop_only(const std::vector<Transition>& row, std::size_t u) {
  double mass = 0.0;
  for (const auto& t : row) {
    if (t.to.index != u && t.probability != 0.0) return false;
    mass += t.probability;
  }
  return row.empty() || std::abs(mass - 1.0) <= kRowSumTolerance;
}

}  // namespace

ValidationReport validate_system(const SystemDraft& d) {
  ValidationReport report;
  const std::size_t n = d.state_count();
  auto add = [&](IssueKind kind, std::size_t u, std::string detail) {
    report.issues.push_back({kind, StateId{static_cast<std::uint32_t>(u)}, std::move(detail)});
  };

  if (!d.start_state() || d.start_state()->index >= n)
    add(IssueKind::invalid_start, 0, "system '" + d.name() + "' has no valid start state");

  for (std::size_t u = 0; u < n; ++u) {
    const auto& row = d.rows()[u];
    const std::string label = state_label(d, u);
    if (d.destination_flags()[u]) {
      if (!d.values()[u]) add(IssueKind::value_missing, u, label);
      if (d.prices()[u]) add(IssueKind::price_on_destination, u, label);
      if (!is_self_loop_only(row, u))
        add(IssueKind::invalid_edge, u, label + " is a destination with outgoing edges");
      continue;
    }
    if (!d.prices()[u]) {
      add(IssueKind::price_missing, u, label);
    } else if (!(*d.prices()[u] >= 0.0) || !std::isfinite(*d.prices()[u])) {
      add(IssueKind::negative_price, u, label);
    }
    double sum = 0.0;
    bool bad_entry = false;
    for (const auto& t : row) {
      if (!(t.probability >= 0.0 && t.probability <= 1.0)) bad_entry = true;
      sum += t.probability;
    }
    if (bad_entry || row.empty() || std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << label << " row sums to " << sum;
      add(IssueKind::row_not_stochastic, u, msg.str());
    }
  }

  // Every state must be able to reach a destination; in a finite chain this
  // is equivalent to absorption with probability one.
  std::vector<std::vector<std::size_t>> reverse(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (d.destination_flags()[u]) continue;
    for (const auto& t : d.rows()[u])
      if (t.probability > 0.0 && t.to.index < n) reverse[t.to.index].push_back(u);
  }
  std::vector<bool> reaches(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t u = 0; u < n; ++u)
    if (d.destination_flags()[u]) {
      reaches[u] = true;
      queue.push_back(u);
    }
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto u : reverse[v])
      if (!reaches[u]) {
        reaches[u] = true;
        queue.push_back(u);
      }
  }
  for (std::size_t u = 0; u < n; ++u)
    if (!reaches[u]) add(IssueKind::unreachable_destination, u, state_label(d, u));

  return report;
}

// ---------------------------------------------------------------------------
// MarkovSystem

MarkovSystem MarkovSystem::from_draft(const SystemDraft& d) {
  auto report = validate_system(d);
  if (!report.ok()) throw ValidationFailure(std::move(report));

  MarkovSystem ms;
  const std::size_t n = d.state_count();
  ms.name_ = d.name();
  ms.names_ = d.state_names();
  for (std::size_t u = 0; u < n; ++u)
    if (ms.names_[u].empty()) ms.names_[u] = "#" + std::to_string(u);
  ms.start_ = *d.start_state();
  ms.destination_ = d.destination_flags();
  ms.price_.assign(n, 0.0);
  ms.value_.assign(n, 0.0);
  ms.rows_.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    StateId self{static_cast<std::uint32_t>(u)};
    if (ms.destination_[u]) {
      ms.value_[u] = *d.values()[u];
      ms.rows_[u] = {{self, 1.0}};
      continue;
    }
    ms.price_[u] = *d.prices()[u];
    // Merge duplicate targets, drop zero mass, normalize within tolerance.
    std::vector<Transition> row;
    for (const auto& t : d.rows()[u]) {
      if (t.probability == 0.0) continue;
      auto it = std::find_if(row.begin(), row.end(),
                             [&](const Transition& r) { return r.to == t.to; });
      if (it == row.end()) {
        row.push_back(t);
      } else {
        it->probability += t.probability;
      }
    }
    double sum = 0.0;
    for (const auto& t : row) sum += t.probability;
    for (auto& t : row) t.probability /= sum;
    ms.rows_[u] = std::move(row);
  }
  return ms;
}

std::optional<StateId> MarkovSystem::find_state(std::string_view state_name) const {
  for (std::size_t u = 0; u < names_.size(); ++u)
    if (names_[u] == state_name) return StateId{static_cast<std::uint32_t>(u)};
  return std::nullopt;
}

double MarkovSystem::probability(StateId from, StateId to) const {
  for (const auto& t : rows_[from.index])
    if (t.to == to) return t.probability;
  return 0.0;
}

std::vector<StateId> MarkovSystem::states() const {
  std::vector<StateId> out;
  for (std::size_t u = 0; u < names_.size(); ++u) out.push_back({static_cast<std::uint32_t>(u)});
  return out;
}

std::vector<StateId> MarkovSystem::destinations() const {
  std::vector<StateId> out;
  for (std::size_t u = 0; u < names_.size(); ++u)
    if (destination_[u]) out.push_back({static_cast<std::uint32_t>(u)});
  return out;
}

double MarkovSystem::min_positive_probability() const {
  double best = 1.0;
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    if (destination_[u]) continue;
    for (const auto& t : rows_[u])
      if (t.probability > 0.0) best = std::min(best, t.probability);
  }
  return best;
}

double MarkovSystem::max_abs_parameter() const {
  double b = 0.0;
  for (std::size_t u = 0; u < rows_.size(); ++u)
    b = std::max(b, destination_[u] ? std::abs(value_[u]) : std::abs(price_[u]));
  return b;
}

SystemDraft MarkovSystem::to_draft() const {
  SystemDraft d(name_);
  for (const auto& n : names_) d.add_state(n);
  for (std::size_t u = 0; u < names_.size(); ++u) {
    StateId s{static_cast<std::uint32_t>(u)};
    if (destination_[u]) {
      d.destination(s, value_[u]);
    } else {
      d.price(s, price_[u]);
      for (const auto& t : rows_[u]) d.edge(s, t.to, t.probability);
    }
  }
  d.start(start_);
  return d;
}

MarkovSystem MarkovSystem::with_values_negated() const {
  MarkovSystem copy = *this;
  for (std::size_t u = 0; u < value_.size(); ++u)
    if (destination_[u]) copy.value_[u] = -value_[u];
  return copy;
}

MarkovSystem MarkovSystem::with_row(StateId state, std::vector<Transition> row) const {
  SystemDraft out(name_);
  for (const auto& n : names_) out.add_state(n);
  for (std::size_t u = 0; u < names_.size(); ++u) {
    StateId s{static_cast<std::uint32_t>(u)};
    if (destination_[u]) {
      out.destination(s, value_[u]);
      continue;
    }
    out.price(s, price_[u]);
    const auto& src = (s == state) ? row : rows_[u];
    for (const auto& t : src) out.edge(s, t.to, t.probability);
  }
  out.start(start_);
  return from_draft(out);
}

// ---------------------------------------------------------------------------
// Structure

std::optional<std::vector<StateId>> topological_order(const MarkovSystem& ms) {
  const std::size_t n = ms.state_count();
  std::vector<std::size_t> indegree(n, 0);
  for (auto u : ms.states()) {
    if (ms.is_destination(u)) continue;
    for (const auto& t : ms.successors(u)) ++indegree[t.to.index];
  }
  std::deque<StateId> ready;
  for (auto u : ms.states())
    if (indegree[u.index] == 0) ready.push_back(u);
  std::vector<StateId> order;
  while (!ready.empty()) {
    StateId u = ready.front();
    ready.pop_front();
    order.push_back(u);
    if (ms.is_destination(u)) continue;
    for (const auto& t : ms.successors(u))
      if (--indegree[t.to.index] == 0) ready.push_back(t.to);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

Classification classify(const MarkovSystem& ms) {
  auto order = topological_order(ms);
  if (!order) return {false, std::nullopt};
  // Longest path from start, over states reachable from start.
  std::vector<long> longest(ms.state_count(), -1);
  longest[ms.start().index] = 0;
  std::size_t depth = 0;
  for (auto u : *order) {
    if (longest[u.index] < 0) continue;
    if (ms.is_destination(u)) {
      depth = std::max(depth, static_cast<std::size_t>(longest[u.index]));
      continue;
    }
    for (const auto& t : ms.successors(u))
      longest[t.to.index] = std::max(longest[t.to.index], longest[u.index] + 1);
  }
  return {true, depth};
}

// ---------------------------------------------------------------------------
// Sampling

StateId sample_step(const MarkovSystem& ms, StateId from, RandomStream& rng) {
  if (ms.is_destination(from))
    throw Error(ErrorCode::step_from_destination,
                ms.name() + ":" + ms.state_name(from) + " is a destination");
  const auto row = ms.successors(from);
  const double draw = rng.uniform();
  double cumulative = 0.0;
  for (const auto& t : row) {
    cumulative += t.probability;
    if (draw < cumulative) return t.to;
  }
  return row.back().to;
}

Trajectory sample_trajectory(const MarkovSystem& ms, std::size_t system_id, RandomStream& rng,
                             std::size_t step_ceiling) {
  Trajectory traj;
  traj.system_id = system_id;
  StateId current = ms.start();
  traj.visited.push_back(current);
  while (!ms.is_destination(current)) {
    if (traj.steps() >= step_ceiling)
      throw Error(ErrorCode::non_terminating,
                  ms.name() + " did not reach a destination within " +
                      std::to_string(step_ceiling) + " steps");
    current = sample_step(ms, current, rng);
    traj.visited.push_back(current);
  }
  traj.terminated = true;
  return traj;
}

std::string check_trajectory(const MarkovSystem& ms, const Trajectory& traj) {
  if (traj.visited.empty()) return "empty trajectory";
  if (traj.visited.front() != ms.start()) return "trajectory does not begin at the start state";
  for (std::size_t k = 0; k + 1 < traj.visited.size(); ++k) {
    StateId u = traj.visited[k];
    StateId v = traj.visited[k + 1];
    if (u.index >= ms.state_count() || v.index >= ms.state_count()) return "state out of range";
    if (ms.is_destination(u)) return "trajectory continues after a destination";
    if (ms.probability(u, v) <= 0.0) return "zero-probability transition";
  }
  if (traj.terminated != ms.is_destination(traj.visited.back()))
    return "terminated flag disagrees with the final state";
  return {};
}

TrajectoryProfile::TrajectoryProfile(std::vector<Trajectory> trajectories)
    : trajectories_(std::move(trajectories)) {
  std::sort(trajectories_.begin(), trajectories_.end(),
            [](const Trajectory& a, const Trajectory& b) { return a.system_id < b.system_id; });
  for (std::size_t i = 0; i < trajectories_.size(); ++i)
    if (trajectories_[i].system_id != i)
      throw Error(ErrorCode::invalid_argument, "trajectory profile ids are not a permutation");
}

TrajectoryProfile sample_profile(std::span<const MarkovSystem> systems, std::uint64_t master_seed,
                                 std::size_t step_ceiling) {
  std::vector<Trajectory> out;
  out.reserve(systems.size());
  for (std::size_t i = 0; i < systems.size(); ++i) {
    auto rng = RandomStream::derive(master_seed, i);
    out.push_back(sample_trajectory(systems[i], i, rng, step_ceiling));
  }
  return TrajectoryProfile(std::move(out));
}

// ---------------------------------------------------------------------------
// Constructors

MarkovSystem deterministic_chain(double price, double value, std::string name) {
  SystemDraft d(std::move(name));
  auto s = d.add_state("s");
  auto t = d.add_state("t");
  d.edge(s, t, 1.0).price(s, price).destination(t, value).start(s);
  return MarkovSystem::from_draft(d);
}

MarkovSystem single_stage(double price, std::span<const std::pair<double, double>> outcomes,
                          std::string name) {
  SystemDraft d(std::move(name));
  auto s = d.add_state("s");
  d.price(s, price).start(s);
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    auto t = d.add_state("t" + std::to_string(k + 1));
    d.destination(t, outcomes[k].first).edge(s, t, outcomes[k].second);
  }
  return MarkovSystem::from_draft(d);
}

MarkovSystem constant_system(double value, std::string name) {
  SystemDraft d(std::move(name));
  auto t = d.add_state("t");
  d.destination(t, value).start(t);
  return MarkovSystem::from_draft(d);
}

}  // namespace mpoi
