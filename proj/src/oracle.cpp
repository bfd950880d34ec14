#include "mpoi/oracle.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "mpoi/error.hpp"

namespace mpoi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void append(std::string& key, std::uint32_t v) {
  key.append(reinterpret_cast<const char*>(&v), sizeof v);
}

std::string encode(const JointState& s) {
  std::string key;
  key.reserve(4 * (3 * s.current.size() + s.picks.size() + 1));
  for (auto c : s.current) append(key, c.index);
  for (auto p : s.prevailing_at) append(key, p.index);
  for (auto st : s.steps) append(key, st);
  append(key, 0xffffffffU);
  for (auto p : s.picks) append(key, static_cast<std::uint32_t>(p));
  return key;
}

std::string encode(const std::vector<StateId>& current) {
  std::string key;
  for (auto c : current) append(key, c.index);
  return key;
}

void require_dag(const Instance& inst) {
  for (std::size_t i = 0; i < inst.size(); ++i)
    if (!classify(inst.system(i)).is_dag)
      throw Error(ErrorCode::not_dag, inst.system(i).name() + " is cyclic; exact evaluation needs DAGs");
}

std::vector<double> destination_values(const Instance& inst, const std::vector<StateId>& current) {
  std::vector<double> v(inst.size(), 0.0);
  for (std::size_t i = 0; i < inst.size(); ++i)
    if (inst.system(i).is_destination(current[i])) v[i] = inst.system(i).value(current[i]);
  return v;
}

double step_cost(const Instance& inst, std::size_t i, StateId u) {
  const double price = inst.system(i).price(u);
  return inst.sense() == Sense::utimax ? -price : price;
}

}  // namespace

JointState initial_joint_state(const Instance& inst) {
  JointState s;
  for (const auto& ms : inst.systems()) {
    s.current.push_back(ms.start());
    s.prevailing_at.push_back(ms.start());
  }
  s.steps.assign(inst.size(), 0);
  s.selected = ElementSet(inst.size());
  return s;
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::advance: return "advance " + std::to_string(a.element);
    case ActionKind::select: return "select " + std::to_string(a.element);
    case ActionKind::stop: return "stop";
  }
  return "?";
}

void check_action(const Instance& inst, const JointState& s, const Action& a) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::undefined_action, to_string(a) + ": " + why);
  };
  if (a.kind == ActionKind::stop) {
    if (!inst.is_feasible(s.selected)) fail("selection " + s.selected.to_string() + " is infeasible");
    return;
  }
  if (a.element >= inst.size()) fail("no such element");
  if (s.selected.contains(a.element)) fail("element already selected");
  const bool at_destination = inst.system(a.element).is_destination(s.current[a.element]);
  if (a.kind == ActionKind::advance) {
    if (at_destination) fail("system already at a destination");
    return;
  }
  if (!at_destination) fail("element is not prepared");
  if (inst.sense() == Sense::utimax && !inst.packing().is_feasible(s.selected.with(a.element)))
    fail("selection would become infeasible");
}

JointState apply_action(const JointState& s, const Action& a, StateId next,
                        const std::vector<GradeTable>& grades, bool track_steps) {
  JointState t = s;
  const std::size_t i = a.element;
  if (a.kind == ActionKind::advance) {
    t.current[i] = next;
    if (grades[i][next] < grades[i][t.prevailing_at[i]]) t.prevailing_at[i] = next;
    if (track_steps) ++t.steps[i];
  } else if (a.kind == ActionKind::select) {
    t.picks.push_back(i);
    t.selected.insert(i);
  }
  return t;
}

double exact_policy_value(const Instance& inst, const std::vector<GradeTable>& grades,
                          const Strategy& strategy, const EvalOptions& opts,
                          std::size_t* state_count) {
  require_dag(inst);
  if (grades.size() != inst.size())
    throw Error(ErrorCode::system_mismatch, "grade tables do not match the instance");

  struct Frame {
    JointState state;
    std::string key;
    bool expanded = false;
    double immediate = 0.0;
    std::vector<std::pair<double, std::string>> children;
  };
  std::unordered_map<std::string, double> memo;
  std::vector<Frame> stack;
  const JointState root = initial_joint_state(inst);
  const std::string root_key = encode(root);
  stack.push_back({root, root_key, false, 0.0, {}});

  while (!stack.empty()) {
    if (memo.count(stack.back().key)) {
      stack.pop_back();
      continue;
    }
    if (stack.back().expanded) {
      Frame& f = stack.back();
      double v = f.immediate;
      for (const auto& [p, k] : f.children) v += p * memo.at(k);
      memo.emplace(f.key, v);
      stack.pop_back();
      continue;
    }
    if (memo.size() + stack.size() > opts.state_cap)
      throw Error(ErrorCode::state_space_too_large,
                  "more than " + std::to_string(opts.state_cap) + " joint states");

    const JointState state = stack.back().state;
    const std::string key = stack.back().key;
    const Action a = strategy(state);
    check_action(inst, state, a);
    if (a.kind == ActionKind::stop) {
      memo.emplace(key, inst.objective().evaluate(state.selected,
                                                  destination_values(inst, state.current)));
      stack.pop_back();
      continue;
    }
    std::vector<std::pair<double, std::string>> children;
    std::vector<Frame> pending;
    double immediate = 0.0;
    if (a.kind == ActionKind::select) {
      JointState next = apply_action(state, a, {}, grades, opts.track_steps);
      auto k = encode(next);
      children.emplace_back(1.0, k);
      if (!memo.count(k)) pending.push_back({std::move(next), k, false, 0.0, {}});
    } else {
      const auto& ms = inst.system(a.element);
      immediate = step_cost(inst, a.element, state.current[a.element]);
      for (const auto& t : ms.successors(state.current[a.element])) {
        JointState next = apply_action(state, a, t.to, grades, opts.track_steps);
        auto k = encode(next);
        children.emplace_back(t.probability, k);
        if (!memo.count(k)) pending.push_back({std::move(next), k, false, 0.0, {}});
      }
    }
    Frame& f = stack.back();
    f.expanded = true;
    f.immediate = immediate;
    f.children = std::move(children);
    for (auto& p : pending) stack.push_back(std::move(p));
  }
  if (state_count) *state_count = memo.size();
  return memo.at(root_key);
}

DpResult optimal_policy_dp(const Instance& inst, const DpOptions& opts) {
  require_dag(inst);
  const std::size_t n = inst.size();

  struct Node {
    double value = 0.0;
    Action action;
    ElementSet chosen;
  };
  struct Frame {
    std::vector<StateId> current;
    std::string key;
    bool expanded = false;
  };
  std::unordered_map<std::string, Node> memo;
  std::vector<Frame> stack;
  std::vector<StateId> root;
  for (const auto& ms : inst.systems()) root.push_back(ms.start());
  const std::string root_key = encode(root);
  stack.push_back({root, root_key, false});
  DpResult result;

  while (!stack.empty()) {
    if (memo.count(stack.back().key)) {
      stack.pop_back();
      continue;
    }
    Frame& f = stack.back();
    if (!f.expanded) {
      if (memo.size() + stack.size() > opts.state_cap)
        throw Error(ErrorCode::state_space_too_large,
                    "more than " + std::to_string(opts.state_cap) + " joint states");
      f.expanded = true;
      std::vector<Frame> pending;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& ms = inst.system(i);
        if (ms.is_destination(f.current[i])) continue;
        for (const auto& t : ms.successors(f.current[i])) {
          auto next = f.current;
          next[i] = t.to;
          auto k = encode(next);
          if (!memo.count(k)) pending.push_back({std::move(next), std::move(k), false});
        }
      }
      for (auto& p : pending) stack.push_back(std::move(p));
      continue;
    }

    ElementSet prepared(n);
    for (std::size_t i = 0; i < n; ++i)
      if (inst.system(i).is_destination(f.current[i])) prepared.insert(i);
    Node node;
    const auto best = inst.best_selection(destination_values(inst, f.current), prepared);
    node.value = best.found ? best.value : (inst.sense() == Sense::utimax ? -kInf : kInf);
    node.chosen = best.found ? best.set : ElementSet(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ms = inst.system(i);
      if (ms.is_destination(f.current[i])) continue;
      double v = step_cost(inst, i, f.current[i]);
      for (const auto& t : ms.successors(f.current[i])) {
        auto next = f.current;
        next[i] = t.to;
        v += t.probability * memo.at(encode(next)).value;
      }
      if (inst.better(v, node.value)) {
        node.value = v;
        node.action = Action::advance(i);
      }
    }
    if (!std::isfinite(node.value))
      throw Error(ErrorCode::no_progress, "no feasible completion from a reachable joint state");
    if (opts.record_policy) result.policy.push_back({f.current, node.action, node.chosen, node.value});
    memo.emplace(f.key, std::move(node));
    stack.pop_back();
  }
  result.optimal_value = memo.at(root_key).value;
  result.state_count = memo.size();
  return result;
}

std::vector<std::pair<Trajectory, double>> enumerate_paths(const MarkovSystem& ms,
                                                           std::size_t system_id,
                                                           std::size_t cap) {
  if (!classify(ms).is_dag)
    throw Error(ErrorCode::not_dag, ms.name() + " is cyclic; its paths cannot be enumerated");
  std::vector<std::pair<Trajectory, double>> out;
  struct Item {
    std::vector<StateId> path;
    double prob;
  };
  std::vector<Item> stack{{{ms.start()}, 1.0}};
  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    const StateId u = item.path.back();
    if (ms.is_destination(u)) {
      if (out.size() >= cap)
        throw Error(ErrorCode::too_many_profiles, ms.name() + " has more than " +
                                                      std::to_string(cap) + " paths");
      Trajectory traj;
      traj.system_id = system_id;
      traj.visited = std::move(item.path);
      traj.terminated = true;
      out.emplace_back(std::move(traj), item.prob);
      continue;
    }
    const auto row = ms.successors(u);
    for (auto it = row.rbegin(); it != row.rend(); ++it) {
      Item next{item.path, item.prob * it->probability};
      next.path.push_back(it->to);
      stack.push_back(std::move(next));
    }
  }
  return out;
}

std::vector<WeightedProfile> enumerate_profiles(std::span<const MarkovSystem> systems,
                                                std::size_t cap) {
  std::vector<std::vector<std::pair<Trajectory, double>>> paths;
  double total = 1.0;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    paths.push_back(enumerate_paths(systems[i], i, cap));
    total *= static_cast<double>(paths.back().size());
    if (total > static_cast<double>(cap))
      throw Error(ErrorCode::too_many_profiles,
                  "more than " + std::to_string(cap) + " trajectory profiles");
  }
  std::vector<WeightedProfile> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(systems.size(), 0);
  while (true) {
    std::vector<Trajectory> trajs;
    double w = 1.0;
    for (std::size_t i = 0; i < systems.size(); ++i) {
      trajs.push_back(paths[i][idx[i]].first);
      w *= paths[i][idx[i]].second;
    }
    out.push_back({TrajectoryProfile(std::move(trajs)), w});
    std::size_t pos = 0;
    while (pos < systems.size() && ++idx[pos] == paths[pos].size()) idx[pos++] = 0;
    if (pos == systems.size()) break;
  }
  return out;
}

double profile_expectation(const std::vector<WeightedProfile>& profiles,
                           const std::function<double(const TrajectoryProfile&)>& value) {
  double total = 0.0;
  for (const auto& wp : profiles) total += wp.weight * value(wp.profile);
  return total;
}

}  // namespace mpoi
