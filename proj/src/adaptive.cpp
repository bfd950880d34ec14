#include "mpoi/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <tuple>

#include "mpoi/error.hpp"
#include "mpoi/stats.hpp"

namespace mpoi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_sense(const Instance& inst, Sense sense) {
  if (inst.sense() != sense)
    throw Error(ErrorCode::invalid_argument,
                "expected a " + std::string(to_string(sense)) + " instance");
}

void require_grades(const Instance& inst, const std::vector<GradeTable>& grades) {
  if (grades.size() != inst.size())
    throw Error(ErrorCode::system_mismatch, "grade tables do not match the instance");
  for (std::size_t i = 0; i < inst.size(); ++i)
    if (grades[i].grades.size() != inst.system(i).state_count())
      throw Error(ErrorCode::system_mismatch, "grade table " + std::to_string(i) + " has the wrong size");
}

}  // namespace

TransitionSource sampled_source(const Instance& inst, std::uint64_t seed) {
  auto systems = std::make_shared<std::vector<MarkovSystem>>(inst.systems());
  auto streams = std::make_shared<std::vector<RandomStream>>();
  for (std::size_t i = 0; i < inst.size(); ++i) streams->push_back(RandomStream::derive(seed, i));
  return [systems, streams](std::size_t element, StateId from, std::size_t) {
    return sample_step((*systems)[element], from, (*streams)[element]);
  };
}

TransitionSource replay_source(const TrajectoryProfile& profile) {
  auto recorded = std::make_shared<TrajectoryProfile>(profile);
  return [recorded](std::size_t element, StateId from, std::size_t step) {
    if (element >= recorded->size())
      throw Error(ErrorCode::system_mismatch, "profile has no trajectory for element " +
                                                  std::to_string(element));
    const auto& visited = (*recorded)[element].visited;
    if (step + 1 >= visited.size())
      throw Error(ErrorCode::profile_exhausted,
                  "element " + std::to_string(element) + " needs step " + std::to_string(step + 1) +
                      " beyond its recorded trajectory");
    if (visited[step] != from)
      throw Error(ErrorCode::system_mismatch, "replay diverged from the recorded trajectory");
    return visited[step + 1];
  };
}

Action adaptive_decision(const Instance& inst, const std::vector<GradeTable>& grades,
                         const JointState& state, std::span<const double> shift_per_step) {
  const std::size_t n = inst.size();
  std::vector<Pick> picks;
  picks.reserve(state.picks.size());
  for (auto e : state.picks)
    picks.push_back({e, proxy_from_grade(inst.sense(), grades[e][state.prevailing_at[e]])});
  const MarginalContext ctx{state.selected, picks};
  double best = -kInf;
  std::size_t chosen = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (state.selected.contains(i)) continue;
    if (inst.sense() == Sense::utimax && !inst.packing().is_feasible(state.selected.with(i))) continue;
    double y = proxy_from_grade(inst.sense(), grades[i][state.current[i]]);
    if (!shift_per_step.empty()) y += static_cast<double>(state.steps[i]) * shift_per_step[i];
    const double v = inst.marginal()(ctx, i, y);
    if (v > best) {
      best = v;
      chosen = i;
    }
  }
  if (chosen == n || !(best > 0.0)) return Action::stop();
  if (inst.system(chosen).is_destination(state.current[chosen])) return Action::select(chosen);
  return Action::advance(chosen);
}

Strategy adaptive_strategy(const Instance& inst, const std::vector<GradeTable>& grades) {
  require_grades(inst, grades);
  return [inst, grades](const JointState& s) { return adaptive_decision(inst, grades, s); };
}

Strategy alternating_strategy(const Instance& inst, const std::vector<GradeTable>& grades) {
  require_sense(inst, Sense::utimax);
  require_grades(inst, grades);
  return [inst, grades](const JointState& s) {
    const std::size_t n = inst.size();
    std::optional<std::size_t> next;
    for (std::size_t i = 0; i < n; ++i) {
      if (inst.system(i).is_destination(s.current[i]) || !(grades[i][s.current[i]] > 0.0)) continue;
      if (!next || s.steps[i] < s.steps[*next]) next = i;
    }
    if (next) return Action::advance(*next);
    ElementSet prepared(n);
    std::vector<double> values(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!inst.system(i).is_destination(s.current[i])) continue;
      prepared.insert(i);
      values[i] = inst.system(i).value(s.current[i]);
    }
    const auto best = inst.best_selection(values, prepared);
    for (auto e : best.set.elements())
      if (!s.selected.contains(e)) return Action::select(e);
    return Action::stop();
  };
}

RunOutcome simulate(const Instance& inst, const std::vector<GradeTable>& grades,
                    const Strategy& strategy, const TransitionSource& source, bool track_steps,
                    std::size_t step_ceiling) {
  require_grades(inst, grades);
  const std::size_t n = inst.size();
  RunOutcome out;
  JointState state = initial_joint_state(inst);
  for (std::size_t i = 0; i < n; ++i) {
    Trajectory t;
    t.system_id = i;
    t.visited.push_back(inst.system(i).start());
    t.terminated = inst.system(i).is_destination(inst.system(i).start());
    out.traversed.push_back(std::move(t));
  }
  while (true) {
    const Action a = strategy(state);
    if (a.kind == ActionKind::stop) {
      if (!inst.is_feasible(state.selected))
        throw Error(ErrorCode::no_progress,
                    "strategy stopped with infeasible selection " + state.selected.to_string());
      break;
    }
    check_action(inst, state, a);
    const std::size_t i = a.element;
    const auto& ms = inst.system(i);
    const StateId from = state.current[i];
    if (a.kind == ActionKind::advance) {
      auto& traj = out.traversed[i];
      if (traj.steps() >= step_ceiling)
        throw Error(ErrorCode::non_terminating,
                    ms.name() + " exceeded " + std::to_string(step_ceiling) + " steps");
      const StateId to = source(i, from, traj.steps());
      if (to.index >= ms.state_count() || ms.probability(from, to) <= 0.0)
        throw Error(ErrorCode::system_mismatch, "transition source produced an impossible step");
      out.total_price += ms.price(from);
      traj.visited.push_back(to);
      traj.terminated = ms.is_destination(to);
      out.trace.push_back({ActionKind::advance, i, from, to});
      state = apply_action(state, a, to, grades, track_steps);
    } else {
      out.trace.push_back({ActionKind::select, i, from, from});
      out.picks.push_back({i, proxy_from_grade(inst.sense(), grades[i][state.prevailing_at[i]])});
      state = apply_action(state, a, from, grades, track_steps);
    }
  }
  out.selected = state.selected;
  out.values.assign(n, 0.0);
  for (auto e : out.selected.elements()) out.values[e] = inst.system(e).value(state.current[e]);
  out.objective_value = inst.objective().evaluate(out.selected, out.values);
  out.utility = inst.score(out.selected, out.values, out.total_price);
  out.prevailing.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.prevailing[i] = proxy_from_grade(inst.sense(), grades[i][state.prevailing_at[i]]);
  return out;
}

RunOutcome run_utimax(const Instance& inst, const std::vector<GradeTable>& grades, std::uint64_t seed) {
  require_sense(inst, Sense::utimax);
  return simulate(inst, grades, adaptive_strategy(inst, grades), sampled_source(inst, seed));
}

RunOutcome run_utimax_replayed(const Instance& inst, const std::vector<GradeTable>& grades,
                               const TrajectoryProfile& profile) {
  require_sense(inst, Sense::utimax);
  return simulate(inst, grades, adaptive_strategy(inst, grades), replay_source(profile));
}

RunOutcome run_dismin(const Instance& inst, const std::vector<GradeTable>& grades, std::uint64_t seed) {
  require_sense(inst, Sense::dismin);
  return simulate(inst, grades, adaptive_strategy(inst, grades), sampled_source(inst, seed));
}

RunOutcome run_dismin_replayed(const Instance& inst, const std::vector<GradeTable>& grades,
                               const TrajectoryProfile& profile) {
  require_sense(inst, Sense::dismin);
  return simulate(inst, grades, adaptive_strategy(inst, grades), replay_source(profile));
}

double recompute_utility(const Instance& inst, const RunOutcome& outcome) {
  double price = 0.0;
  std::vector<double> values(inst.size(), 0.0);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& ms = inst.system(i);
    const auto& visited = outcome.traversed.at(i).visited;
    for (std::size_t k = 0; k + 1 < visited.size(); ++k) price += ms.price(visited[k]);
    if (outcome.selected.contains(i)) {
      if (!ms.is_destination(visited.back()))
        throw Error(ErrorCode::validation_error, "selected element " + std::to_string(i) +
                                                     " is not prepared");
      values[i] = ms.value(visited.back());
    }
  }
  return inst.score(outcome.selected, values, price);
}

std::string check_epoch_atomicity(const Instance& inst, const std::vector<GradeTable>& grades,
                                  const RunOutcome& outcome) {
  std::vector<StateId> prevailing_at;
  for (const auto& ms : inst.systems()) prevailing_at.push_back(ms.start());
  const auto& trace = outcome.trace;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& ev = trace[k];
    if (ev.kind != ActionKind::advance) continue;
    const std::size_t i = ev.element;
    if (grades[i][ev.to] < grades[i][prevailing_at[i]]) prevailing_at[i] = ev.to;
    const bool continues = k + 1 < trace.size() && trace[k + 1].element == i;
    if (continues || prevailing_at[i] == ev.to) continue;
    return "event " + std::to_string(k) + ": element " + std::to_string(i) +
           " left mid-epoch at state " + inst.system(i).state_name(ev.to);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Robust play

double RobustnessParams::shift(std::size_t i) const {
  return depth[i] == 0 ? 0.0 : epsilon / (2.0 * static_cast<double>(k) * static_cast<double>(depth[i]));
}

double RobustnessParams::grade_budget(std::size_t i) const {
  return depth[i] == 0 ? 0.0 : epsilon / (4.0 * static_cast<double>(k) * static_cast<double>(depth[i]));
}

std::vector<double> RobustnessParams::shifts() const {
  std::vector<double> s(depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) s[i] = shift(i);
  return s;
}

RobustnessParams robustness_params(const Instance& inst, double epsilon) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be non-negative");
  RobustnessParams p;
  p.epsilon = epsilon;
  p.k = std::max<std::size_t>(1, inst.sense() == Sense::utimax ? inst.packing().max_feasible_size()
                                                               : inst.size());
  double min_prob = 1.0;
  std::size_t d_max = 0;
  for (const auto& ms : inst.systems()) {
    const auto c = classify(ms);
    if (!c.is_dag)
      throw Error(ErrorCode::not_dag,
                  ms.name() + " is cyclic; robust play needs DAG systems");
    p.depth.push_back(*c.depth);
    d_max = std::max(d_max, *c.depth);
    p.B = std::max(p.B, ms.max_abs_parameter());
    min_prob = std::min(min_prob, ms.min_positive_probability());
  }
  p.P = 1.0 / min_prob;
  p.L = static_cast<double>(d_max * d_max) * p.B * p.P;
  return p;
}

Strategy robust_strategy(const Instance& inst, const std::vector<GradeTable>& estimated,
                         const RobustnessParams& params) {
  require_grades(inst, estimated);
  return [inst, estimated, shifts = params.shifts()](const JointState& s) {
    return adaptive_decision(inst, estimated, s, shifts);
  };
}

std::vector<double> shifted_prevailing(const std::vector<GradeTable>& estimated,
                                       const RobustnessParams& params,
                                       const std::vector<Trajectory>& traversed) {
  std::vector<double> out;
  for (std::size_t i = 0; i < traversed.size(); ++i) {
    double best = kInf;
    const auto& visited = traversed[i].visited;
    for (std::size_t c = 0; c < visited.size(); ++c)
      best = std::min(best, estimated[i][visited[c]] + static_cast<double>(c) * params.shift(i));
    out.push_back(best);
  }
  return out;
}

RunOutcome run_robust_utimax(const Instance& inst, const std::vector<GradeTable>& estimated,
                             const RobustnessParams& params, const TransitionSource& source) {
  require_sense(inst, Sense::utimax);
  if (!inst.all_dag()) throw Error(ErrorCode::not_dag, "robust play needs DAG systems");
  if (params.depth.size() != inst.size())
    throw Error(ErrorCode::system_mismatch, "robustness parameters do not match the instance");
  RunOutcome out = simulate(inst, estimated, robust_strategy(inst, estimated, params), source, true);
  out.prevailing = shifted_prevailing(estimated, params, out.traversed);
  return out;
}

double robust_expected_utility(const Instance& inst, const std::vector<GradeTable>& estimated,
                               const RobustnessParams& params, std::size_t profile_cap) {
  std::vector<WeightedProfile> profiles;
  try {
    profiles = enumerate_profiles(inst.systems(), profile_cap);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::too_many_profiles || e.code() == ErrorCode::not_dag)
      throw Error(ErrorCode::too_large_for_exact, e.what());
    throw;
  }
  return profile_expectation(profiles, [&](const TrajectoryProfile& p) {
    return run_robust_utimax(inst, estimated, params, replay_source(p)).utility;
  });
}

MarkovSystem perturb_transitions(const MarkovSystem& ms, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw Error(ErrorCode::invalid_argument, "perturbation must be non-negative");
  SystemDraft d(ms.name());
  for (auto s : ms.states()) d.add_state(ms.state_name(s));
  for (auto s : ms.states()) {
    if (ms.is_destination(s)) {
      d.destination(s, ms.value(s));
      continue;
    }
    d.price(s, ms.price(s));
    const auto row = ms.successors(s);
    if (row.size() < 2 || delta == 0.0) {
      for (const auto& t : row) d.edge(s, t.to, t.probability);
      continue;
    }
    auto rng = RandomStream::derive(seed, s.index);
    std::vector<double> shift(row.size());
    double mean = 0.0;
    double min_p = 1.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      shift[j] = 2.0 * rng.uniform() - 1.0;
      mean += shift[j];
      min_p = std::min(min_p, row[j].probability);
    }
    mean /= static_cast<double>(row.size());
    double largest = 0.0;
    for (auto& x : shift) {
      x -= mean;
      largest = std::max(largest, std::abs(x));
    }
    const double scale = largest > 0.0 ? std::min(delta, 0.5 * min_p) / largest : 0.0;
    for (std::size_t j = 0; j < row.size(); ++j)
      d.edge(s, row[j].to, row[j].probability + scale * shift[j]);
  }
  d.start(ms.start());
  return MarkovSystem::from_draft(d);
}

std::vector<GradeTable> inject_grade_noise(const Instance& inst, const std::vector<GradeTable>& grades,
                                           std::span<const double> magnitude, std::uint64_t seed) {
  require_grades(inst, grades);
  if (magnitude.size() != inst.size())
    throw Error(ErrorCode::invalid_argument, "one noise magnitude per element expected");
  auto out = grades;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    auto rng = RandomStream::derive(seed, i);
    for (auto s : inst.system(i).states()) {
      if (inst.system(i).is_destination(s)) continue;
      out[i].grades[s.index] += (2.0 * rng.uniform() - 1.0) * magnitude[i];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Surrogate

SurrogateEstimate surrogate_estimate(const Instance& inst, const std::vector<GradeTable>& grades,
                                     std::size_t n_samples, std::uint64_t seed, bool exact) {
  require_grades(inst, grades);
  SurrogateEstimate est;
  est.exact = exact;
  est.inner_exhaustive = inst.size() <= kMaxExhaustiveElements;
  const ElementSet all = ElementSet::full(inst.size());
  auto evaluate = [&](const TrajectoryProfile& profile) {
    const auto y = prevailing_proxies(inst, grades, profile);
    const double frugal = inst.objective().evaluate(inst.frugal(y).selected, y);
    const double best = est.inner_exhaustive ? inst.best_selection(y, all).value : frugal;
    return std::pair{best, frugal};
  };

  if (exact) {
    std::vector<WeightedProfile> profiles;
    try {
      profiles = enumerate_profiles(inst.systems(), kMaxExactSurrogateProfiles);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::too_many_profiles || e.code() == ErrorCode::not_dag)
        throw Error(ErrorCode::too_large_for_exact, e.what());
      throw;
    }
    std::vector<double> best(profiles.size());
    std::vector<double> frugal(profiles.size());
    for (std::size_t k = 0; k < profiles.size(); ++k) {
      const auto [b, f] = evaluate(profiles[k].profile);
      best[k] = profiles[k].weight * b;
      frugal[k] = profiles[k].weight * f;
    }
    est.mean = pairwise_sum(best);
    est.frugal_mean = pairwise_sum(frugal);
    est.samples = profiles.size();
    return est;
  }

  if (n_samples < 2) throw Error(ErrorCode::invalid_argument, "surrogate sampling needs >= 2 samples");
  std::vector<double> best(n_samples);
  std::vector<double> frugal(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto profile = sample_profile(inst.systems(), mix_seed(seed, s));
    std::tie(best[s], frugal[s]) = evaluate(profile);
  }
  const auto b = summarize(best);
  const auto f = summarize(frugal);
  est.mean = b.mean;
  est.stderr_mean = b.stderr_mean;
  est.frugal_mean = f.mean;
  est.frugal_stderr = f.stderr_mean;
  est.samples = n_samples;
  return est;
}

}  // namespace mpoi
