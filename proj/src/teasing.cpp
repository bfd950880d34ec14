#include "mpoi/teasing.hpp"

#include <functional>
#include <string>
#include <unordered_map>

#include "mpoi/error.hpp"

namespace mpoi {

namespace {

bool mid_epoch(const MarkovSystem& ms, const TeasingState& s, std::size_t i) {
  return !ms.is_destination(s.current[i]) && s.current[i] != s.prevailing_at[i];
}

std::string encode(const TeasingState& s) {
  std::string key;
  auto put = [&](std::uint32_t v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
  for (auto c : s.current) put(c.index);
  for (auto p : s.prevailing_at) put(p.index);
  put(s.last ? static_cast<std::uint32_t>(*s.last) : 0xffffffffU);
  return key;
}

}  // namespace

double teasing_game_value(const std::vector<MarkovSystem>& systems,
                          const std::vector<GradeTable>& grades, const TeasingSchedule& schedule,
                          const SelectionRule& rule, std::size_t state_cap) {
  if (grades.size() != systems.size())
    throw Error(ErrorCode::system_mismatch, "grade tables do not match the systems");
  for (const auto& ms : systems)
    if (!classify(ms).is_dag)
      throw Error(ErrorCode::not_dag, ms.name() + " is cyclic; the teasing game is evaluated on DAGs");

  std::unordered_map<std::string, double> memo;
  std::function<double(const TeasingState&)> value = [&](const TeasingState& s) -> double {
    const auto key = encode(s);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (memo.size() >= state_cap)
      throw Error(ErrorCode::state_space_too_large, "teasing game state space exceeds the cap");

    const auto choice = schedule(s);
    if (s.last && (!choice || *choice != *s.last) && mid_epoch(systems[*s.last], s, *s.last))
      throw Error(ErrorCode::epoch_violation,
                  "system " + std::to_string(*s.last) + " left in the middle of an epoch at " +
                      systems[*s.last].state_name(s.current[*s.last]));
    double v = 0.0;
    if (choice) {
      const std::size_t i = *choice;
      if (i >= systems.size() || systems[i].is_destination(s.current[i]))
        throw Error(ErrorCode::undefined_action, "schedule advanced an unavailable system");
      const auto& ms = systems[i];
      v = -ms.price(s.current[i]);
      for (const auto& t : ms.successors(s.current[i])) {
        TeasingState next = s;
        next.current[i] = t.to;
        next.last = i;
        if (grades[i][t.to] < grades[i][next.prevailing_at[i]]) next.prevailing_at[i] = t.to;
        double payoff = 0.0;
        if (ms.is_destination(t.to)) {
          const double y = grades[i][next.prevailing_at[i]];
          if (rule(i, ms.value(t.to), y)) payoff = ms.value(t.to) - y;
        }
        v += t.probability * (payoff + value(next));
      }
    }
    memo.emplace(key, v);
    return v;
  };

  TeasingState root;
  for (const auto& ms : systems) {
    root.current.push_back(ms.start());
    root.prevailing_at.push_back(ms.start());
  }
  return value(root);
}

TeasingSchedule sequential_schedule(const std::vector<MarkovSystem>& systems) {
  return [systems](const TeasingState& s) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < systems.size(); ++i)
      if (!systems[i].is_destination(s.current[i])) return i;
    return std::nullopt;
  };
}

TeasingSchedule index_schedule(const std::vector<MarkovSystem>& systems,
                               const std::vector<GradeTable>& grades) {
  return [systems, grades](const TeasingState& s) -> std::optional<std::size_t> {
    if (s.last && mid_epoch(systems[*s.last], s, *s.last)) return *s.last;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < systems.size(); ++i) {
      if (systems[i].is_destination(s.current[i])) continue;
      if (!best || grades[i][s.current[i]] > grades[*best][s.current[*best]]) best = i;
    }
    return best;
  };
}

TeasingSchedule single_epoch_schedule(const std::vector<MarkovSystem>& systems,
                                      const std::vector<GradeTable>&, std::size_t element) {
  return [systems, element](const TeasingState& s) -> std::optional<std::size_t> {
    if (systems[element].is_destination(s.current[element])) return std::nullopt;
    if (!s.last) return element;
    if (mid_epoch(systems[element], s, element)) return element;
    return std::nullopt;
  };
}

TeasingSchedule alternating_schedule(const std::vector<MarkovSystem>& systems) {
  return [systems](const TeasingState& s) -> std::optional<std::size_t> {
    const std::size_t n = systems.size();
    const std::size_t first = s.last ? (*s.last + 1) % n : 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (first + k) % n;
      if (!systems[i].is_destination(s.current[i])) return i;
    }
    return std::nullopt;
  };
}

SelectionRule select_if_not_below_prevailing() {
  return [](std::size_t, double value, double prevailing) { return value >= prevailing; };
}

SelectionRule never_select() {
  return [](std::size_t, double, double) { return false; };
}

}  // namespace mpoi
