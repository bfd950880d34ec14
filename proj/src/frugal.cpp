#include "mpoi/frugal.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mpoi/error.hpp"

namespace mpoi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_values(std::span<const double> y, std::size_t n) {
  if (y.size() != n)
    throw Error(ErrorCode::invalid_argument, "expected " + std::to_string(n) + " values, got " +
                                                 std::to_string(y.size()));
}

}  // namespace

std::string_view to_string(MarginalKind kind) {
  switch (kind) {
    case MarginalKind::additive_packing: return "additive_packing";
    case MarginalKind::matching_greedy: return "matching_greedy";
    case MarginalKind::set_cover_ratio: return "set_cover_ratio";
    case MarginalKind::matroid_base_min: return "matroid_base_min";
    case MarginalKind::custom: return "custom";
  }
  return "unknown";
}

MarginalValueFn MarginalValueFn::additive() {
  return {MarginalKind::additive_packing, Monotonicity::increasing_in_y,
          [](const MarginalContext&, std::size_t, double y) { return y; }};
}

MarginalValueFn MarginalValueFn::matching_greedy(const PackingOracle& matching) {
  if (matching.kind() != PackingKind::matching)
    throw Error(ErrorCode::invalid_argument, "matching_greedy needs a matching constraint");
  auto edges = matching.edges();
  return {MarginalKind::matching_greedy, Monotonicity::increasing_in_y,
          [edges](const MarginalContext& ctx, std::size_t i, double y) {
            for (auto e : ctx.selected.elements()) {
              const auto [a, b] = edges[e];
              if (a == edges[i].first || a == edges[i].second || b == edges[i].first ||
                  b == edges[i].second)
                return -kInf;
            }
            return y;
          }};
}

MarginalValueFn MarginalValueFn::set_cover_ratio(const CoveringOracle& cover) {
  if (cover.kind() != CoveringKind::set_cover)
    throw Error(ErrorCode::invalid_argument, "set_cover_ratio needs a set-cover constraint");
  return {MarginalKind::set_cover_ratio, Monotonicity::decreasing_in_y,
          [cover](const MarginalContext& ctx, std::size_t i, double y) {
            const auto fresh = static_cast<double>(cover.newly_covered(ctx.selected, i));
            if (fresh == 0.0) return 0.0;
            if (y <= 0.0) return kInf;
            return fresh / y;
          }};
}

MarginalValueFn MarginalValueFn::matroid_base_min(const CoveringOracle& base) {
  if (base.kind() != CoveringKind::matroid_base)
    throw Error(ErrorCode::invalid_argument, "matroid_base_min needs a matroid-base constraint");
  // atan2(1, y) is positive and strictly decreasing in y on the whole line,
  // so the argmax is the cheapest rank-raising element (Kruskal order).
  return {MarginalKind::matroid_base_min, Monotonicity::decreasing_in_y,
          [base](const MarginalContext& ctx, std::size_t i, double y) {
            return base.raises_rank(ctx.selected, i) ? std::atan2(1.0, y) : 0.0;
          }};
}

MarginalValueFn default_marginal(const PackingOracle& oracle) {
  if (oracle.kind() == PackingKind::matching) return MarginalValueFn::matching_greedy(oracle);
  return MarginalValueFn::additive();
}

MarginalValueFn default_marginal(const CoveringOracle& oracle) {
  if (oracle.kind() == CoveringKind::set_cover) return MarginalValueFn::set_cover_ratio(oracle);
  return MarginalValueFn::matroid_base_min(oracle);
}

MarginalValueFn marginal_by_name(std::string_view name, const PackingOracle* packing,
                                 const CoveringOracle* covering) {
  if (name == "additive_packing") return MarginalValueFn::additive();
  if (name == "matching_greedy" && packing) return MarginalValueFn::matching_greedy(*packing);
  if (name == "set_cover_ratio" && covering) return MarginalValueFn::set_cover_ratio(*covering);
  if (name == "matroid_base_min" && covering) return MarginalValueFn::matroid_base_min(*covering);
  throw Error(ErrorCode::invalid_argument,
              "marginal function '" + std::string(name) + "' does not fit this constraint");
}

FrugalResult run_frugal_packing(const MarginalValueFn& g, const PackingOracle& oracle,
                                std::span<const double> y) {
  const std::size_t n = oracle.ground_size();
  check_values(y, n);
  FrugalResult out{ElementSet(n), {}};
  while (true) {
    const MarginalContext ctx{out.selected, out.picks};
    double best = -kInf;
    std::size_t chosen = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.selected.contains(i) || !oracle.is_feasible(out.selected.with(i))) continue;
      const double v = g(ctx, i, y[i]);
      if (v > best) {
        best = v;
        chosen = i;
      }
    }
    if (chosen == n || !(best > 0.0)) break;
    out.selected.insert(chosen);
    out.picks.push_back({chosen, y[chosen]});
  }
  return out;
}

FrugalResult run_frugal_covering(const MarginalValueFn& g, const CoveringOracle& oracle,
                                 std::span<const double> y) {
  const std::size_t n = oracle.ground_size();
  check_values(y, n);
  FrugalResult out{ElementSet(n), {}};
  while (true) {
    const MarginalContext ctx{out.selected, out.picks};
    double best = -kInf;
    std::size_t chosen = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.selected.contains(i)) continue;
      const double v = g(ctx, i, y[i]);
      if (v > best) {
        best = v;
        chosen = i;
      }
    }
    if (chosen == n || !(best > 0.0)) break;
    out.selected.insert(chosen);
    out.picks.push_back({chosen, y[chosen]});
  }
  if (!oracle.is_feasible(out.selected))
    throw Error(ErrorCode::no_progress, "covering run stopped at infeasible " +
                                            out.selected.to_string() +
                                            "; the marginal function does not encode feasibility");
  return out;
}

// ---------------------------------------------------------------------------
// Objectives

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::additive: return "additive";
    case ObjectiveKind::set_cover_h: return "set_cover";
    case ObjectiveKind::custom_table: return "custom_table";
  }
  return "unknown";
}

SemiadditiveObjective SemiadditiveObjective::additive() { return {}; }

SemiadditiveObjective SemiadditiveObjective::set_cover_h(CoveringOracle cover) {
  SemiadditiveObjective o;
  o.kind_ = ObjectiveKind::set_cover_h;
  o.cover_.push_back(std::move(cover));
  return o;
}

SemiadditiveObjective SemiadditiveObjective::custom_table(std::map<std::uint64_t, double> table) {
  SemiadditiveObjective o;
  o.kind_ = ObjectiveKind::custom_table;
  o.table_ = std::move(table);
  return o;
}

double SemiadditiveObjective::h(const ElementSet& s) const {
  switch (kind_) {
    case ObjectiveKind::additive:
      return 0.0;
    case ObjectiveKind::set_cover_h:
      return cover_.front().is_feasible(s) ? 0.0 : kInf;
    case ObjectiveKind::custom_table: {
      auto it = table_.find(s.mask());
      return it == table_.end() ? 0.0 : it->second;
    }
  }
  return 0.0;
}

double SemiadditiveObjective::evaluate(const ElementSet& s, std::span<const double> x) const {
  double total = 0.0;
  for (auto e : s.elements()) {
    if (e >= x.size()) throw Error(ErrorCode::invalid_argument, "value missing for element");
    total += x[e];
  }
  return total + h(s);
}

// ---------------------------------------------------------------------------
// Exhaustive optima

namespace {

template <class Feasible, class Better>
BestSubset exhaustive(std::size_t n, const SemiadditiveObjective& objective,
                      std::span<const double> x, const ElementSet& allowed, Feasible feasible,
                      Better better) {
  const auto members = allowed.elements();
  if (members.size() > kMaxExhaustiveElements)
    throw Error(ErrorCode::too_large_for_exact,
                std::to_string(members.size()) + " candidate elements exceed the exhaustive limit");
  BestSubset best;
  best.set = ElementSet(n);
  const std::uint64_t limit = std::uint64_t{1} << members.size();
  for (std::uint64_t m = 0; m < limit; ++m) {
    ElementSet s(n);
    for (std::size_t k = 0; k < members.size(); ++k)
      if ((m >> k) & 1U) s.insert(members[k]);
    if (!feasible(s)) continue;
    const double v = objective.evaluate(s, x);
    if (!best.found || better(v, best.value)) {
      best.found = true;
      best.set = s;
      best.value = v;
    }
  }
  return best;
}

}  // namespace

BestSubset best_packing_subset(const PackingOracle& oracle, const SemiadditiveObjective& objective,
                               std::span<const double> x, const ElementSet& allowed) {
  return exhaustive(
      oracle.ground_size(), objective, x, allowed,
      [&](const ElementSet& s) { return oracle.is_feasible(s); },
      [](double a, double b) { return a > b; });
}

BestSubset best_covering_subset(const CoveringOracle& oracle, const SemiadditiveObjective& objective,
                                std::span<const double> x, const ElementSet& allowed) {
  if (!oracle.is_feasible(allowed)) {
    BestSubset none;
    none.set = ElementSet(oracle.ground_size());
    return none;
  }
  return exhaustive(
      oracle.ground_size(), objective, x, allowed,
      [&](const ElementSet& s) { return oracle.is_feasible(s); },
      [](double a, double b) { return a < b; });
}

}  // namespace mpoi
