#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "mpoi/constraints.hpp"
#include "mpoi/element_set.hpp"

namespace mpoi {

/// An element added by a frugal algorithm together with the value it was
/// added with. A run's picks, in order, are Y_M.
struct Pick {
  std::size_t element = 0;
  double value = 0.0;
};

struct MarginalContext {
  const ElementSet& selected;
  std::span<const Pick> picks;
};

enum class MarginalKind { additive_packing, matching_greedy, set_cover_ratio, matroid_base_min, custom };
enum class Monotonicity { increasing_in_y, decreasing_in_y };

std::string_view to_string(MarginalKind kind);

/// g(Y_M, i, y).
class MarginalValueFn {
 public:
  using Fn = std::function<double(const MarginalContext&, std::size_t, double)>;

  MarginalValueFn(MarginalKind kind, Monotonicity monotonicity, Fn fn)
      : kind_(kind), monotonicity_(monotonicity), fn_(std::move(fn)) {}

  static MarginalValueFn additive();
  static MarginalValueFn matching_greedy(const PackingOracle& matching);
  static MarginalValueFn set_cover_ratio(const CoveringOracle& cover);
  static MarginalValueFn matroid_base_min(const CoveringOracle& base);

  MarginalKind kind() const { return kind_; }
  Monotonicity monotonicity() const { return monotonicity_; }

  double operator()(const MarginalContext& ctx, std::size_t element, double y) const {
    return fn_(ctx, element, y);
  }

 private:
  MarginalKind kind_;
  Monotonicity monotonicity_;
  Fn fn_;
};

MarginalValueFn default_marginal(const PackingOracle& oracle);
MarginalValueFn default_marginal(const CoveringOracle& oracle);
/// Looks up a marginal function by name ("additive_packing", ...).
MarginalValueFn marginal_by_name(std::string_view name, const PackingOracle* packing,
                                 const CoveringOracle* covering);

struct FrugalResult {
  ElementSet selected;
  std::vector<Pick> picks;
};

/// Feasible argmax of g over i not in M, ties to the lowest id; stops at the
/// first non-positive maximum.
FrugalResult run_frugal_packing(const MarginalValueFn& g, const PackingOracle& oracle,
                                std::span<const double> y);

/// Argmax of g over all i not in M; throws NoProgress if it stops infeasible.
FrugalResult run_frugal_covering(const MarginalValueFn& g, const CoveringOracle& oracle,
                                 std::span<const double> y);

enum class ObjectiveKind { additive, set_cover_h, custom_table };

std::string_view to_string(ObjectiveKind kind);

/// f(I, x) = sum_{i in I} x_i + h(I).
class SemiadditiveObjective {
 public:
  static SemiadditiveObjective additive();
  /// h(I) = 0 when I covers the universe, +infinity otherwise.
  static SemiadditiveObjective set_cover_h(CoveringOracle cover);
  /// h given by mask -> value; missing masks read as 0.
  static SemiadditiveObjective custom_table(std::map<std::uint64_t, double> table);

  ObjectiveKind kind() const { return kind_; }
  double h(const ElementSet& s) const;
  double evaluate(const ElementSet& s, std::span<const double> x) const;

 private:
  SemiadditiveObjective() = default;

  ObjectiveKind kind_ = ObjectiveKind::additive;
  std::vector<CoveringOracle> cover_;
  std::map<std::uint64_t, double> table_;
};

struct BestSubset {
  bool found = false;
  ElementSet set;
  double value = 0.0;
};

inline constexpr std::size_t kMaxExhaustiveElements = 15;

/// max f(I, x) over packing-feasible I contained in `allowed`.
BestSubset best_packing_subset(const PackingOracle& oracle, const SemiadditiveObjective& objective,
                               std::span<const double> x, const ElementSet& allowed);

/// min f(I, x) over covering-feasible I contained in `allowed`; found=false
/// when `allowed` itself is infeasible.
BestSubset best_covering_subset(const CoveringOracle& oracle, const SemiadditiveObjective& objective,
                                std::span<const double> x, const ElementSet& allowed);

}  // namespace mpoi
