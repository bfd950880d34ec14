#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpoi/constraints.hpp"
#include "mpoi/markov_system.hpp"
#include "mpoi/random.hpp"
#include "mpoi/simplex.hpp"

namespace mpoi {

enum class RowGroup { start, flow, selection, play_bound, polytope };

std::string_view to_string(RowGroup group);

/// The occupancy relaxation: y (reach), z (play, or select at destinations)
/// for every state and x (selection) per system, with the packing polytope
/// on x.
struct CommitmentLp {
  LinearProgram program;
  std::vector<std::vector<std::size_t>> y;  // variable index per system, per state
  std::vector<std::vector<std::size_t>> z;
  std::vector<std::size_t> x;
  std::vector<RowGroup> row_groups;

  std::size_t rows_in(RowGroup group) const;
};

/// Supports uniform and partition matroids; anything else is UnsupportedPolytope.
CommitmentLp build_lp(const std::vector<MarkovSystem>& systems, const PackingOracle& polytope);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> z;
  std::vector<double> x;
  double objective_value = 0.0;
};

/// Throws Infeasible / Unbounded for the corresponding simplex outcomes.
LpSolution solve_lp(const CommitmentLp& lp, double tol = 1e-9);

/// sum_i (sum_{t} r^t z^t - sum_{u not in T} pi^u z^u).
double lp_objective(const std::vector<MarkovSystem>& systems, const LpSolution& sol);
/// Largest violation of any LP row by `sol`.
double lp_violation(const CommitmentLp& lp, const LpSolution& sol);

bool lp_upper_bound_check(const std::vector<MarkovSystem>& systems, const PackingOracle& polytope,
                          double dp_opt);

enum class OcrsKind { rank1_exact_half, matroid_greedy_calibrated };

std::string_view to_string(OcrsKind kind);

/// Online contention resolution for a fixed point x and arrival order.
class OcrsScheme {
 public:
  /// q_i = 1/2 / (1 - 1/2 sum_{j before i} x_j). With `part_of` the scheme
  /// runs independently inside every part (unit-capacity partition matroid).
  static OcrsScheme rank1(std::span<const double> x, std::span<const std::size_t> order,
                          std::span<const std::size_t> part_of = {});
  /// Accepts an arriving element w.p. `acceptance` whenever it keeps the
  /// selection independent. Selectability is measured, not guaranteed.
  static OcrsScheme greedy_calibrated(const Matroid& m, std::span<const double> x,
                                      std::span<const std::size_t> order, double acceptance = 0.5);
  /// rank1 when every capacity is one, greedy_calibrated otherwise.
  static OcrsScheme for_polytope(const PackingOracle& polytope, std::span<const double> x,
                                 std::span<const std::size_t> order);

  OcrsKind kind() const { return kind_; }
  const std::vector<double>& q() const { return q_; }
  const std::vector<std::size_t>& order() const { return order_; }

  /// Would element i be kept if it turned out active, given the elements
  /// selected so far? Consumes one draw from `rng`.
  bool would_select(std::size_t i, const ElementSet& selected, RandomStream& rng) const;

 private:
  OcrsScheme() = default;

  OcrsKind kind_ = OcrsKind::rank1_exact_half;
  std::vector<double> q_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> part_of_;
  std::vector<Matroid> matroid_;
};

struct CommitmentEvent {
  std::size_t element = 0;
  enum class Kind { skip, advance, abandon, select, reject } kind = Kind::skip;
  StateId state;
};

struct CommitmentOutcome {
  double utility = 0.0;
  double total_price = 0.0;
  ElementSet selected;
  std::vector<bool> green_light;  // OCRS said it would keep the element
  std::vector<bool> active;       // element reached a destination and passed its coin
  std::vector<CommitmentEvent> trace;
};

/// One pass over the arrival order with independent per-element streams and one OCRS stream.
CommitmentOutcome run_commitment(const std::vector<MarkovSystem>& systems, const LpSolution& lp,
                                 const OcrsScheme& ocrs, std::uint64_t seed);

/// Element ids in a uniformly random order drawn from `seed`.
std::vector<std::size_t> random_order(std::size_t n, std::uint64_t seed);
std::vector<std::size_t> identity_order(std::size_t n);

}  // namespace mpoi
