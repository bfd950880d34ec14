#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpoi/element_set.hpp"

namespace mpoi {

using Edge = std::pair<std::size_t, std::size_t>;

enum class MatroidKind { uniform, partition, graphic };

/// Explicit independence logic for the three matroid families we ship.
class Matroid {
 public:
  static Matroid uniform(std::size_t ground_size, std::size_t k);
  /// part_of[i] is the part of element i; capacities indexed by part.
  static Matroid partition(std::vector<std::size_t> part_of, std::vector<std::size_t> capacities);
  /// One element per edge of a multigraph on `vertices` vertices.
  static Matroid graphic(std::size_t vertices, std::vector<Edge> edges);

  MatroidKind kind() const { return kind_; }
  std::size_t ground_size() const { return ground_size_; }
  bool is_independent(const ElementSet& s) const;
  /// Size of a maximal independent subset of `s` (greedy is exact on matroids).
  std::size_t rank(const ElementSet& s) const;
  std::size_t rank() const { return rank(ElementSet::full(ground_size_)); }

  std::size_t k() const { return k_; }
  const std::vector<std::size_t>& part_of() const { return part_of_; }
  const std::vector<std::size_t>& capacities() const { return capacities_; }
  std::size_t vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::string describe() const;

 private:
  Matroid() = default;

  MatroidKind kind_ = MatroidKind::uniform;
  std::size_t ground_size_ = 0;
  std::size_t k_ = 0;
  std::vector<std::size_t> part_of_;
  std::vector<std::size_t> capacities_;
  std::size_t vertices_ = 0;
  std::vector<Edge> edges_;
};

enum class PackingKind { uniform_matroid, partition_matroid, graphic_matroid, matching, k_system };

std::string_view to_string(PackingKind kind);

/// Downward-closed family over elements 0..n-1.
class PackingOracle {
 public:
  static PackingOracle matroid(Matroid m);
  static PackingOracle matching(std::size_t vertices, std::vector<Edge> edges);
  /// Intersection of matroids over a common ground set.
  static PackingOracle k_system(std::vector<Matroid> matroids);

  PackingKind kind() const { return kind_; }
  std::size_t ground_size() const { return ground_size_; }
  bool is_matroid() const { return matroids_.size() == 1 && kind_ != PackingKind::k_system; }
  /// The underlying matroid; only valid when is_matroid().
  const Matroid& as_matroid() const { return matroids_.front(); }
  const std::vector<Matroid>& matroids() const { return matroids_; }
  std::size_t vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool is_feasible(const ElementSet& s) const;
  /// Throws InfeasibleBase when `s` itself is infeasible.
  bool can_extend(const ElementSet& s, std::size_t element) const;
  std::size_t max_feasible_size() const;

  std::string describe() const;

 private:
  PackingOracle() = default;

  PackingKind kind_ = PackingKind::uniform_matroid;
  std::size_t ground_size_ = 0;
  std::vector<Matroid> matroids_;
  std::size_t vertices_ = 0;
  std::vector<Edge> edges_;
};

enum class CoveringKind { matroid_base, set_cover };

std::string_view to_string(CoveringKind kind);

/// Upward-closed family over elements 0..n-1.
class CoveringOracle {
 public:
  /// Sets that contain a base of `m`.
  static CoveringOracle matroid_base(Matroid m);
  /// Element i is the set sets[i] over universe items 0..universe-1.
  static CoveringOracle set_cover(std::size_t universe, std::vector<std::vector<std::size_t>> sets);

  CoveringKind kind() const { return kind_; }
  std::size_t ground_size() const { return ground_size_; }
  const Matroid& as_matroid() const { return matroids_.front(); }
  std::size_t universe() const { return universe_; }
  const std::vector<std::vector<std::size_t>>& sets() const { return sets_; }
  /// Largest number of sets containing one universe item.
  std::size_t frequency() const { return frequency_; }

  bool is_feasible(const ElementSet& s) const;
  /// Universe items covered by `element` and not by any member of `s`.
  std::size_t newly_covered(const ElementSet& s, std::size_t element) const;
  /// True when adding `element` raises the matroid rank of `s`.
  bool raises_rank(const ElementSet& s, std::size_t element) const;

  std::string describe() const;

 private:
  CoveringOracle() = default;

  CoveringKind kind_ = CoveringKind::matroid_base;
  std::size_t ground_size_ = 0;
  std::vector<Matroid> matroids_;
  std::size_t universe_ = 0;
  std::vector<std::vector<std::size_t>> sets_;
  std::size_t frequency_ = 0;
};

/// Maximum matching size; augmenting paths when bipartite, exhaustive otherwise.
std::size_t maximum_matching_size(std::size_t vertices, const std::vector<Edge>& edges);

}  // namespace mpoi
