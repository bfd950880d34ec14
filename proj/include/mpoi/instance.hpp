#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mpoi/constraints.hpp"
#include "mpoi/frugal.hpp"
#include "mpoi/grade.hpp"
#include "mpoi/markov_system.hpp"

namespace mpoi {

enum class Sense { utimax, dismin };

std::string_view to_string(Sense sense);

/// One MPOI game: a Markov system per ground element, the constraint family,
/// the semiadditive objective and the marginal function of the frugal
/// algorithm that drives adaptive play.
///
/// UtiMax scores are objective minus prices (maximized); DisMin scores are
/// objective plus prices (minimized). Destination values are rewards in the
/// first case and costs in the second.
class Instance {
 public:
  static Instance packing(std::vector<MarkovSystem> systems, PackingOracle oracle,
                          SemiadditiveObjective objective = SemiadditiveObjective::additive(),
                          std::optional<MarginalValueFn> marginal = std::nullopt);
  static Instance covering(std::vector<MarkovSystem> systems, CoveringOracle oracle,
                           SemiadditiveObjective objective = SemiadditiveObjective::additive(),
                           std::optional<MarginalValueFn> marginal = std::nullopt);

  Sense sense() const { return sense_; }
  std::size_t size() const { return systems_.size(); }
  const std::vector<MarkovSystem>& systems() const { return systems_; }
  const MarkovSystem& system(std::size_t i) const { return systems_[i]; }
  /// Throws invalid_argument when the instance is of the other sense.
  const PackingOracle& packing() const;
  const CoveringOracle& covering() const;
  const SemiadditiveObjective& objective() const { return objective_; }
  const MarginalValueFn& marginal() const { return marginal_; }

  bool is_feasible(const ElementSet& s) const;
  /// Score of a finished game in its own sign convention.
  double score(const ElementSet& selected, std::span<const double> values, double total_price) const;
  /// True when score a is strictly preferable to b.
  bool better(double a, double b) const { return sense_ == Sense::utimax ? a > b : a < b; }

  /// The best final selection among prepared elements with the given values.
  BestSubset best_selection(std::span<const double> values, const ElementSet& prepared) const;
  /// The frugal algorithm on proxy values.
  FrugalResult frugal(std::span<const double> proxies) const;

  bool all_dag() const;
  /// Max depth over DAG systems (0 if none).
  std::size_t max_depth() const;

 private:
  Instance(std::vector<MarkovSystem> systems, SemiadditiveObjective objective,
           MarginalValueFn marginal)
      : systems_(std::move(systems)), objective_(std::move(objective)), marginal_(std::move(marginal)) {}

  Sense sense_ = Sense::utimax;
  std::vector<MarkovSystem> systems_;
  std::vector<PackingOracle> packing_;
  std::vector<CoveringOracle> covering_;
  SemiadditiveObjective objective_;
  MarginalValueFn marginal_;
};

/// Grades that drive decisions: the systems' own grades for UtiMax, grades
/// of the value-negated systems for DisMin.
std::vector<GradeTable> decision_grades(const Instance& inst, const GradeOptions& opts = {});

/// Proxy value handed to g for a state whose decision grade is `grade`:
/// tau for UtiMax, -tau for DisMin.
inline double proxy_from_grade(Sense sense, double grade) {
  return sense == Sense::utimax ? grade : -grade;
}

/// Per-element prevailing proxies of a (possibly partial) profile: the
/// prevailing cost for UtiMax, the prevailing reward for DisMin.
std::vector<double> prevailing_proxies(const Instance& inst, const std::vector<GradeTable>& grades,
                                       const TrajectoryProfile& profile);

}  // namespace mpoi
