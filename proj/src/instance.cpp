#include "mpoi/instance.hpp"

#include <algorithm>

#include "mpoi/error.hpp"

namespace mpoi {

std::string_view to_string(Sense sense) { return sense == Sense::utimax ? "utimax" : "dismin"; }

namespace {

void check_arity(std::size_t systems, std::size_t ground) {
  if (systems != ground)
    throw Error(ErrorCode::validation_error,
                std::to_string(systems) + " systems but the constraint has " +
                    std::to_string(ground) + " elements");
}

void check_marginal(const MarginalValueFn& g, Monotonicity expected) {
  if (g.monotonicity() != expected)
    throw Error(ErrorCode::invalid_argument,
                std::string(to_string(g.kind())) + " has the wrong monotonicity for this sense");
}

}  // namespace

Instance Instance::packing(std::vector<MarkovSystem> systems, PackingOracle oracle,
                           SemiadditiveObjective objective, std::optional<MarginalValueFn> marginal) {
  check_arity(systems.size(), oracle.ground_size());
  MarginalValueFn g = marginal ? *marginal : default_marginal(oracle);
  check_marginal(g, Monotonicity::increasing_in_y);
  Instance inst(std::move(systems), std::move(objective), std::move(g));
  inst.sense_ = Sense::utimax;
  inst.packing_.push_back(std::move(oracle));
  return inst;
}

Instance Instance::covering(std::vector<MarkovSystem> systems, CoveringOracle oracle,
                            SemiadditiveObjective objective, std::optional<MarginalValueFn> marginal) {
  check_arity(systems.size(), oracle.ground_size());
  MarginalValueFn g = marginal ? *marginal : default_marginal(oracle);
  check_marginal(g, Monotonicity::decreasing_in_y);
  Instance inst(std::move(systems), std::move(objective), std::move(g));
  inst.sense_ = Sense::dismin;
  inst.covering_.push_back(std::move(oracle));
  return inst;
}

const PackingOracle& Instance::packing() const {
  if (packing_.empty()) throw Error(ErrorCode::invalid_argument, "instance has a covering constraint");
  return packing_.front();
}

const CoveringOracle& Instance::covering() const {
  if (covering_.empty()) throw Error(ErrorCode::invalid_argument, "instance has a packing constraint");
  return covering_.front();
}

bool Instance::is_feasible(const ElementSet& s) const {
  return sense_ == Sense::utimax ? packing().is_feasible(s) : covering().is_feasible(s);
}

double Instance::score(const ElementSet& selected, std::span<const double> values,
                       double total_price) const {
  const double f = objective_.evaluate(selected, values);
  return sense_ == Sense::utimax ? f - total_price : f + total_price;
}

BestSubset Instance::best_selection(std::span<const double> values, const ElementSet& prepared) const {
  if (sense_ == Sense::utimax) return best_packing_subset(packing(), objective_, values, prepared);
  return best_covering_subset(covering(), objective_, values, prepared);
}

FrugalResult Instance::frugal(std::span<const double> proxies) const {
  if (sense_ == Sense::utimax) return run_frugal_packing(marginal_, packing(), proxies);
  return run_frugal_covering(marginal_, covering(), proxies);
}

bool Instance::all_dag() const {
  return std::all_of(systems_.begin(), systems_.end(),
                     [](const MarkovSystem& ms) { return classify(ms).is_dag; });
}

std::size_t Instance::max_depth() const {
  std::size_t d = 0;
  for (const auto& ms : systems_) d = std::max(d, classify(ms).depth.value_or(0));
  return d;
}

std::vector<GradeTable> decision_grades(const Instance& inst, const GradeOptions& opts) {
  std::vector<GradeTable> out;
  out.reserve(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& ms = inst.system(i);
    out.push_back(inst.sense() == Sense::utimax ? grade_table(ms, i, opts)
                                                : grade_table(ms.with_values_negated(), i, opts));
  }
  return out;
}

std::vector<double> prevailing_proxies(const Instance& inst, const std::vector<GradeTable>& grades,
                                       const TrajectoryProfile& profile) {
  if (profile.size() != inst.size())
    throw Error(ErrorCode::system_mismatch, "profile size differs from the instance");
  std::vector<double> y(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i)
    y[i] = proxy_from_grade(inst.sense(), prevailing_cost(grades[i], profile[i]).prevailing);
  return y;
}

}  // namespace mpoi
