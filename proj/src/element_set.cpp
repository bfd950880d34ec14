#include "mpoi/element_set.hpp"

#include "mpoi/error.hpp"

namespace mpoi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::validation_error: return "ValidationError";
    case ErrorCode::step_from_destination: return "StepFromDestination";
    case ErrorCode::non_terminating: return "NonTerminating";
    case ErrorCode::iteration_limit: return "IterationLimit";
    case ErrorCode::system_mismatch: return "SystemMismatch";
    case ErrorCode::no_root: return "NoRoot";
    case ErrorCode::infeasible_base: return "InfeasibleBase";
    case ErrorCode::no_progress: return "NoProgress";
    case ErrorCode::profile_exhausted: return "ProfileExhausted";
    case ErrorCode::not_dag: return "NotDag";
    case ErrorCode::epoch_violation: return "EpochViolation";
    case ErrorCode::too_large_for_exact: return "TooLargeForExact";
    case ErrorCode::unsupported_polytope: return "UnsupportedPolytope";
    case ErrorCode::lp_infeasible: return "Infeasible";
    case ErrorCode::lp_unbounded: return "Unbounded";
    case ErrorCode::outside_polytope: return "OutsidePolytope";
    case ErrorCode::division_degenerate: return "DivisionDegenerate";
    case ErrorCode::state_space_too_large: return "StateSpaceTooLarge";
    case ErrorCode::undefined_action: return "UndefinedAction";
    case ErrorCode::too_many_profiles: return "TooManyProfiles";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io_error: return "IoError";
  }
  return "UnknownError";
}

ElementSet::ElementSet(std::size_t ground_size, std::initializer_list<std::size_t> members)
    : bits_(ground_size, false) {
  for (auto e : members) insert(e);
}

ElementSet ElementSet::from_mask(std::size_t ground_size, std::uint64_t mask) {
  if (ground_size > 64) throw Error(ErrorCode::invalid_argument, "mask needs ground size <= 64");
  ElementSet s(ground_size);
  for (std::size_t i = 0; i < ground_size; ++i)
    if ((mask >> i) & 1U) s.insert(i);
  return s;
}

ElementSet ElementSet::full(std::size_t ground_size) {
  ElementSet s(ground_size);
  for (std::size_t i = 0; i < ground_size; ++i) s.insert(i);
  return s;
}

bool ElementSet::contains(std::size_t element) const {
  return element < bits_.size() && bits_[element];
}

void ElementSet::insert(std::size_t element) {
  if (element >= bits_.size())
    throw Error(ErrorCode::invalid_argument,
                "element " + std::to_string(element) + " outside ground set");
  if (!bits_[element]) {
    bits_[element] = true;
    ++count_;
  }
}

void ElementSet::erase(std::size_t element) {
  if (contains(element)) {
    bits_[element] = false;
    --count_;
  }
}

ElementSet ElementSet::with(std::size_t element) const {
  ElementSet s = *this;
  s.insert(element);
  return s;
}

std::vector<std::size_t> ElementSet::elements() const {
  std::vector<std::size_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

std::uint64_t ElementSet::mask() const {
  if (bits_.size() > 64) throw Error(ErrorCode::invalid_argument, "mask needs ground size <= 64");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) m |= (std::uint64_t{1} << i);
  return m;
}

std::string ElementSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (!bits_[i]) continue;
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  out += '}';
  return out;
}

}  // namespace mpoi
