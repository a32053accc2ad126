#pragma once

#include <functional>
#include <span>
#include <vector>

#include "routelogit/network.hpp"

namespace routelogit {

/// Attribute vector of taking link a from a state. Must return the same
/// length for every call.
using AttributeFn = std::function<std::vector<double>(
    const StdNetwork&, const SupportPointSet&, LinkId, const State&)>;

/// Single attribute: the travel time of the link under the state's
/// information.
AttributeFn travel_time_attribute();

/// Travel time plus a constant 1 (link count); used for translation checks
/// and alternative-specific constants.
AttributeFn travel_time_and_constant_attributes();

/// Deterministic link utility omega(a | k, t, EV) = beta . attributes and the
/// logit scale mu.
struct LinkUtilitySpec {
  std::vector<double> beta{-1.0};
  double mu = 1.0;
  AttributeFn attributes = travel_time_attribute();

  void validate() const;
  double utility(std::span<const double> attrs) const;
  double utility(const StdNetwork& net, const SupportPointSet& spp, LinkId a,
                 const State& s) const;
};

double dot(std::span<const double> beta, std::span<const double> attrs);

}  // namespace routelogit
