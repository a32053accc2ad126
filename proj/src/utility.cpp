#include "routelogit/utility.hpp"

#include <cmath>
#include <string>

#include "routelogit/error.hpp"

namespace routelogit {

AttributeFn travel_time_attribute() {
  return [](const StdNetwork& net, const SupportPointSet& spp, LinkId a,
            const State& s) {
    return std::vector<double>{
        static_cast<double>(travel_time(net, spp, a, s))};
  };
}

AttributeFn travel_time_and_constant_attributes() {
  return [](const StdNetwork& net, const SupportPointSet& spp, LinkId a,
            const State& s) {
    return std::vector<double>{
        static_cast<double>(travel_time(net, spp, a, s)), 1.0};
  };
}

void LinkUtilitySpec::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw ValidationError("scale parameter mu must be > 0");
  if (beta.empty()) throw ValidationError("beta must not be empty");
  for (double b : beta)
    if (!std::isfinite(b)) throw ValidationError("beta must be finite");
  if (!attributes) throw ValidationError("attribute extractor is not set");
}

double dot(std::span<const double> beta, std::span<const double> attrs) {
  if (beta.size() != attrs.size())
    throw ValidationError("beta has " + std::to_string(beta.size()) +
                          " entries but attributes have " +
                          std::to_string(attrs.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) s += beta[i] * attrs[i];
  return s;
}

double LinkUtilitySpec::utility(std::span<const double> attrs) const {
  return dot(beta, attrs);
}

double LinkUtilitySpec::utility(const StdNetwork& net,
                                const SupportPointSet& spp, LinkId a,
                                const State& s) const {
  return dot(beta, attributes(net, spp, a, s));
}

}  // namespace routelogit
