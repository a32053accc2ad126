/**
 * @file comparison.hpp
 * @brief Two-route parametric comparison of the recursive and non-recursive
 *        models, and the deterministic / small-mu equivalence checks.
 *
 * The two-route network has the shape of the three-node example: a dummy
 * origin link, a common link 1 into node b, and parallel links 2 and 3 into
 * the destination. The traveler reaches b in one of two states (probability
 * p and 1-p). Link 2 takes a or b, link 3 takes a+x or b+y.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "routelogit/network.hpp"
#include "routelogit/utility.hpp"

namespace routelogit {

struct TwoRouteScenario {
  double a = 1.0;
  double b = 1.0;
  double x = 0.0;
  double y = 0.0;
  double p = 0.5;

  /// Throws ValidationError unless a>0, b>0, x>-a, y>-b, 0<p<1.
  void validate() const;
};

struct TwoRouteNetwork {
  StdNetwork network;
  SupportPointSet support_points;
  State initial;
  /// Integer times are the scenario times multiplied by this factor; use
  /// beta = -1 / time_scale to recover unit-cost utilities.
  int time_scale = 1;
};

/// Builds the network with integer times. Non-integer scenarios are scaled
/// by the smallest common denominator up to max_denominator; ValidationError
/// if none is found.
TwoRouteNetwork build_two_route_network(const TwoRouteScenario& s,
                                        int max_denominator = 1'000'000);

/// P(link 2) / P(link 3) in state 1, in state 2, and unconditionally.
struct Ratios {
  double state1 = 0.0;
  double state2 = 0.0;
  double marginal = 0.0;
};

struct RatioTable {
  Ratios recursive;
  Ratios nonrecursive;
};

/// Closed forms with beta = -1, mu = 1.
RatioTable closed_form_ratios(const TwoRouteScenario& s);
/// Same ratios through the network models (state graph, value function,
/// enumerated policies).
RatioTable pipeline_ratios(const TwoRouteScenario& s);

struct RatioComparison {
  RatioTable closed_form;
  RatioTable pipeline;
  /// max over the six entries of |closed - pipeline| / max(1, |closed|).
  double max_relative_difference = 0.0;
};

RatioComparison ratio_table(const TwoRouteScenario& s);

enum class Dominance { equal, route2_dominant, route3_dominant, nondominated };

/// Sign pattern of (x, y). A zero offset with a nonzero partner counts as weak
/// dominance by the faster route.
Dominance dominance_class(const TwoRouteScenario& s);
std::string to_string(Dominance d);

enum class Extremeness { recursive_more_extreme, nonrecursive_more_extreme, equal };

/// |P(link 2) - P(link 3)| for a ratio r = P(link 2) / P(link 3).
double margin_from_ratio(double r);

/// Compares the marginal margins of the closed-form ratio table. Margins
/// within `tolerance` are equal.
Extremeness extremeness_check(const TwoRouteScenario& s, double tolerance = 1e-12);
Extremeness extremeness_check(const RatioTable& t, double tolerance = 1e-12);
std::string to_string(Extremeness e);

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  double at(int i) const;
};

struct SweepGrid {
  double a = 1.0;
  double b = 1.0;
  GridAxis x;
  GridAxis y;
  GridAxis p;

  std::size_t size() const;
  /// Scenarios in (x, y, p) row-major order, p fastest.
  TwoRouteScenario scenario(std::size_t i) const;
};

struct SweepRow {
  TwoRouteScenario scenario;
  RatioComparison ratios;
  Dominance dominance = Dominance::equal;
  Extremeness extremeness = Extremeness::equal;
  double recursive_margin = 0.0;
  double nonrecursive_margin = 0.0;
};

SweepRow evaluate_scenario(const TwoRouteScenario& s);
/// Single-threaded reference for sweep.
std::vector<SweepRow> sweep_serial(const SweepGrid& grid);
/// OpenMP over scenarios; same rows in the same order as sweep_serial.
std::vector<SweepRow> sweep(const SweepGrid& grid);

struct DivergencePoint {
  double mu = 0.0;
  /// max over sequences of |P_recursive(seq) - P_nonrecursive(seq)|.
  double max_divergence = 0.0;
};

struct EquivalenceReport {
  std::size_t support_points = 0;
  /// Max per-path divergence at the given utility; only when R == 1.
  std::optional<double> deterministic_divergence;
  bool deterministic_equal = false;
  std::vector<DivergencePoint> divergence;
  /// Divergence never grows from one mu to the next smaller one.
  bool monotone = false;
};

inline const std::vector<double> kEquivalenceMus{1.0, 0.1, 0.01, 1e-4};

/// Equivalence checks on an arbitrary network from its origin state. The
/// utility's mu is used for the deterministic check; beta and attributes are
/// reused across the mu sweep.
EquivalenceReport equivalence_report(const StdNetwork& net,
                                     const SupportPointSet& spp,
                                     const LinkUtilitySpec& utility,
                                     const std::vector<double>& mus = kEquivalenceMus,
                                     double tolerance = 1e-10);

}  // namespace routelogit
