#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "routelogit/network.hpp"
#include "routelogit/sequence.hpp"
#include "routelogit/utility.hpp"

namespace routelogit {

/// Adaptive routing policy: next link for every state reachable from the
/// initial state under the policy's own decisions.
class RoutingPolicy {
 public:
  RoutingPolicy(State initial, std::map<State, LinkId> decisions)
      : initial_(std::move(initial)), decisions_(std::move(decisions)) {}

  const State& initial_state() const { return initial_; }
  const std::map<State, LinkId>& decisions() const { return decisions_; }
  std::optional<LinkId> decision(const State& s) const;

  bool operator==(const RoutingPolicy&) const = default;

 private:
  State initial_;
  std::map<State, LinkId> decisions_;
};

struct PolicyChoiceSet {
  State initial_state;
  std::vector<RoutingPolicy> policies;
};

/// Throws ValidationError if a decision is not in A(k), a reachable state has
/// no decision, a leaf is not at the destination, or the map holds states the
/// policy never reaches.
void validate_policy(const StdNetwork& net, const SupportPointSet& spp,
                     const RoutingPolicy& policy);

/// Number of distinct policies from `initial` (saturating).
std::uint64_t count_policies(const StdNetwork& net, const SupportPointSet& spp,
                             const State& initial);

/// All policies, ordered lexicographically by decisions along the state tree
/// (earlier successor states and lower link ids first). Throws
/// CapExceededError above max_policies.
PolicyChoiceSet enumerate_policies(const StdNetwork& net,
                                   const SupportPointSet& spp,
                                   const State& initial,
                                   std::uint64_t max_policies = 1'000'000);

/// Sequences the policy can produce, each with its probability
/// Pr(EV_I | EV_0); probabilities sum to 1.
std::vector<SequenceProbability> policy_outcomes(const StdNetwork& net,
                                                 const SupportPointSet& spp,
                                                 const RoutingPolicy& policy);

/// Expected accumulated link utility over the policy's state tree.
double policy_expected_utility(const StdNetwork& net,
                               const SupportPointSet& spp,
                               const RoutingPolicy& policy,
                               const LinkUtilitySpec& utility);

/// Expected accumulated attribute vector; utility is beta . this.
std::vector<double> policy_expected_attributes(const StdNetwork& net,
                                               const SupportPointSet& spp,
                                               const RoutingPolicy& policy,
                                               const AttributeFn& attributes);

/// Delta(seq | policy): the policy maps every decision state of seq to the
/// next observed link.
bool contains(const RoutingPolicy& policy, const StateSequence& seq);

struct OptimalPolicy {
  RoutingPolicy policy;
  std::map<State, double> values;  // max-utility-to-go at every reachable state
  double initial_value = 0.0;
};

/// Backward induction with max in place of log-sum; ties go to the lowest
/// next-link identifier.
OptimalPolicy optimal_policy(const StdNetwork& net, const SupportPointSet& spp,
                             const State& initial,
                             const LinkUtilitySpec& utility);

}  // namespace routelogit
