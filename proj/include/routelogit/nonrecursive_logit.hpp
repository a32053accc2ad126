/**
 * @file nonrecursive_logit.hpp
 * @brief Logit over routing policies at the origin, executed deterministically
 *        en route.
 *
 * P(policy) = softmax over the choice set of V_policy / mu, where V_policy is
 * the policy's expected utility. A sequence is observed with probability
 * sum_policy P(policy) * Delta(seq | policy) * Pr(EV_I | EV_0).
 */
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "routelogit/policy.hpp"
#include "routelogit/recursive_logit.hpp"
#include "routelogit/sequence.hpp"
#include "routelogit/state_graph.hpp"
#include "routelogit/utility.hpp"

namespace routelogit {

class NonRecursiveLogit {
 public:
  /// Keeps references to net and spp.
  NonRecursiveLogit(const StdNetwork& net, const SupportPointSet& spp,
                    PolicyChoiceSet choice_set, LinkUtilitySpec utility);

  const PolicyChoiceSet& choice_set() const { return choice_set_; }
  const LinkUtilitySpec& utility() const { return utility_; }
  const StateGraph& graph() const { return *graph_; }

  std::span<const double> policy_utilities() const { return utilities_; }
  /// Expected attribute vector of each policy; utilities are beta . these.
  const std::vector<std::vector<double>>& policy_attributes() const {
    return attributes_;
  }
  std::span<const double> policy_probabilities() const { return probabilities_; }
  std::span<const double> policy_log_probabilities() const { return log_probabilities_; }

  /// Throws ValidationError if the policy is not in the choice set.
  double policy_choice_prob(const RoutingPolicy& policy) const;
  double sequence_likelihood(const StateSequence& seq) const;
  double sequence_log_likelihood(const StateSequence& seq) const;

  std::vector<SequenceProbability> sequence_probabilities(
      std::uint64_t cap = kDefaultEnumerationCap) const;
  std::vector<PathProbability> path_probabilities(
      std::uint64_t cap = kDefaultEnumerationCap) const;

  StateSequence sample_sequence(std::uint64_t seed) const;

 private:
  const StdNetwork* net_;
  const SupportPointSet* spp_;
  PolicyChoiceSet choice_set_;
  LinkUtilitySpec utility_;
  std::shared_ptr<const StateGraph> graph_;
  std::vector<std::vector<double>> attributes_;
  std::vector<double> utilities_;
  std::vector<double> probabilities_;
  std::vector<double> log_probabilities_;
};

/// Choice set enumerated exhaustively from `initial`.
NonRecursiveLogit make_nonrecursive_logit(const StdNetwork& net,
                                          const SupportPointSet& spp,
                                          const LinkUtilitySpec& utility,
                                          const State& initial,
                                          std::uint64_t max_policies = 1'000'000);

/// Policy logit probabilities for precomputed policy utilities.
std::vector<double> policy_logit(std::span<const double> utilities, double mu);

double policy_choice_prob(const NonRecursiveLogit& model,
                          const RoutingPolicy& policy);

/// Delta(seq | policy) * Pr(EV_I | EV_0).
double sequence_prob_given_policy(const StateSequence& seq,
                                  const RoutingPolicy& policy,
                                  const SupportPointSet& spp);

double sequence_likelihood_nr(const StateSequence& seq,
                              const NonRecursiveLogit& model);

StateSequence sample_sequence_nr(const NonRecursiveLogit& model,
                                 std::uint64_t seed);

}  // namespace routelogit
