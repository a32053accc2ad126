/**
 * @file recursive_logit.hpp
 * @brief Recursive logit over the STD state space.
 *
 * At each state the traveler picks the next link by a logit over
 *   q(a) = omega(a | k, t, EV) + sum_{EV'} V(a, t', EV') Pr(EV' | EV)
 * and the value function is the log-sum V = mu * ln sum_a exp(q(a) / mu),
 * with V = 0 on destination links. The state space is acyclic in time, so
 * the Bellman system is solved exactly by one backward sweep.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "routelogit/network.hpp"
#include "routelogit/sequence.hpp"
#include "routelogit/state_graph.hpp"
#include "routelogit/utility.hpp"

namespace routelogit {

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

class ValueFunction {
 public:
  ValueFunction(std::shared_ptr<const StateGraph> graph, LinkUtilitySpec utility);

  const StateGraph& graph() const { return *graph_; }
  std::shared_ptr<const StateGraph> shared_graph() const { return graph_; }
  const LinkUtilitySpec& utility() const { return utility_; }

  /// V at a solved state; throws ValidationError for states outside the
  /// explored space. Destination states are 0; dead ends are -inf.
  double value(const State& s) const;
  double value_at(std::size_t node) const { return values_[node]; }
  std::span<const double> values() const { return values_; }

  /// q(a) for the t-th transition of a node.
  double action_value(std::size_t node, std::size_t t) const {
    return q_[offsets_[node] + t];
  }
  double link_utility(std::size_t node, std::size_t t) const {
    return omega_[offsets_[node] + t];
  }
  /// exp((q - V) / mu); 0 for links that cannot reach the destination.
  double choice_prob(std::size_t node, std::size_t t) const;
  double log_choice_prob(std::size_t node, std::size_t t) const;

 private:
  std::shared_ptr<const StateGraph> graph_;
  LinkUtilitySpec utility_;
  std::vector<double> values_;
  std::vector<std::size_t> offsets_;
  std::vector<double> omega_;
  std::vector<double> q_;
  std::vector<double> q_max_;     // max_a q(a) per node
  std::vector<double> log_norm_;  // ln sum_a exp((q(a) - q_max) / mu)
};

ValueFunction solve_value_functions(const StdNetwork& net,
                                    const SupportPointSet& spp,
                                    const LinkUtilitySpec& utility,
                                    const State& initial);
/// Re-solves on an existing state space (e.g. for a new beta).
ValueFunction solve_value_functions(std::shared_ptr<const StateGraph> graph,
                                    const LinkUtilitySpec& utility);

double link_choice_prob(const ValueFunction& vf, const State& s, LinkId a);

/// Product over steps of P(k_{i+1} | state_i) * Pr(EV_{i+1} | EV_i), with the
/// link probability evaluated as an explicit softmax over A(k_i).
double sequence_likelihood(const ValueFunction& vf, const StdNetwork& net,
                           const SupportPointSet& spp, const StateSequence& seq);
/// Same likelihood written with the value function in the denominator,
/// exp((q(k_{i+1}) - V(k_i,t_i,EV_i)) / mu) * Pr(EV_{i+1} | EV_i).
double sequence_likelihood_value_form(const ValueFunction& vf,
                                      const StateSequence& seq);
double sequence_log_likelihood(const ValueFunction& vf,
                               const StateSequence& seq);
/// ln P of a sequence already located in vf's state graph.
double path_log_likelihood(const ValueFunction& vf, const GraphPath& path);

/// Every sequence from the solved initial state with its probability, in
/// sequence-index order.
std::vector<SequenceProbability> sequence_probabilities(
    const ValueFunction& vf, std::uint64_t cap = kDefaultEnumerationCap);

std::vector<PathProbability> path_probabilities(
    const ValueFunction& vf, const StdNetwork& net, const SupportPointSet& spp,
    std::uint64_t cap = kDefaultEnumerationCap);

/// Alternately samples a link and a successor event collection until the
/// destination. Reproducible for a given seed.
StateSequence sample_sequence(const ValueFunction& vf, const StdNetwork& net,
                              const SupportPointSet& spp, std::uint64_t seed);

}  // namespace routelogit
