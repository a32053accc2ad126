#include "routelogit/nonrecursive_logit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "routelogit/error.hpp"
#include "routelogit/logsumexp.hpp"
#include "routelogit/simulation.hpp"

namespace routelogit {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::vector<double> policy_logit(std::span<const double> utilities, double mu) {
  if (utilities.empty()) throw ValidationError("empty policy choice set");
  const double m = *std::max_element(utilities.begin(), utilities.end());
  if (m == kNegInf) throw ValidationError("all policy utilities are -inf");
  std::vector<double> scaled(utilities.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i)
    sum += std::exp(scaled[i] = (utilities[i] - m) / mu);
  const double log_norm = std::log(sum);
  for (double& v : scaled) v -= log_norm;
  return scaled;
}

NonRecursiveLogit::NonRecursiveLogit(const StdNetwork& net,
                                     const SupportPointSet& spp,
                                     PolicyChoiceSet choice_set,
                                     LinkUtilitySpec utility)
    : net_(&net),
      spp_(&spp),
      choice_set_(std::move(choice_set)),
      utility_(std::move(utility)) {
  utility_.validate();
  if (choice_set_.policies.empty())
    throw ValidationError("empty policy choice set");
  for (const auto& p : choice_set_.policies)
    if (p.initial_state() != choice_set_.initial_state)
      throw ValidationError("policies in a choice set must share the initial "
                            "state");
  graph_ = std::make_shared<const StateGraph>(net, spp, choice_set_.initial_state,
                                              utility_.attributes);
  utilities_.reserve(choice_set_.policies.size());
  for (const auto& p : choice_set_.policies) {
    attributes_.push_back(
        policy_expected_attributes(net, spp, p, utility_.attributes));
    utilities_.push_back(utility_.utility(attributes_.back()));
  }
  log_probabilities_ = policy_logit(utilities_, utility_.mu);
  probabilities_.reserve(log_probabilities_.size());
  for (double lp : log_probabilities_) probabilities_.push_back(std::exp(lp));
}

double NonRecursiveLogit::policy_choice_prob(const RoutingPolicy& policy) const {
  for (std::size_t i = 0; i < choice_set_.policies.size(); ++i)
    if (choice_set_.policies[i] == policy) return probabilities_[i];
  throw ValidationError("policy is not in the choice set");
}

double NonRecursiveLogit::sequence_log_likelihood(
    const StateSequence& seq) const {
  validate_sequence(*net_, *spp_, seq);
  if (seq.states.front() != choice_set_.initial_state)
    throw InvalidSequenceError("sequence does not start at the choice set's "
                               "initial state");
  std::vector<double> terms;
  for (std::size_t i = 0; i < choice_set_.policies.size(); ++i)
    if (contains(choice_set_.policies[i], seq))
      terms.push_back(log_probabilities_[i]);
  const double pr_ev =
      transition_prob(*spp_, seq.states.back().ev, seq.states.front().ev);
  if (terms.empty() || pr_ev <= 0.0) return kNegInf;
  return log_sum_exp(terms) + std::log(pr_ev);
}

double NonRecursiveLogit::sequence_likelihood(const StateSequence& seq) const {
  validate_sequence(*net_, *spp_, seq);
  double p = 0.0;
  for (std::size_t i = 0; i < choice_set_.policies.size(); ++i)
    p += probabilities_[i] *
         sequence_prob_given_policy(seq, choice_set_.policies[i], *spp_);
  return p;
}

std::vector<SequenceProbability> NonRecursiveLogit::sequence_probabilities(
    std::uint64_t cap) const {
  std::vector<SequenceProbability> out;
  for (const auto& path : enumerate_graph_paths(*graph_, cap)) {
    auto seq = to_sequence(*graph_, path);
    const double p = sequence_likelihood(seq);
    out.push_back({std::move(seq), p});
  }
  return out;
}

std::vector<PathProbability> NonRecursiveLogit::path_probabilities(
    std::uint64_t cap) const {
  return aggregate_paths(sequence_probabilities(cap));
}

StateSequence NonRecursiveLogit::sample_sequence(std::uint64_t seed) const {
  NonRecursiveSampler sampler(*this);
  std::mt19937_64 rng(seed);
  return to_sequence(*graph_, sampler.sample_path(rng));
}

NonRecursiveLogit make_nonrecursive_logit(const StdNetwork& net,
                                          const SupportPointSet& spp,
                                          const LinkUtilitySpec& utility,
                                          const State& initial,
                                          std::uint64_t max_policies) {
  return NonRecursiveLogit(net, spp,
                           enumerate_policies(net, spp, initial, max_policies),
                           utility);
}

double policy_choice_prob(const NonRecursiveLogit& model,
                          const RoutingPolicy& policy) {
  return model.policy_choice_prob(policy);
}

double sequence_prob_given_policy(const StateSequence& seq,
                                  const RoutingPolicy& policy,
                                  const SupportPointSet& spp) {
  if (!contains(policy, seq)) return 0.0;
  return transition_prob(spp, seq.states.back().ev, seq.states.front().ev);
}

double sequence_likelihood_nr(const StateSequence& seq,
                              const NonRecursiveLogit& model) {
  return model.sequence_likelihood(seq);
}

StateSequence sample_sequence_nr(const NonRecursiveLogit& model,
                                 std::uint64_t seed) {
  return model.sample_sequence(seed);
}

}  // namespace routelogit
