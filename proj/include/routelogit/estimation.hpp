/**
 * @file estimation.hpp
 * @brief Maximum-likelihood estimation of beta for either model.
 *
 * The evaluator caches what does not depend on beta: one state graph per
 * distinct initial state, the located path of every distinct observed
 * sequence and, for the non-recursive model, the enumerated choice set with
 * each policy's expected attribute vector. Per beta it re-solves the value
 * functions (recursive) or re-weights the policy logit (non-recursive).
 */
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "routelogit/network.hpp"
#include "routelogit/policy.hpp"
#include "routelogit/sequence.hpp"
#include "routelogit/state_graph.hpp"
#include "routelogit/utility.hpp"

namespace routelogit {

enum class Model { recursive, nonrecursive };

Model parse_model(std::string_view name);
std::string to_string(Model m);

using ObservationSet = std::vector<StateSequence>;

class LikelihoodEvaluator {
 public:
  /// Keeps references to net and spp.
  LikelihoodEvaluator(const StdNetwork& net, const SupportPointSet& spp,
                      const ObservationSet& obs, Model model,
                      AttributeFn attributes = travel_time_attribute(),
                      std::uint64_t max_policies = 1'000'000);

  Model model() const { return model_; }
  std::size_t observation_count() const { return obs_ref_.size(); }
  std::size_t distinct_sequence_count() const;
  std::size_t parameter_count() const { return parameter_count_; }

  /// sum_n ln P(seq_n). Distinct initial states are evaluated in parallel;
  /// the sum runs serially in observation order, so the result does not
  /// depend on the thread count. Throws ZeroProbabilityError.
  double log_likelihood(std::span<const double> beta, double mu) const;
  /// Single-threaded reference of log_likelihood (bitwise identical).
  double log_likelihood_serial(std::span<const double> beta, double mu) const;
  /// ln P per observation, in observation order.
  std::vector<double> observation_log_likelihoods(std::span<const double> beta,
                                                  double mu,
                                                  bool parallel = true) const;

 private:
  struct Group;
  std::vector<double> distinct_log_likelihoods(std::span<const double> beta,
                                               double mu, bool parallel) const;

  Model model_;
  AttributeFn attributes_;
  std::size_t parameter_count_ = 0;
  std::vector<std::shared_ptr<Group>> groups_;
  std::vector<std::size_t> group_offset_;  // first distinct index of a group
  std::vector<std::size_t> obs_ref_;       // observation -> distinct index
};

/// Evaluates every observation from scratch (new state space, new solve or
/// new choice set per observation). Reference for the caching in
/// LikelihoodEvaluator.
double log_likelihood_uncached(const StdNetwork& net, const SupportPointSet& spp,
                               const ObservationSet& obs, Model model,
                               std::span<const double> beta, double mu,
                               const AttributeFn& attributes =
                                   travel_time_attribute());

double log_likelihood(Model model, const StdNetwork& net,
                      const SupportPointSet& spp, const ObservationSet& obs,
                      std::span<const double> beta, double mu);

/// Central differences with step rel_step * max(1, |beta_j|).
std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double rel_step = 1e-6);

struct FitOptions {
  double gradient_tolerance = 1e-6;
  int max_iterations = 200;
  double relative_step = 1e-6;
};

struct EstimationResult {
  std::vector<double> beta_hat;
  double log_likelihood = 0.0;
  std::vector<double> gradient;
  int iterations = 0;
  bool converged = false;
  std::optional<std::vector<double>> std_errors;
};

/// Maximizes the log-likelihood over beta with mu fixed (BFGS on
/// finite-difference gradients). Returns the best iterate even when not
/// converged.
EstimationResult fit(const LikelihoodEvaluator& evaluator,
                     std::span<const double> beta0, double mu,
                     const FitOptions& options = {});

EstimationResult fit(Model model, const StdNetwork& net,
                     const SupportPointSet& spp, const ObservationSet& obs,
                     std::span<const double> beta0, double mu = 1.0,
                     const FitOptions& options = {});

}  // namespace routelogit
