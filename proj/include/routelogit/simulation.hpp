/**
 * @file simulation.hpp
 * @brief Monte Carlo sequence samplers and counting kernels.
 *
 * Samples are drawn in fixed-size chunks, each with its own generator seeded
 * from (seed, chunk index). The serial and OpenMP kernels therefore produce
 * identical counts for any thread count.
 */
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "routelogit/state_graph.hpp"

namespace routelogit {

class ValueFunction;
class NonRecursiveLogit;

namespace detail {

// Index of the first cumulative weight exceeding u; skips zero-weight
// entries when rounding leaves u above the last partial sum.
inline std::size_t pick(std::span<const double> cumulative, double u) {
  for (std::size_t i = 0; i < cumulative.size(); ++i)
    if (u < cumulative[i]) return i;
  for (std::size_t i = cumulative.size(); i-- > 0;)
    if (i == 0 || cumulative[i] > cumulative[i - 1]) return i;
  return 0;
}

}  // namespace detail

/// Cumulative link and successor distributions of a solved recursive model.
class RecursiveSampler {
 public:
  explicit RecursiveSampler(const ValueFunction& vf);

  const StateGraph& graph() const { return *graph_; }
  std::uint64_t sequence_count() const { return graph_->sequence_count(); }

  template <class URBG>
  GraphPath sample_path(URBG& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    GraphPath p;
    std::size_t u = graph_->root();
    while (!graph_->node(u).terminal) {
      const std::size_t t = detail::pick(choice_cdf(u), unif(rng));
      const std::size_t e = detail::pick(edge_cdf(u, t), unif(rng));
      p.steps.push_back({u, t, e});
      u = graph_->node(u).transitions[t].edges[e].target;
    }
    p.last = u;
    return p;
  }

  template <class URBG>
  std::uint64_t sample_index(URBG& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uint64_t id = 0;
    std::size_t u = graph_->root();
    while (!graph_->node(u).terminal) {
      const std::size_t t = detail::pick(choice_cdf(u), unif(rng));
      const std::size_t e = detail::pick(edge_cdf(u, t), unif(rng));
      const auto& edge = graph_->node(u).transitions[t].edges[e];
      id += edge.sequence_offset;
      u = edge.target;
    }
    return id;
  }

 private:
  std::span<const double> choice_cdf(std::size_t u) const;
  std::span<const double> edge_cdf(std::size_t u, std::size_t t) const;

  const StateGraph* graph_;
  std::vector<std::size_t> node_offset_;
  std::vector<double> choice_cdf_;
  std::vector<std::size_t> edge_offset_;  // per (node, transition)
  std::vector<double> edge_cdf_;
};

/// Draws a policy from the origin logit, then rolls it out.
class NonRecursiveSampler {
 public:
  explicit NonRecursiveSampler(const NonRecursiveLogit& model);

  const StateGraph& graph() const { return *graph_; }
  std::uint64_t sequence_count() const { return graph_->sequence_count(); }

  template <class URBG>
  GraphPath sample_path(URBG& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t policy = detail::pick(policy_cdf_, unif(rng));
    GraphPath p;
    std::size_t u = graph_->root();
    while (!graph_->node(u).terminal) {
      const std::size_t t = decision(policy, u);
      const std::size_t e = detail::pick(edge_cdf(u, t), unif(rng));
      p.steps.push_back({u, t, e});
      u = graph_->node(u).transitions[t].edges[e].target;
    }
    p.last = u;
    return p;
  }

  template <class URBG>
  std::uint64_t sample_index(URBG& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t policy = detail::pick(policy_cdf_, unif(rng));
    std::uint64_t id = 0;
    std::size_t u = graph_->root();
    while (!graph_->node(u).terminal) {
      const std::size_t t = decision(policy, u);
      const std::size_t e = detail::pick(edge_cdf(u, t), unif(rng));
      const auto& edge = graph_->node(u).transitions[t].edges[e];
      id += edge.sequence_offset;
      u = edge.target;
    }
    return id;
  }

 private:
  std::size_t decision(std::size_t policy, std::size_t node) const;
  std::span<const double> edge_cdf(std::size_t u, std::size_t t) const;

  const StateGraph* graph_;
  std::vector<double> policy_cdf_;
  // Per policy: (node, transition) pairs sorted by node.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> decisions_;
  std::vector<std::size_t> node_offset_;
  std::vector<std::size_t> edge_offset_;
  std::vector<double> edge_cdf_;
};

inline constexpr std::uint64_t kSimulationChunk = 8192;

/// Generator for one chunk of samples.
std::mt19937_64 chunk_generator(std::uint64_t seed, std::uint64_t chunk);

/// Reference kernel: histogram of sampled sequence indices, one chunk at a
/// time on the calling thread.
template <class Sampler>
std::vector<std::uint64_t> simulate_counts_serial(const Sampler& sampler,
                                                  std::uint64_t samples,
                                                  std::uint64_t seed) {
  std::vector<std::uint64_t> counts(
      static_cast<std::size_t>(sampler.sequence_count()), 0);
  const std::uint64_t chunks = (samples + kSimulationChunk - 1) / kSimulationChunk;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    auto rng = chunk_generator(seed, c);
    const std::uint64_t n = std::min(kSimulationChunk, samples - c * kSimulationChunk);
    for (std::uint64_t i = 0; i < n; ++i) ++counts[sampler.sample_index(rng)];
  }
  return counts;
}

/// OpenMP kernel; same counts as simulate_counts_serial.
template <class Sampler>
std::vector<std::uint64_t> simulate_counts(const Sampler& sampler,
                                           std::uint64_t samples,
                                           std::uint64_t seed) {
  const std::size_t m = static_cast<std::size_t>(sampler.sequence_count());
  std::vector<std::uint64_t> counts(m, 0);
  const auto chunks = static_cast<std::int64_t>(
      (samples + kSimulationChunk - 1) / kSimulationChunk);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(m, 0);
#pragma omp for schedule(dynamic)
    for (std::int64_t c = 0; c < chunks; ++c) {
      const auto cu = static_cast<std::uint64_t>(c);
      auto rng = chunk_generator(seed, cu);
      const std::uint64_t n =
          std::min(kSimulationChunk, samples - cu * kSimulationChunk);
      for (std::uint64_t i = 0; i < n; ++i) ++local[sampler.sample_index(rng)];
    }
#pragma omp critical
    for (std::size_t i = 0; i < m; ++i) counts[i] += local[i];
  }
  return counts;
}

/// `samples` sequences drawn with the chunked generators, in draw order.
template <class Sampler>
std::vector<StateSequence> simulate_sequences(const Sampler& sampler,
                                              std::uint64_t samples,
                                              std::uint64_t seed) {
  std::vector<StateSequence> out(static_cast<std::size_t>(samples));
  const auto chunks = static_cast<std::int64_t>(
      (samples + kSimulationChunk - 1) / kSimulationChunk);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto cu = static_cast<std::uint64_t>(c);
    auto rng = chunk_generator(seed, cu);
    const std::uint64_t n =
        std::min(kSimulationChunk, samples - cu * kSimulationChunk);
    for (std::uint64_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(cu * kSimulationChunk + i)] =
          to_sequence(sampler.graph(), sampler.sample_path(rng));
  }
  return out;
}

}  // namespace routelogit
