#include "routelogit/simulation.hpp"

#include <algorithm>

#include "routelogit/error.hpp"
#include "routelogit/nonrecursive_logit.hpp"
#include "routelogit/recursive_logit.hpp"

namespace routelogit {

namespace {

// Per-(node, transition) cumulative successor probabilities.
void build_edge_cdf(const StateGraph& g, std::vector<std::size_t>& node_offset,
                    std::vector<std::size_t>& edge_offset,
                    std::vector<double>& edge_cdf) {
  node_offset.assign(g.size() + 1, 0);
  for (std::size_t u = 0; u < g.size(); ++u)
    node_offset[u + 1] = node_offset[u] + g.node(u).transitions.size();
  edge_offset.assign(node_offset.back() + 1, 0);
  edge_cdf.clear();
  std::size_t k = 0;
  for (std::size_t u = 0; u < g.size(); ++u)
    for (const auto& tr : g.node(u).transitions) {
      edge_offset[k++] = edge_cdf.size();
      double c = 0.0;
      for (const auto& e : tr.edges) {
        c += e.probability;
        edge_cdf.push_back(c);
      }
    }
  edge_offset[k] = edge_cdf.size();
}

}  // namespace

std::mt19937_64 chunk_generator(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

RecursiveSampler::RecursiveSampler(const ValueFunction& vf)
    : graph_(&vf.graph()) {
  const StateGraph& g = *graph_;
  build_edge_cdf(g, node_offset_, edge_offset_, edge_cdf_);
  choice_cdf_.assign(node_offset_.back(), 0.0);
  for (std::size_t u = 0; u < g.size(); ++u) {
    double c = 0.0;
    for (std::size_t t = 0; t < g.node(u).transitions.size(); ++t) {
      c += vf.choice_prob(u, t);
      choice_cdf_[node_offset_[u] + t] = c;
    }
  }
}

std::span<const double> RecursiveSampler::choice_cdf(std::size_t u) const {
  return std::span<const double>(choice_cdf_)
      .subspan(node_offset_[u], node_offset_[u + 1] - node_offset_[u]);
}

std::span<const double> RecursiveSampler::edge_cdf(std::size_t u,
                                                   std::size_t t) const {
  const std::size_t k = node_offset_[u] + t;
  return std::span<const double>(edge_cdf_)
      .subspan(edge_offset_[k], edge_offset_[k + 1] - edge_offset_[k]);
}

NonRecursiveSampler::NonRecursiveSampler(const NonRecursiveLogit& model)
    : graph_(&model.graph()) {
  const StateGraph& g = *graph_;
  build_edge_cdf(g, node_offset_, edge_offset_, edge_cdf_);
  double c = 0.0;
  for (double p : model.policy_probabilities()) {
    c += p;
    policy_cdf_.push_back(c);
  }
  for (const auto& policy : model.choice_set().policies) {
    std::vector<std::pair<std::size_t, std::size_t>> d;
    d.reserve(policy.decisions().size());
    for (const auto& [state, link] : policy.decisions()) {
      auto u = g.find(state);
      auto t = u ? g.transition_index(*u, link) : std::nullopt;
      if (!u || !t)
        throw ValidationError("policy decision at " + to_string(state) +
                              " is outside the state space");
      d.emplace_back(*u, *t);
    }
    std::sort(d.begin(), d.end());
    decisions_.push_back(std::move(d));
  }
}

std::size_t NonRecursiveSampler::decision(std::size_t policy,
                                          std::size_t node) const {
  const auto& d = decisions_[policy];
  auto it = std::lower_bound(
      d.begin(), d.end(), node,
      [](const std::pair<std::size_t, std::size_t>& x, std::size_t v) {
        return x.first < v;
      });
  if (it == d.end() || it->first != node)
    throw ValidationError("policy has no decision at " +
                          to_string(graph_->node(node).state));
  return it->second;
}

std::span<const double> NonRecursiveSampler::edge_cdf(std::size_t u,
                                                      std::size_t t) const {
  const std::size_t k = node_offset_[u] + t;
  return std::span<const double>(edge_cdf_)
      .subspan(edge_offset_[k], edge_offset_[k + 1] - edge_offset_[k]);
}

}  // namespace routelogit
