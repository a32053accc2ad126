/**
 * @file state_graph.hpp
 * @brief Time-expanded state space reachable from an initial state.
 *
 * Every transition strictly increases time, so the reachable states form a
 * DAG and sorting by decreasing time is a valid order for backward
 * induction. Sequences (root-to-destination paths) are numbered
 * 0..sequence_count()-1 in depth-first edge order; each edge carries the
 * offset of its first sequence so a sampled path maps to its index by
 * summing offsets.
 */
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "routelogit/network.hpp"
#include "routelogit/sequence.hpp"
#include "routelogit/utility.hpp"

namespace routelogit {

inline constexpr std::uint64_t kSaturated =
    std::numeric_limits<std::uint64_t>::max();

struct GraphEdge {
  std::size_t target = 0;
  double probability = 0.0;
  std::uint64_t sequence_offset = 0;
};

struct GraphTransition {
  LinkId link = 0;
  std::vector<double> attributes;
  std::vector<GraphEdge> edges;
};

struct GraphNode {
  State state;
  StateKey key;
  bool terminal = false;
  std::vector<GraphTransition> transitions;  // ascending link
  std::uint64_t sequence_count = 0;           // saturating
};

class StateGraph {
 public:
  /// Explores every state reachable from `initial`. Throws HorizonError if a
  /// non-destination state is reached after max_trip_time.
  /// The graph keeps references to net and spp.
  StateGraph(const StdNetwork& net, const SupportPointSet& spp, State initial,
             const AttributeFn& attributes);

  const StdNetwork& network() const { return *net_; }
  const SupportPointSet& support_points() const { return *spp_; }

  std::size_t size() const { return nodes_.size(); }
  std::size_t root() const { return 0; }
  const GraphNode& node(std::size_t i) const { return nodes_[i]; }
  std::span<const GraphNode> nodes() const { return nodes_; }
  /// Node indices sorted by decreasing time.
  std::span<const std::size_t> backward_order() const { return order_; }

  std::optional<std::size_t> find(const StateKey& key) const;
  std::optional<std::size_t> find(const State& s) const;
  std::optional<std::size_t> transition_index(std::size_t node,
                                              LinkId link) const;
  std::optional<std::size_t> edge_index(std::size_t node, std::size_t tr,
                                        std::size_t target) const;

  /// Number of root-to-destination sequences (saturating).
  std::uint64_t sequence_count() const { return nodes_[0].sequence_count; }
  std::size_t attribute_count() const { return attribute_count_; }

 private:
  const StdNetwork* net_;
  const SupportPointSet* spp_;
  std::vector<GraphNode> nodes_;
  std::vector<std::size_t> order_;
  std::unordered_map<StateKey, std::size_t, StateKeyHash> index_;
  std::size_t attribute_count_ = 0;
};

/// One step of a sequence in graph coordinates.
struct GraphStep {
  std::size_t node = 0;
  std::size_t transition = 0;
  std::size_t edge = 0;
};

/// Node-level description of a sequence: the steps taken plus the final node.
struct GraphPath {
  std::vector<GraphStep> steps;
  std::size_t last = 0;
};

/// All root-to-destination paths in sequence-index order. Throws
/// CapExceededError when there are more than `cap`.
std::vector<GraphPath> enumerate_graph_paths(const StateGraph& g,
                                             std::uint64_t cap);

/// Locates a validated sequence in the graph; throws InvalidSequenceError if
/// it leaves the explored state space.
GraphPath locate_sequence(const StateGraph& g, const StateSequence& seq);

StateSequence to_sequence(const StateGraph& g, const GraphPath& p);

/// Index of the sequence a path represents (sum of edge offsets).
std::uint64_t sequence_index(const StateGraph& g, const GraphPath& p);

}  // namespace routelogit
