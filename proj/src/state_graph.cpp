#include "routelogit/state_graph.hpp"

#include <algorithm>
#include <deque>

#include "routelogit/error.hpp"

namespace routelogit {

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

}  // namespace

StateGraph::StateGraph(const StdNetwork& net, const SupportPointSet& spp,
                       State initial, const AttributeFn& attributes)
    : net_(&net), spp_(&spp) {
  validate_state(net, spp, initial);
  const Time limit = max_trip_time(net, spp, initial.time);
  bool attribute_count_known = false;

  auto add_node = [&](State s) -> std::size_t {
    const StateKey key = state_key(spp, s);
    auto [it, inserted] = index_.try_emplace(key, nodes_.size());
    if (inserted) {
      GraphNode n;
      n.terminal = net.is_destination(s.link);
      if (!n.terminal && s.time > limit)
        throw HorizonError("state " + to_string(s) +
                           " exceeds the maximum trip time " +
                           std::to_string(limit) +
                           " (cyclic network or unreachable destination)");
      n.state = std::move(s);
      n.key = key;
      nodes_.push_back(std::move(n));
    }
    return it->second;
  };

  add_node(std::move(initial));
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].terminal) continue;
    const State s = nodes_[i].state;
    std::vector<GraphTransition> transitions;
    for (LinkId a : net.outgoing(s.link)) {
      GraphTransition tr;
      tr.link = a;
      tr.attributes = attributes(net, spp, a, s);
      if (!attribute_count_known) {
        attribute_count_ = tr.attributes.size();
        attribute_count_known = true;
      } else if (tr.attributes.size() != attribute_count_) {
        throw ValidationError("attribute extractor returned vectors of "
                              "different lengths");
      }
      for (auto& succ : successor_states(net, spp, s, a)) {
        const double p = succ.probability;
        const std::size_t target = add_node(std::move(succ.state));
        tr.edges.push_back({target, p, 0});
      }
      transitions.push_back(std::move(tr));
    }
    nodes_[i].transitions = std::move(transitions);
  }

  order_.resize(nodes_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) {
                     return nodes_[a].state.time > nodes_[b].state.time;
                   });

  for (std::size_t u : order_) {
    GraphNode& n = nodes_[u];
    if (n.terminal) {
      n.sequence_count = 1;
      continue;
    }
    std::uint64_t count = 0;
    for (auto& tr : n.transitions)
      for (auto& e : tr.edges) {
        e.sequence_offset = count;
        count = saturating_add(count, nodes_[e.target].sequence_count);
      }
    n.sequence_count = count;
  }
}

std::optional<std::size_t> StateGraph::find(const StateKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> StateGraph::find(const State& s) const {
  StateKey key;
  try {
    key = state_key(*spp_, s);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  return find(key);
}

std::optional<std::size_t> StateGraph::transition_index(std::size_t node,
                                                        LinkId link) const {
  const auto& trs = nodes_[node].transitions;
  for (std::size_t i = 0; i < trs.size(); ++i)
    if (trs[i].link == link) return i;
  return std::nullopt;
}

std::optional<std::size_t> StateGraph::edge_index(std::size_t node,
                                                  std::size_t tr,
                                                  std::size_t target) const {
  const auto& edges = nodes_[node].transitions[tr].edges;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].target == target) return i;
  return std::nullopt;
}

std::vector<GraphPath> enumerate_graph_paths(const StateGraph& g,
                                             std::uint64_t cap) {
  if (g.sequence_count() > cap)
    throw CapExceededError(
        "sequence count exceeds cap of " + std::to_string(cap));
  std::vector<GraphPath> out;
  out.reserve(static_cast<std::size_t>(g.sequence_count()));
  GraphPath cur;

  auto dfs = [&](auto&& self, std::size_t u) -> void {
    const GraphNode& n = g.node(u);
    if (n.terminal) {
      cur.last = u;
      out.push_back(cur);
      return;
    }
    for (std::size_t t = 0; t < n.transitions.size(); ++t)
      for (std::size_t e = 0; e < n.transitions[t].edges.size(); ++e) {
        const std::size_t v = n.transitions[t].edges[e].target;
        if (g.node(v).sequence_count == 0) continue;
        cur.steps.push_back({u, t, e});
        self(self, v);
        cur.steps.pop_back();
      }
  };
  if (g.sequence_count() > 0) dfs(dfs, g.root());
  return out;
}

GraphPath locate_sequence(const StateGraph& g, const StateSequence& seq) {
  validate_sequence(g.network(), g.support_points(), seq);
  if (seq.states.front() != g.node(g.root()).state)
    throw InvalidSequenceError("sequence starts at " +
                               to_string(seq.states.front()) +
                               " but the model was solved from " +
                               to_string(g.node(g.root()).state));
  GraphPath p;
  std::size_t u = g.root();
  for (std::size_t i = 0; i + 1 < seq.states.size(); ++i) {
    const auto v = g.find(seq.states[i + 1]);
    const auto t = g.transition_index(u, seq.states[i + 1].link);
    if (!v || !t)
      throw InvalidSequenceError("state " + to_string(seq.states[i + 1]) +
                                 " is not reachable in the model");
    const auto e = g.edge_index(u, *t, *v);
    if (!e)
      throw InvalidSequenceError("transition to " +
                                 to_string(seq.states[i + 1]) +
                                 " is not possible");
    p.steps.push_back({u, *t, *e});
    u = *v;
  }
  p.last = u;
  return p;
}

StateSequence to_sequence(const StateGraph& g, const GraphPath& p) {
  StateSequence s;
  s.states.reserve(p.steps.size() + 1);
  for (const auto& st : p.steps) s.states.push_back(g.node(st.node).state);
  s.states.push_back(g.node(p.last).state);
  return s;
}

std::uint64_t sequence_index(const StateGraph& g, const GraphPath& p) {
  std::uint64_t id = 0;
  for (const auto& st : p.steps)
    id += g.node(st.node).transitions[st.transition].edges[st.edge]
              .sequence_offset;
  return id;
}

}  // namespace routelogit
