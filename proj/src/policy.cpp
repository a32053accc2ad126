#include "routelogit/policy.hpp"

#include <limits>
#include <set>

#include "routelogit/error.hpp"
#include "routelogit/state_graph.hpp"

namespace routelogit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

AttributeFn no_attributes() {
  return [](const StdNetwork&, const SupportPointSet&, LinkId, const State&) {
    return std::vector<double>{};
  };
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  return a > kSaturated / b ? kSaturated : a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kSaturated - b ? kSaturated : a + b;
}

std::vector<std::uint64_t> policy_counts(const StateGraph& g) {
  std::vector<std::uint64_t> count(g.size(), 0);
  for (std::size_t u : g.backward_order()) {
    const GraphNode& n = g.node(u);
    if (n.terminal) {
      count[u] = 1;
      continue;
    }
    std::uint64_t total = 0;
    for (const auto& tr : n.transitions) {
      std::uint64_t prod = 1;
      for (const auto& e : tr.edges) prod = saturating_mul(prod, count[e.target]);
      total = saturating_add(total, prod);
    }
    count[u] = total;
  }
  return count;
}

LinkId checked_decision(const StdNetwork& net, const RoutingPolicy& policy,
                        const State& s) {
  auto a = policy.decision(s);
  if (!a)
    throw ValidationError("policy has no decision at reachable state " +
                          to_string(s));
  if (!net.is_outgoing(s.link, *a))
    throw ValidationError("policy decision " + std::to_string(*a) + " at " +
                          to_string(s) + " is not in A(k)");
  return *a;
}

}  // namespace

std::optional<LinkId> RoutingPolicy::decision(const State& s) const {
  auto it = decisions_.find(s);
  if (it == decisions_.end()) return std::nullopt;
  return it->second;
}

void validate_policy(const StdNetwork& net, const SupportPointSet& spp,
                     const RoutingPolicy& policy) {
  std::set<State> visited;
  auto walk = [&](auto&& self, const State& s, int depth) -> void {
    if (net.is_destination(s.link)) return;
    if (depth > static_cast<int>(net.link_count()) + net.horizon() + 1)
      throw ValidationError("policy state tree does not terminate");
    const LinkId a = checked_decision(net, policy, s);
    visited.insert(s);
    auto succ = successor_states(net, spp, s, a);
    for (const auto& nx : succ) {
      if (!net.is_destination(nx.state.link) &&
          net.outgoing(nx.state.link).empty())
        throw ValidationError("policy leaf " + to_string(nx.state) +
                              " is not at the destination");
      self(self, nx.state, depth + 1);
    }
  };
  validate_state(net, spp, policy.initial_state());
  walk(walk, policy.initial_state(), 0);
  if (visited.size() != policy.decisions().size())
    throw ValidationError("policy maps states it never reaches");
}

std::uint64_t count_policies(const StdNetwork& net, const SupportPointSet& spp,
                             const State& initial) {
  StateGraph g(net, spp, initial, no_attributes());
  return policy_counts(g)[g.root()];
}

PolicyChoiceSet enumerate_policies(const StdNetwork& net,
                                   const SupportPointSet& spp,
                                   const State& initial,
                                   std::uint64_t max_policies) {
  StateGraph g(net, spp, initial, no_attributes());
  const auto count = policy_counts(g);
  if (count[g.root()] > max_policies)
    throw CapExceededError(
        "policy count " +
        (count[g.root()] == kSaturated ? std::string("(overflow)")
                                       : std::to_string(count[g.root()])) +
        " exceeds cap of " + std::to_string(max_policies));

  using Decisions = std::vector<std::pair<std::size_t, LinkId>>;
  std::vector<std::optional<std::vector<Decisions>>> memo(g.size());

  auto expand = [&](auto&& self, std::size_t u) -> const std::vector<Decisions>& {
    if (memo[u]) return *memo[u];
    std::vector<Decisions> result;
    const GraphNode& n = g.node(u);
    if (n.terminal) {
      result.emplace_back();
    } else {
      for (const auto& tr : n.transitions) {
        std::vector<Decisions> combos{Decisions{{u, tr.link}}};
        for (const auto& e : tr.edges) {
          const auto& sub = self(self, e.target);
          std::vector<Decisions> next;
          next.reserve(combos.size() * sub.size());
          for (const auto& c : combos)
            for (const auto& d : sub) {
              Decisions merged = c;
              merged.insert(merged.end(), d.begin(), d.end());
              next.push_back(std::move(merged));
            }
          combos = std::move(next);
          if (combos.empty()) break;
        }
        for (auto& c : combos) result.push_back(std::move(c));
      }
    }
    memo[u] = std::move(result);
    return *memo[u];
  };

  PolicyChoiceSet cs{g.node(g.root()).state, {}};
  for (const auto& d : expand(expand, g.root())) {
    std::map<State, LinkId> decisions;
    for (const auto& [node, link] : d) decisions.emplace(g.node(node).state, link);
    cs.policies.emplace_back(cs.initial_state, std::move(decisions));
  }
  return cs;
}

std::vector<SequenceProbability> policy_outcomes(const StdNetwork& net,
                                                 const SupportPointSet& spp,
                                                 const RoutingPolicy& policy) {
  std::vector<SequenceProbability> out;
  StateSequence cur;
  auto walk = [&](auto&& self, const State& s, double p) -> void {
    cur.states.push_back(s);
    if (net.is_destination(s.link)) {
      out.push_back({cur, p});
    } else {
      const LinkId a = checked_decision(net, policy, s);
      for (const auto& nx : successor_states(net, spp, s, a))
        self(self, nx.state, p * nx.probability);
    }
    cur.states.pop_back();
  };
  walk(walk, policy.initial_state(), 1.0);
  return out;
}

std::vector<double> policy_expected_attributes(const StdNetwork& net,
                                               const SupportPointSet& spp,
                                               const RoutingPolicy& policy,
                                               const AttributeFn& attributes) {
  std::vector<double> total;
  auto walk = [&](auto&& self, const State& s, double p) -> void {
    if (net.is_destination(s.link)) return;
    const LinkId a = checked_decision(net, policy, s);
    const auto attrs = attributes(net, spp, a, s);
    if (total.empty()) total.assign(attrs.size(), 0.0);
    if (attrs.size() != total.size())
      throw ValidationError("attribute extractor returned vectors of "
                            "different lengths");
    for (std::size_t j = 0; j < attrs.size(); ++j) total[j] += p * attrs[j];
    for (const auto& nx : successor_states(net, spp, s, a))
      self(self, nx.state, p * nx.probability);
  };
  walk(walk, policy.initial_state(), 1.0);
  return total;
}

double policy_expected_utility(const StdNetwork& net,
                               const SupportPointSet& spp,
                               const RoutingPolicy& policy,
                               const LinkUtilitySpec& utility) {
  auto walk = [&](auto&& self, const State& s) -> double {
    if (net.is_destination(s.link)) return 0.0;
    const LinkId a = checked_decision(net, policy, s);
    double v = utility.utility(net, spp, a, s);
    for (const auto& nx : successor_states(net, spp, s, a))
      v += nx.probability * self(self, nx.state);
    return v;
  };
  return walk(walk, policy.initial_state());
}

bool contains(const RoutingPolicy& policy, const StateSequence& seq) {
  if (seq.states.empty() || seq.states.front() != policy.initial_state())
    return false;
  for (std::size_t i = 0; i + 1 < seq.states.size(); ++i) {
    auto a = policy.decision(seq.states[i]);
    if (!a || *a != seq.states[i + 1].link) return false;
  }
  return true;
}

OptimalPolicy optimal_policy(const StdNetwork& net, const SupportPointSet& spp,
                             const State& initial,
                             const LinkUtilitySpec& utility) {
  utility.validate();
  StateGraph g(net, spp, initial, utility.attributes);
  std::vector<double> value(g.size(), kNegInf);
  std::vector<std::size_t> best(g.size(), 0);
  for (std::size_t u : g.backward_order()) {
    const GraphNode& n = g.node(u);
    if (n.terminal) {
      value[u] = 0.0;
      continue;
    }
    for (std::size_t t = 0; t < n.transitions.size(); ++t) {
      const auto& tr = n.transitions[t];
      double q = utility.utility(tr.attributes);
      for (const auto& e : tr.edges) q += e.probability * value[e.target];
      if (q > value[u]) {
        value[u] = q;
        best[u] = t;
      }
    }
  }
  if (value[g.root()] == kNegInf)
    throw UnreachableDestinationError("destination is unreachable from " +
                                      to_string(initial));

  std::map<State, LinkId> decisions;
  auto walk = [&](auto&& self, std::size_t u) -> void {
    const GraphNode& n = g.node(u);
    if (n.terminal) return;
    const auto& tr = n.transitions[best[u]];
    decisions.emplace(n.state, tr.link);
    for (const auto& e : tr.edges) self(self, e.target);
  };
  walk(walk, g.root());

  OptimalPolicy result{RoutingPolicy(g.node(g.root()).state, std::move(decisions)),
                       {},
                       value[g.root()]};
  for (std::size_t u = 0; u < g.size(); ++u)
    result.values.emplace(g.node(u).state, value[u]);
  return result;
}

}  // namespace routelogit
