#include "routelogit/recursive_logit.hpp"

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

ValueFunction::ValueFunction(std::shared_ptr<const StateGraph> graph,
                             LinkUtilitySpec utility)
    : graph_(std::move(graph)), utility_(std::move(utility)) {
  utility_.validate();
  const StateGraph& g = *graph_;
  const double mu = utility_.mu;

  offsets_.resize(g.size() + 1, 0);
  for (std::size_t u = 0; u < g.size(); ++u)
    offsets_[u + 1] = offsets_[u] + g.node(u).transitions.size();
  omega_.assign(offsets_.back(), 0.0);
  q_.assign(offsets_.back(), kNegInf);
  values_.assign(g.size(), kNegInf);
  q_max_.assign(g.size(), kNegInf);
  log_norm_.assign(g.size(), kNegInf);

  for (std::size_t u : g.backward_order()) {
    const GraphNode& n = g.node(u);
    if (n.terminal) {
      values_[u] = 0.0;
      continue;
    }
    double q_max = kNegInf;
    for (std::size_t t = 0; t < n.transitions.size(); ++t) {
      const auto& tr = n.transitions[t];
      const double omega = utility_.utility(tr.attributes);
      double cont = 0.0;
      for (const auto& e : tr.edges) cont += e.probability * values_[e.target];
      omega_[offsets_[u] + t] = omega;
      q_[offsets_[u] + t] = omega + cont;
      q_max = std::max(q_max, omega + cont);
    }
    if (q_max == kNegInf) continue;
    // Differences to the best q before dividing by mu: exact 0 for the best
    // link and no overflow at small mu.
    double sum = 0.0;
    for (std::size_t t = 0; t < n.transitions.size(); ++t)
      sum += std::exp((q_[offsets_[u] + t] - q_max) / mu);
    q_max_[u] = q_max;
    log_norm_[u] = std::log(sum);
    values_[u] = q_max + mu * log_norm_[u];
  }
}

double ValueFunction::value(const State& s) const {
  auto u = graph_->find(s);
  if (!u)
    throw ValidationError("state " + to_string(s) +
                          " is outside the solved state space");
  return values_[*u];
}

double ValueFunction::log_choice_prob(std::size_t node, std::size_t t) const {
  const double q = q_[offsets_[node] + t];
  if (q == kNegInf || values_[node] == kNegInf) return kNegInf;
  return (q - q_max_[node]) / utility_.mu - log_norm_[node];
}

double ValueFunction::choice_prob(std::size_t node, std::size_t t) const {
  return std::exp(log_choice_prob(node, t));
}

ValueFunction solve_value_functions(const StdNetwork& net,
                                    const SupportPointSet& spp,
                                    const LinkUtilitySpec& utility,
                                    const State& initial) {
  utility.validate();
  auto graph =
      std::make_shared<const StateGraph>(net, spp, initial, utility.attributes);
  ValueFunction vf(std::move(graph), utility);
  if (vf.value_at(vf.graph().root()) == kNegInf)
    throw UnreachableDestinationError("destination is unreachable from " +
                                      to_string(initial));
  return vf;
}

ValueFunction solve_value_functions(std::shared_ptr<const StateGraph> graph,
                                    const LinkUtilitySpec& utility) {
  return ValueFunction(std::move(graph), utility);
}

double link_choice_prob(const ValueFunction& vf, const State& s, LinkId a) {
  const StateGraph& g = vf.graph();
  auto u = g.find(s);
  if (!u)
    throw ValidationError("state " + to_string(s) +
                          " is outside the solved state space");
  if (!g.network().is_outgoing(s.link, a))
    throw ValidationError("link " + std::to_string(a) + " is not in A(" +
                          std::to_string(s.link) + ")");
  return vf.choice_prob(*u, *g.transition_index(*u, a));
}

double sequence_likelihood(const ValueFunction& vf, const StdNetwork& net,
                           const SupportPointSet& spp,
                           const StateSequence& seq) {
  validate_sequence(net, spp, seq);
  const StateGraph& g = vf.graph();
  const GraphPath path = locate_sequence(g, seq);
  const double mu = vf.utility().mu;
  double likelihood = 1.0;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const GraphStep& st = path.steps[i];
    const auto& n = g.node(st.node);
    double m = kNegInf;
    for (std::size_t t = 0; t < n.transitions.size(); ++t)
      m = std::max(m, vf.action_value(st.node, t) / mu);
    if (m == kNegInf) return 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < n.transitions.size(); ++t)
      den += std::exp(vf.action_value(st.node, t) / mu - m);
    const double num = std::exp(vf.action_value(st.node, st.transition) / mu - m);
    const double pr_ev =
        transition_prob(spp, seq.states[i + 1].ev, seq.states[i].ev);
    likelihood *= (num / den) * pr_ev;
  }
  return likelihood;
}

double sequence_likelihood_value_form(const ValueFunction& vf,
                                      const StateSequence& seq) {
  const StateGraph& g = vf.graph();
  const GraphPath path = locate_sequence(g, seq);
  const double mu = vf.utility().mu;
  double likelihood = 1.0;
  for (const auto& st : path.steps) {
    const double q = vf.action_value(st.node, st.transition);
    const double v = vf.value_at(st.node);
    if (q == kNegInf) return 0.0;
    likelihood *= std::exp((q - v) / mu) *
                  g.node(st.node).transitions[st.transition].edges[st.edge]
                      .probability;
  }
  return likelihood;
}

double sequence_log_likelihood(const ValueFunction& vf,
                               const StateSequence& seq) {
  return path_log_likelihood(vf, locate_sequence(vf.graph(), seq));
}

double path_log_likelihood(const ValueFunction& vf, const GraphPath& path) {
  const StateGraph& g = vf.graph();
  double ll = 0.0;
  for (const auto& st : path.steps)
    ll += vf.log_choice_prob(st.node, st.transition) +
          std::log(g.node(st.node).transitions[st.transition].edges[st.edge]
                       .probability);
  return ll;
}

std::vector<SequenceProbability> sequence_probabilities(const ValueFunction& vf,
                                                        std::uint64_t cap) {
  const StateGraph& g = vf.graph();
  std::vector<SequenceProbability> out;
  for (const auto& path : enumerate_graph_paths(g, cap)) {
    double p = 1.0;
    for (const auto& st : path.steps)
      p *= vf.choice_prob(st.node, st.transition) *
           g.node(st.node).transitions[st.transition].edges[st.edge]
               .probability;
    out.push_back({to_sequence(g, path), p});
  }
  return out;
}

std::vector<PathProbability> path_probabilities(const ValueFunction& vf,
                                                const StdNetwork&,
                                                const SupportPointSet&,
                                                std::uint64_t cap) {
  return aggregate_paths(sequence_probabilities(vf, cap));
}

StateSequence sample_sequence(const ValueFunction& vf, const StdNetwork&,
                              const SupportPointSet&, std::uint64_t seed) {
  RecursiveSampler sampler(vf);
  std::mt19937_64 rng(seed);
  return to_sequence(vf.graph(), sampler.sample_path(rng));
}

}  // namespace routelogit
