// Shared test fixtures: the three-node example network, a random small STD
// network generator and brute-force oracles written against the raw
// support-point tables (no library partitions or state graphs).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "routelogit/io.hpp"
#include "routelogit/network.hpp"
#include "routelogit/policy.hpp"

namespace fixtures {

using namespace routelogit;

inline const char* kThreeNode = R"({
  "nodes": ["a", "b", "c"],
  "links": [
    {"id": 0, "to": "a"},
    {"id": 1, "from": "a", "to": "b"},
    {"id": 2, "from": "b", "to": "c"},
    {"id": 3, "from": "b", "to": "c"}
  ],
  "origin_link": 0,
  "destination_node": "c",
  "horizon": 2,
  "support_points": [
    {"probability": 0.5, "travel_times": {"1": [1, 1], "2": [2, 3], "3": [1, 2]}},
    {"probability": 0.5, "travel_times": {"1": [1, 2], "2": [2, 2], "3": [1, 2]}}
  ]
})";

inline NetworkModel three_node() { return load_network(kThreeNode); }

inline State st(LinkId k, Time t, std::vector<int> ev) {
  return {k, t, EventCollection(std::move(ev))};
}

// Sequences of the example network (0-based support points).
inline StateSequence sigma(int i) {
  const State o = st(0, 0, {0, 1});
  switch (i) {
    case 1: return {{o, st(1, 1, {0}), st(2, 4, {0})}};
    case 2: return {{o, st(1, 1, {0}), st(3, 3, {0})}};
    case 3: return {{o, st(1, 1, {1}), st(2, 3, {1})}};
    default: return {{o, st(1, 1, {1}), st(3, 3, {1})}};
  }
}

struct RandomNetworkOptions {
  int max_nodes = 4;
  int max_links = 6;  // including the origin dummy link
  int max_support_points = 3;
  int max_periods = 3;
  int max_time = 3;
  bool deterministic = false;  // R = 1
};

// Random DAG from node n0 to the last node; every node can reach the
// destination, so no state is a dead end. Period-0 times are shared by all
// support points so the origin state has a single event collection.
inline NetworkModel random_network(std::mt19937_64& rng,
                                   const RandomNetworkOptions& o = {}) {
  auto uni = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const int n = uni(2, std::min(o.max_nodes, o.max_links));
  std::vector<std::string> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
  std::vector<Link> links{{0, "", "n0"}};
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i + 1 < n; ++i) arcs.emplace_back(i, uni(i + 1, n - 1));
  const int extra = uni(0, o.max_links - 1 - static_cast<int>(arcs.size()));
  for (int e = 0; e < extra; ++e) {
    const int i = uni(0, n - 2);
    arcs.emplace_back(i, uni(i + 1, n - 1));
  }
  for (std::size_t i = 0; i < arcs.size(); ++i)
    links.push_back({static_cast<LinkId>(i + 1), nodes[arcs[i].first],
                     nodes[arcs[i].second]});

  const int r_count = o.deterministic ? 1 : uni(1, o.max_support_points);
  const int k = uni(1, o.max_periods);
  const std::size_t m = links.size();
  std::vector<int> times(static_cast<std::size_t>(r_count) * k * m);
  for (int r = 0; r < r_count; ++r)
    for (int t = 0; t < k; ++t)
      for (std::size_t l = 0; l < m; ++l) {
        int& v = times[(static_cast<std::size_t>(r) * k + t) * m + l];
        if (l == 0) v = 0;
        else if (t == 0 && r > 0) v = times[l];
        else v = uni(1, o.max_time);
      }
  std::vector<double> w(r_count);
  double sum = 0.0;
  for (double& x : w) sum += (x = uni(1, 9));
  for (double& x : w) x /= sum;

  StdNetwork net(nodes, links, 0, Destination{std::nullopt, nodes.back()}, k);
  SupportPointSet spp(net, w, times);
  return {std::move(net), std::move(spp)};
}

// ---- brute-force oracles on the raw travel-time tables ----

inline int raw_time(const SupportPointSet& spp, const StdNetwork& net, int r,
                    LinkId a, Time t) {
  return spp.travel_time(r, t, net.index_of(a));
}

// Support points compatible with r's travel times over periods 0..min(t,K-1).
inline std::vector<int> compatible(const SupportPointSet& spp, int r, Time t) {
  std::vector<int> out;
  const int last = std::min(t, spp.periods() - 1);
  for (int q = 0; q < static_cast<int>(spp.size()); ++q) {
    bool same = true;
    for (int p = 0; p <= last && same; ++p)
      for (std::size_t l = 0; l < spp.link_count() && same; ++l)
        same = spp.travel_time(q, p, l) == spp.travel_time(r, p, l);
    if (same) out.push_back(q);
  }
  return out;
}

// Sequence produced by a policy when support point r is realized.
inline StateSequence rollout(const StdNetwork& net, const SupportPointSet& spp,
                             const RoutingPolicy& policy, int r) {
  StateSequence seq{{policy.initial_state()}};
  while (!net.is_destination(seq.states.back().link)) {
    const State& s = seq.states.back();
    const LinkId a = *policy.decision(s);
    const Time t2 = s.time + raw_time(spp, net, r, a, s.time);
    seq.states.push_back({a, t2, EventCollection(compatible(spp, r, t2))});
  }
  return seq;
}

// Expected link-time sum of a policy, summing over support points directly.
inline double rollout_expected_time(const StdNetwork& net,
                                    const SupportPointSet& spp,
                                    const RoutingPolicy& policy) {
  double e = 0.0;
  for (int r = 0; r < static_cast<int>(spp.size()); ++r) {
    const auto seq = rollout(net, spp, policy, r);
    double tt = 0.0;
    for (std::size_t i = 1; i < seq.states.size(); ++i)
      tt += seq.states[i].time - seq.states[i - 1].time;
    e += spp.probability(r) * tt;
  }
  return e;
}

// Recursive logit value by direct memoized recursion over (link, time,
// compatible set), utility beta * travel time.
class OracleValue {
 public:
  OracleValue(const StdNetwork& net, const SupportPointSet& spp, double beta,
              double mu)
      : net_(net), spp_(spp), beta_(beta), mu_(mu) {}

  double value(LinkId k, Time t, const std::vector<int>& ev) {
    if (net_.is_destination(k)) return 0.0;
    auto key = std::make_tuple(k, t, ev);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double sum = 0.0;
    for (LinkId a : net_.outgoing(k)) sum += std::exp(q(k, t, ev, a) / mu_);
    const double v = mu_ * std::log(sum);
    memo_[key] = v;
    return v;
  }

  double q(LinkId, Time t, const std::vector<int>& ev, LinkId a) {
    const int tau = raw_time(spp_, net_, ev.front(), a, t);
    const Time t2 = t + tau;
    double pe = 0.0;
    for (int r : ev) pe += spp_.probability(r);
    double cont = 0.0;
    std::vector<std::vector<int>> seen;
    for (int r : ev) {
      auto next = compatible(spp_, r, t2);
      std::vector<int> inter;
      std::set_intersection(next.begin(), next.end(), ev.begin(), ev.end(),
                            std::back_inserter(inter));
      if (std::find(seen.begin(), seen.end(), inter) != seen.end()) continue;
      seen.push_back(inter);
      double pi = 0.0;
      for (int x : inter) pi += spp_.probability(x);
      cont += pi / pe * value(a, t2, next);
    }
    return beta_ * tau + cont;
  }

 private:
  const StdNetwork& net_;
  const SupportPointSet& spp_;
  double beta_, mu_;
  std::map<std::tuple<LinkId, Time, std::vector<int>>, double> memo_;
};

inline std::string data_path(const std::string& name) {
  const char* dir = std::getenv("ROUTELOGIT_DATA");
#ifdef ROUTELOGIT_DATA_DIR
  if (!dir) dir = ROUTELOGIT_DATA_DIR;
#endif
  return std::string(dir ? dir : "data") + "/" + name;
}

}  // namespace fixtures
