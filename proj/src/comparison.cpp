#include "routelogit/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "routelogit/error.hpp"
#include "routelogit/nonrecursive_logit.hpp"
#include "routelogit/recursive_logit.hpp"

namespace routelogit {

void TwoRouteScenario::validate() const {
  if (!(a > 0.0)) throw ValidationError("scenario requires a > 0");
  if (!(b > 0.0)) throw ValidationError("scenario requires b > 0");
  if (!(x > -a)) throw ValidationError("scenario requires x > -a");
  if (!(y > -b)) throw ValidationError("scenario requires y > -b");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("scenario requires 0 < p < 1");
}

namespace {

bool near_integer(double v) {
  return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v));
}

int common_denominator(const TwoRouteScenario& s, int max_denominator) {
  for (int d = 1; d <= max_denominator; ++d)
    if (near_integer(s.a * d) && near_integer(s.b * d) && near_integer(s.x * d) &&
        near_integer(s.y * d))
      return d;
  throw ValidationError("scenario times have no common denominator <= " +
                        std::to_string(max_denominator));
}

int scaled(double v, int d) { return static_cast<int>(std::lround(v * d)); }

}  // namespace

TwoRouteNetwork build_two_route_network(const TwoRouteScenario& s,
                                        int max_denominator) {
  s.validate();
  const int d = common_denominator(s, max_denominator);
  const int a = scaled(s.a, d), b = scaled(s.b, d);
  const int a3 = scaled(s.a + s.x, d), b3 = scaled(s.b + s.y, d);
  if (a3 < 1 || b3 < 1)
    throw ValidationError("scaled link 3 time must be >= 1");

  StdNetwork net({"a", "b", "c"},
                 {{0, "", "a"}, {1, "a", "b"}, {2, "b", "c"}, {3, "b", "c"}}, 0,
                 Destination{std::nullopt, "c"}, 2);
  // Layout r x K x m with links (0, 1, 2, 3). Link 1 separates the two
  // states at period 1; links 2 and 3 carry the scenario at period 1.
  std::vector<int> times{
      0, 1, 2, 1,  0, 1, a, a3,   // state 1
      0, 1, 2, 1,  0, 2, b, b3};  // state 2
  SupportPointSet spp(net, {s.p, 1.0 - s.p}, std::move(times));
  State initial = origin_state(net, spp);
  return {std::move(net), std::move(spp), std::move(initial), d};
}

namespace {

double mixture(double p, double r1, double r2) {
  return (p * (r2 + 1.0) * r1 + (1.0 - p) * (r1 + 1.0) * r2) /
         (p * (r2 + 1.0) + (1.0 - p) * (r1 + 1.0));
}

}  // namespace

RatioTable closed_form_ratios(const TwoRouteScenario& s) {
  s.validate();
  RatioTable t;
  t.recursive.state1 = std::exp(s.x);
  t.recursive.state2 = std::exp(s.y);
  t.recursive.marginal = mixture(s.p, t.recursive.state1, t.recursive.state2);
  t.nonrecursive.state1 = std::exp(s.p * s.x);
  t.nonrecursive.state2 = std::exp(s.y - s.p * s.y);
  t.nonrecursive.marginal =
      mixture(s.p, t.nonrecursive.state1, t.nonrecursive.state2);
  return t;
}

RatioTable pipeline_ratios(const TwoRouteScenario& s) {
  const TwoRouteNetwork tr = build_two_route_network(s);
  const auto& net = tr.network;
  const auto& spp = tr.support_points;
  LinkUtilitySpec utility;
  utility.beta = {-1.0 / tr.time_scale};

  const State s1{1, 1, EventCollection({0})};
  const State s2{1, 1, EventCollection({1})};

  RatioTable t;
  const ValueFunction vf = solve_value_functions(net, spp, utility, tr.initial);
  auto rec_state = [&](const State& st) {
    const std::size_t u = *vf.graph().find(st);
    const auto t2 = *vf.graph().transition_index(u, 2);
    const auto t3 = *vf.graph().transition_index(u, 3);
    return std::exp(vf.log_choice_prob(u, t2) - vf.log_choice_prob(u, t3));
  };
  t.recursive.state1 = rec_state(s1);
  t.recursive.state2 = rec_state(s2);

  auto marginal = [](const std::vector<SequenceProbability>& seqs) {
    double p2 = 0.0, p3 = 0.0;
    for (const auto& sp : seqs) (sp.sequence.states[2].link == 2 ? p2 : p3) += sp.probability;
    return p2 / p3;
  };
  t.recursive.marginal = marginal(sequence_probabilities(vf));

  const auto nr = make_nonrecursive_logit(net, spp, utility, tr.initial);
  auto nr_state = [&](const State& st) {
    double p2 = 0.0, p3 = 0.0;
    const auto probs = nr.policy_probabilities();
    for (std::size_t i = 0; i < probs.size(); ++i)
      (*nr.choice_set().policies[i].decision(st) == 2 ? p2 : p3) += probs[i];
    return p2 / p3;
  };
  t.nonrecursive.state1 = nr_state(s1);
  t.nonrecursive.state2 = nr_state(s2);
  t.nonrecursive.marginal = marginal(nr.sequence_probabilities());
  return t;
}

RatioComparison ratio_table(const TwoRouteScenario& s) {
  RatioComparison c{closed_form_ratios(s), pipeline_ratios(s), 0.0};
  auto diff = [&](double closed, double pipe) {
    c.max_relative_difference =
        std::max(c.max_relative_difference,
                 std::abs(closed - pipe) / std::max(1.0, std::abs(closed)));
  };
  diff(c.closed_form.recursive.state1, c.pipeline.recursive.state1);
  diff(c.closed_form.recursive.state2, c.pipeline.recursive.state2);
  diff(c.closed_form.recursive.marginal, c.pipeline.recursive.marginal);
  diff(c.closed_form.nonrecursive.state1, c.pipeline.nonrecursive.state1);
  diff(c.closed_form.nonrecursive.state2, c.pipeline.nonrecursive.state2);
  diff(c.closed_form.nonrecursive.marginal, c.pipeline.nonrecursive.marginal);
  return c;
}

Dominance dominance_class(const TwoRouteScenario& s) {
  if (s.x == 0.0 && s.y == 0.0) return Dominance::equal;
  if (s.x >= 0.0 && s.y >= 0.0) return Dominance::route2_dominant;
  if (s.x <= 0.0 && s.y <= 0.0) return Dominance::route3_dominant;
  return Dominance::nondominated;
}

std::string to_string(Dominance d) {
  switch (d) {
    case Dominance::equal: return "equal";
    case Dominance::route2_dominant: return "route2_dominant";
    case Dominance::route3_dominant: return "route3_dominant";
    case Dominance::nondominated: return "nondominated";
  }
  return "?";
}

double margin_from_ratio(double r) { return std::abs(r - 1.0) / (r + 1.0); }

Extremeness extremeness_check(const RatioTable& t, double tolerance) {
  const double rec = margin_from_ratio(t.recursive.marginal);
  const double nr = margin_from_ratio(t.nonrecursive.marginal);
  if (std::abs(rec - nr) <= tolerance) return Extremeness::equal;
  return rec > nr ? Extremeness::recursive_more_extreme
                  : Extremeness::nonrecursive_more_extreme;
}

Extremeness extremeness_check(const TwoRouteScenario& s, double tolerance) {
  return extremeness_check(closed_form_ratios(s), tolerance);
}

std::string to_string(Extremeness e) {
  switch (e) {
    case Extremeness::recursive_more_extreme: return "recursive_more_extreme";
    case Extremeness::nonrecursive_more_extreme: return "nonrecursive_more_extreme";
    case Extremeness::equal: return "equal";
  }
  return "?";
}

double GridAxis::at(int i) const {
  if (count <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / (count - 1);
}

std::size_t SweepGrid::size() const {
  return static_cast<std::size_t>(std::max(x.count, 0)) *
         static_cast<std::size_t>(std::max(y.count, 0)) *
         static_cast<std::size_t>(std::max(p.count, 0));
}

TwoRouteScenario SweepGrid::scenario(std::size_t i) const {
  const auto np = static_cast<std::size_t>(p.count);
  const auto ny = static_cast<std::size_t>(y.count);
  return {a, b, x.at(static_cast<int>(i / (np * ny))),
          y.at(static_cast<int>(i / np % ny)), p.at(static_cast<int>(i % np))};
}

SweepRow evaluate_scenario(const TwoRouteScenario& s) {
  SweepRow row;
  row.scenario = s;
  row.ratios = ratio_table(s);
  row.dominance = dominance_class(s);
  row.extremeness = extremeness_check(row.ratios.closed_form);
  row.recursive_margin = margin_from_ratio(row.ratios.closed_form.recursive.marginal);
  row.nonrecursive_margin =
      margin_from_ratio(row.ratios.closed_form.nonrecursive.marginal);
  return row;
}

std::vector<SweepRow> sweep_serial(const SweepGrid& grid) {
  std::vector<SweepRow> rows(grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i] = evaluate_scenario(grid.scenario(i));
  return rows;
}

std::vector<SweepRow> sweep(const SweepGrid& grid) {
  std::vector<SweepRow> rows(grid.size());
  const auto n = static_cast<std::int64_t>(rows.size());
  // Exceptions must not cross the parallel region; rethrow the first one.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      rows[static_cast<std::size_t>(i)] =
          evaluate_scenario(grid.scenario(static_cast<std::size_t>(i)));
    } catch (...) {
#pragma omp critical(routelogit_sweep_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return rows;
}

namespace {

double max_sequence_divergence(const std::vector<SequenceProbability>& a,
                               const std::vector<SequenceProbability>& b) {
  std::map<std::vector<State>, double> pb;
  for (const auto& s : b) pb[s.sequence.states] = s.probability;
  double d = 0.0;
  for (const auto& s : a) {
    auto it = pb.find(s.sequence.states);
    const double other = it == pb.end() ? 0.0 : it->second;
    d = std::max(d, std::abs(s.probability - other));
    if (it != pb.end()) pb.erase(it);
  }
  for (const auto& [_, p] : pb) d = std::max(d, p);
  return d;
}

}  // namespace

EquivalenceReport equivalence_report(const StdNetwork& net,
                                     const SupportPointSet& spp,
                                     const LinkUtilitySpec& utility,
                                     const std::vector<double>& mus,
                                     double tolerance) {
  EquivalenceReport rep;
  rep.support_points = spp.size();
  const State initial = origin_state(net, spp);

  if (spp.size() == 1) {
    const auto vf = solve_value_functions(net, spp, utility, initial);
    const auto nr = make_nonrecursive_logit(net, spp, utility, initial);
    const auto pr = path_probabilities(vf, net, spp);
    const auto pn = nr.path_probabilities();
    double d = 0.0;
    std::map<std::vector<LinkId>, double> other;
    for (const auto& p : pn) other[p.path] = p.probability;
    for (const auto& p : pr) {
      d = std::max(d, std::abs(p.probability - other[p.path]));
      other.erase(p.path);
    }
    for (const auto& [_, p] : other) d = std::max(d, p);
    rep.deterministic_divergence = d;
    rep.deterministic_equal = d <= tolerance;
  }

  // The choice set and state graph do not depend on mu.
  const auto choice_set = enumerate_policies(net, spp, initial);
  for (double mu : mus) {
    LinkUtilitySpec u = utility;
    u.mu = mu;
    const auto vf = solve_value_functions(net, spp, u, initial);
    const NonRecursiveLogit nr(net, spp, choice_set, u);
    rep.divergence.push_back(
        {mu, max_sequence_divergence(sequence_probabilities(vf),
                                     nr.sequence_probabilities())});
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.divergence.size(); ++i)
    if (rep.divergence[i].max_divergence > rep.divergence[i - 1].max_divergence)
      rep.monotone = false;
  return rep;
}

}  // namespace routelogit
