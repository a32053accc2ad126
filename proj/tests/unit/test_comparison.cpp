#include <cmath>
#include <random>

#include "doctest.h"
#include "../support/fixtures.hpp"
#include "routelogit/comparison.hpp"
#include "routelogit/error.hpp"
#include "routelogit/nonrecursive_logit.hpp"
#include "routelogit/recursive_logit.hpp"

using namespace routelogit;

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(TwoRouteScenario({0, 1, 0, 0, 0.5}).validate(), ValidationError);
  CHECK_THROWS_AS(TwoRouteScenario({1, 1, -1, 0, 0.5}).validate(), ValidationError);
  CHECK_THROWS_AS(TwoRouteScenario({1, 1, 0, -1.5, 0.5}).validate(), ValidationError);
  CHECK_THROWS_AS(TwoRouteScenario({1, 1, 0, 0, 1.0}).validate(), ValidationError);
  CHECK_NOTHROW(TwoRouteScenario({1, 1, -0.5, 3, 0.2}).validate());
}

TEST_CASE("two-route network of the example scenario is the example network") {
  const auto tr = build_two_route_network({3, 2, -1, 0, 0.5});
  const auto fig = fixtures::three_node();
  CHECK(tr.time_scale == 1);
  CHECK(network_to_json(tr.network, tr.support_points) ==
        network_to_json(fig.network, fig.support_points));
}

TEST_CASE("two-route network scales non-integer times") {
  const auto tr = build_two_route_network({2, 3, -1.8, 0.6, 0.25});
  CHECK(tr.time_scale == 5);
  const auto& spp = tr.support_points;
  CHECK(spp.travel_time(0, 1, tr.network.index_of(2)) == 10);
  CHECK(spp.travel_time(0, 1, tr.network.index_of(3)) == 1);
  CHECK(spp.travel_time(1, 1, tr.network.index_of(3)) == 18);
  CHECK(spp.probability(0) == 0.25);
}

TEST_CASE("zero offsets make the links identical and the models agree") {
  const auto tr = build_two_route_network({2, 2, 0, 0, 0.3});
  for (int r = 0; r < 2; ++r)
    CHECK(tr.support_points.travel_time(r, 1, tr.network.index_of(2)) ==
          tr.support_points.travel_time(r, 1, tr.network.index_of(3)));
  const auto t = closed_form_ratios({2, 2, 0, 0, 0.3});
  for (double v : {t.recursive.state1, t.recursive.state2, t.recursive.marginal,
                   t.nonrecursive.state1, t.nonrecursive.state2,
                   t.nonrecursive.marginal})
    CHECK(v == 1.0);
  CHECK(extremeness_check(TwoRouteScenario{2, 2, 0, 0, 0.3}) == Extremeness::equal);
}

TEST_CASE("ratios of the example scenario") {
  const TwoRouteScenario s{3, 2, -1, 0, 0.5};
  const auto c = ratio_table(s);
  CHECK(c.closed_form.recursive.state1 == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(c.max_relative_difference <= 1e-10);
  const auto m = fixtures::three_node();
  const auto vf = solve_value_functions(m.network, m.support_points, {},
                                        origin_state(m.network, m.support_points));
  const auto v1 = fixtures::st(1, 1, {0});
  CHECK(link_choice_prob(vf, v1, 2) / link_choice_prob(vf, v1, 3) ==
        doctest::Approx(c.closed_form.recursive.state1).epsilon(1e-13));
  CHECK(extremeness_check(s) == Extremeness::recursive_more_extreme);
  // Path-level margins: 0.6155 - 0.3845 against 0.5612 - 0.4388.
  CHECK(margin_from_ratio(c.closed_form.recursive.marginal) ==
        doctest::Approx(0.6155 - 0.3845).epsilon(1e-3));
  CHECK(margin_from_ratio(c.closed_form.nonrecursive.marginal) ==
        doctest::Approx(0.5612 - 0.4388).epsilon(1e-3));
}

TEST_CASE("closed forms agree with the model pipeline on random scenarios") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> ab(1, 6), off(-50, 50), pp(1, 19);
  int tested = 0;
  while (tested < 100) {
    TwoRouteScenario s{double(ab(rng)), double(ab(rng)), off(rng) / 10.0,
                       off(rng) / 10.0, pp(rng) / 20.0};
    if (s.x <= -s.a || s.y <= -s.b) continue;
    CHECK(ratio_table(s).max_relative_difference <= 1e-10);
    ++tested;
  }
}

TEST_CASE("dominance classes") {
  CHECK(dominance_class({1, 1, 1, 2, 0.5}) == Dominance::route2_dominant);
  CHECK(dominance_class({1, 1, 0, 0, 0.5}) == Dominance::equal);
  CHECK(dominance_class({1, 1, 1, -0.5, 0.5}) == Dominance::nondominated);
  CHECK(dominance_class({1, 1, -0.5, -0.5, 0.5}) == Dominance::route3_dominant);
  CHECK(dominance_class({2, 2, 1, 1, 0.5}) == Dominance::route2_dominant);
}

TEST_CASE("dominant scenarios: odds ordering and recursive extremeness on a grid") {
  for (int i = 1; i <= 50; ++i)
    for (int j = 1; j <= 50; ++j)
      for (int k = 1; k <= 19; ++k) {
        const double x = 0.1 * i, y = 0.1 * j, p = 0.05 * k;
        const TwoRouteScenario s{1, 1, x, y, p};
        const auto t = closed_form_ratios(s);
        CHECK((t.recursive.state1 > t.nonrecursive.state1 && t.nonrecursive.state1 > 1));
        CHECK((t.recursive.state2 > t.nonrecursive.state2 && t.nonrecursive.state2 > 1));
        const auto pr2 = t.recursive.marginal / (1 + t.recursive.marginal);
        const auto pn2 = t.nonrecursive.marginal / (1 + t.nonrecursive.marginal);
        CHECK((2 * pr2 - 1 > 2 * pn2 - 1 && 2 * pn2 - 1 > 0));
        CHECK(extremeness_check(s) == Extremeness::recursive_more_extreme);
        CHECK(extremeness_check(TwoRouteScenario{1, 1, -x / 11, -y / 11, p}) ==
              Extremeness::recursive_more_extreme);
      }
}

TEST_CASE("nondominated scenarios go both ways") {
  bool rec = false, nr = false;
  for (int i = -9; i <= 50 && !(rec && nr); ++i)
    for (int j = -9; j <= 50; ++j)
      for (int k = 1; k <= 19; ++k) {
        const TwoRouteScenario s{1, 1, 0.1 * i, 0.1 * j, 0.05 * k};
        if (dominance_class(s) != Dominance::nondominated) continue;
        const auto e = extremeness_check(s);
        rec = rec || e == Extremeness::recursive_more_extreme;
        nr = nr || e == Extremeness::nonrecursive_more_extreme;
      }
  CHECK(rec);
  CHECK(nr);
}

TEST_CASE("sweep: grid order and serial/parallel agreement") {
  SweepGrid g{2, 3, {-1.8, 5, 4}, {-2.7, 5, 3}, {0.05, 0.95, 5}};
  CHECK(g.size() == 60);
  const auto s = g.scenario(7);
  CHECK(s.x == -1.8);
  CHECK(s.y == g.y.at(1));
  CHECK(s.p == g.p.at(2));
  const auto a = sweep_serial(g);
  const auto b = sweep(g);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ratios.closed_form.recursive.marginal ==
          b[i].ratios.closed_form.recursive.marginal);
    CHECK(a[i].ratios.pipeline.nonrecursive.marginal ==
          b[i].ratios.pipeline.nonrecursive.marginal);
    CHECK(a[i].extremeness == b[i].extremeness);
  }
  SweepGrid bad{2, 3, {-2.5, 5, 3}, {0, 1, 2}, {0.5, 0.5, 1}};
  CHECK_THROWS_AS(sweep(bad), ValidationError);
}

TEST_CASE("equivalence report: deterministic example variant") {
  // Only support point v2 of the example: links 2 and 3 both take 2.
  const char* doc = R"({"nodes": ["a", "b", "c"],
    "links": [{"id": 0, "to": "a"}, {"id": 1, "from": "a", "to": "b"},
              {"id": 2, "from": "b", "to": "c"}, {"id": 3, "from": "b", "to": "c"}],
    "origin_link": 0, "destination_node": "c", "horizon": 2,
    "support_points": [
      {"probability": 1.0, "travel_times": {"1": [1, 2], "2": [2, 2], "3": [1, 2]}}]})";
  const auto m = load_network(doc);
  const auto rep = equivalence_report(m.network, m.support_points, {});
  REQUIRE(rep.deterministic_divergence.has_value());
  CHECK(rep.deterministic_equal);
  const auto vf = solve_value_functions(m.network, m.support_points, {},
                                        origin_state(m.network, m.support_points));
  for (const auto& p : path_probabilities(vf, m.network, m.support_points))
    CHECK(p.probability == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("equivalence report: random deterministic networks") {
  std::mt19937_64 rng(41);
  fixtures::RandomNetworkOptions o;
  o.deterministic = true;
  o.max_links = 8;
  o.max_nodes = 5;
  for (int i = 0; i < 20; ++i) {
    const auto m = fixtures::random_network(rng, o);
    const auto rep = equivalence_report(m.network, m.support_points, {});
    CHECK(*rep.deterministic_divergence < 1e-10);
  }
}

TEST_CASE("equivalence report: example divergence shrinks with mu") {
  const auto m = fixtures::three_node();
  const auto rep = equivalence_report(m.network, m.support_points, {});
  CHECK_FALSE(rep.deterministic_divergence.has_value());
  REQUIRE(rep.divergence.size() == 4);
  CHECK(rep.monotone);
  CHECK(rep.divergence[0].max_divergence ==
        doctest::Approx(0.1887703344 - 0.1344707107).epsilon(1e-8));
  CHECK(rep.divergence[3].max_divergence < 1e-12);
}
