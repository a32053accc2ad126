// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// below; exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "../support/fixtures.hpp"
#include "routelogit/comparison.hpp"
#include "routelogit/estimation.hpp"
#include "routelogit/io.hpp"
#include "routelogit/nonrecursive_logit.hpp"
#include "routelogit/policy.hpp"
#include "routelogit/recursive_logit.hpp"
#include "routelogit/simulation.hpp"

using namespace routelogit;
using fixtures::st;

namespace {

constexpr double kPrintedTol = 5e-5;      // values printed to 4 decimals
constexpr double kClosedFormTol = 1e-12;
constexpr double kUtilityTol = 1e-12;
constexpr double kRatioTol = 1e-10;       // relative, max(1, |closed form|)
constexpr double kDeterministicTol = 1e-10;
constexpr double kSmallMuMass = 0.999;
constexpr double kNormalizationTol = 1e-10;
constexpr double kOracleTol = 1e-12;
constexpr double kSigmas = 3.0;
constexpr std::uint64_t kRolloutSamples = 1'000'000;
constexpr double kBetaTol = 0.05;
constexpr double kGradientTol = 1e-6;

// Seeds fixed before any run.
constexpr std::uint64_t kNetworkSeed = 1;
constexpr std::uint64_t kRolloutSeed = 1;
constexpr std::uint64_t kEstimationSeed = 42;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %s  (%s)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

void note(const std::string& text) { std::printf("      %s\n", text.c_str()); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NetworkModel example() {
  return load_network_file(std::string(ROUTELOGIT_DATA_DIR) + "/three_node.json");
}

void example_likelihoods() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = example();
  const State o = origin_state(m.network, m.support_points);
  const auto vf = solve_value_functions(m.network, m.support_points, {}, o);
  const auto nr = make_nonrecursive_logit(m.network, m.support_points, {}, o);
  const auto rec = sequence_probabilities(vf);
  const auto non = nr.sequence_probabilities();
  const auto paths = nr.path_probabilities();
  const double rec_expected[4] = {0.1345, 0.25, 0.3655, 0.25};
  const double nr_expected[4] = {0.1888, 0.25, 0.3112, 0.25};

  // Sequence order of the printed table: v1 via 2, v2 via 2, v1 via 3, v2 via 3.
  const StateSequence order[4] = {fixtures::sigma(1), fixtures::sigma(3),
                                  fixtures::sigma(2), fixtures::sigma(4)};
  auto find = [](const std::vector<SequenceProbability>& v, const StateSequence& s) {
    for (const auto& x : v)
      if (x.sequence == s) return x.probability;
    return -1.0;
  };
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    worst = std::max(worst, std::abs(find(rec, order[i]) - rec_expected[i]));
    worst = std::max(worst, std::abs(find(non, order[i]) - nr_expected[i]));
  }
  bool ok = rec.size() == 4 && non.size() == 4 && paths.size() == 2;
  if (ok) {
    worst = std::max(worst, std::abs(paths[0].probability - 0.4388));
    worst = std::max(worst, std::abs(paths[1].probability - 0.5612));
  }
  const double secs = seconds_since(t0);
  ok = ok && worst <= kPrintedTol && secs < 1.0;
  report(ok, "example sequence likelihoods and path masses",
         "max |diff| " + fmt("%.2e", worst) + " <= 5e-5, " + fmt("%.3f", secs) +
             " s < 1 s");
}

void closed_form_choices() {
  const auto m = example();
  const State o = origin_state(m.network, m.support_points);
  const auto vf = solve_value_functions(m.network, m.support_points, {}, o);
  const double d1 = std::abs(link_choice_prob(vf, st(1, 1, {0}), 2) -
                             1.0 / (1.0 + std::exp(1.0)));
  const double d2 = std::abs(link_choice_prob(vf, st(1, 1, {1}), 2) - 0.5);
  const double d3 = std::abs(link_choice_prob(vf, o, 1) - 1.0);
  const double worst = std::max({d1, d2, d3});
  report(worst <= kClosedFormTol, "closed-form link choice probabilities",
         "max |diff| " + fmt("%.2e", worst) + " <= 1e-12");
}

void policy_utilities() {
  const auto m = example();
  const State o = origin_state(m.network, m.support_points);
  const auto cs = enumerate_policies(m.network, m.support_points, o);
  const double expected[4] = {3.5, 3.5, 3.0, 3.0};
  double worst = cs.policies.size() == 4 ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < cs.policies.size() && i < 4; ++i)
    worst = std::max(worst, std::abs(-policy_expected_utility(
                                         m.network, m.support_points,
                                         cs.policies[i], {}) -
                                     expected[i]));
  report(worst <= kUtilityTol, "policy expected travel times",
         std::to_string(cs.policies.size()) + " policies, max |diff| " +
             fmt("%.2e", worst) + " <= 1e-12");
}

SweepGrid acceptance_grid() {
  const double a = 2.0, b = 3.0;
  return {a, b, {-0.9 * a, 5.0, 9}, {-0.9 * b, 5.0, 8}, {0.05, 0.95, 7}};
}

void ratio_formulas(const std::vector<SweepRow>& rows, double secs) {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.ratios.max_relative_difference);
  const bool ok = rows.size() >= 500 && worst <= kRatioTol && secs < 10.0;
  report(ok, "two-route ratio formulas match the model pipeline",
         std::to_string(rows.size()) + " scenarios, max rel diff " +
             fmt("%.2e", worst) + " <= 1e-10, " + fmt("%.3f", secs) + " s < 10 s");
}

void extremeness(const std::vector<SweepRow>& rows) {
  int dominant = 0, violations = 0, rec = 0, nr = 0;
  for (const auto& r : rows) {
    const auto& s = r.scenario;
    if ((s.x > 0 && s.y > 0) || (s.x < 0 && s.y < 0)) {
      ++dominant;
      if (!(r.recursive_margin > r.nonrecursive_margin)) ++violations;
    } else if (r.dominance == Dominance::nondominated) {
      rec += r.extremeness == Extremeness::recursive_more_extreme;
      nr += r.extremeness == Extremeness::nonrecursive_more_extreme;
    }
  }
  const bool ok = dominant > 0 && violations == 0 && rec >= 1 && nr >= 1;
  report(ok, "recursive model more extreme under dominance",
         std::to_string(dominant) + " dominant scenarios, " +
             std::to_string(violations) + " violations; nondominated witnesses: " +
             std::to_string(rec) + " recursive, " + std::to_string(nr) +
             " non-recursive");
}

void deterministic_equivalence() {
  std::mt19937_64 rng(kNetworkSeed);
  fixtures::RandomNetworkOptions o;
  o.deterministic = true;
  o.max_links = 8;
  o.max_nodes = 5;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto m = fixtures::random_network(rng, o);
    const auto rep = equivalence_report(m.network, m.support_points, {}, {1.0});
    worst = std::max(worst, rep.deterministic_divergence.value_or(INFINITY));
  }
  report(worst <= kDeterministicTol, "deterministic networks: models coincide",
         "20 networks, max per-path diff " + fmt("%.2e", worst) + " <= 1e-10");
}

void small_mu_equivalence() {
  const auto m = example();
  const State o = origin_state(m.network, m.support_points);
  const auto cs = enumerate_policies(m.network, m.support_points, o);
  // The policy taking link 3 in both states.
  const RoutingPolicy& target = cs.policies.at(3);

  LinkUtilitySpec u;
  u.mu = 1e-4;
  const auto vf = solve_value_functions(m.network, m.support_points, u, o);
  const NonRecursiveLogit nr(m.network, m.support_points, cs, u);
  auto mass = [&](const std::vector<SequenceProbability>& seqs) {
    double s = 0.0;
    for (const auto& sp : seqs)
      if (contains(target, sp.sequence)) s += sp.probability;
    return s;
  };
  const double rec_mass = mass(sequence_probabilities(vf));
  const double nr_mass = mass(nr.sequence_probabilities());

  const auto rep = equivalence_report(m.network, m.support_points, {});
  std::string div;
  for (const auto& d : rep.divergence)
    div += (div.empty() ? "" : ", ") + fmt("%.3g", d.max_divergence);
  const bool ok = rec_mass >= kSmallMuMass && nr_mass >= kSmallMuMass && rep.monotone;
  report(ok, "small-scale limit: mass on the always-link-3 policy, shrinking divergence",
         "mass recursive " + fmt("%.6f", rec_mass) + ", non-recursive " +
             fmt("%.6f", nr_mass) + " (need >= 0.999); divergence at mu 1,0.1,0.01,1e-4: " +
             div + (rep.monotone ? " monotone" : " NOT monotone"));
  if (!ok) {
    // Links 2 and 3 tie (both 2) in the second state, so any logit splits
    // that state evenly for every mu: the mass is capped at 0.5 + 0.25.
    const double p_v1 = link_choice_prob(vf, st(1, 1, {0}), 3);
    const double p_v2 = link_choice_prob(vf, st(1, 1, {1}), 3);
    note("P(link 3 | first state) = " + fmt("%.6f", p_v1) +
         ", P(link 3 | second state) = " + fmt("%.6f", p_v2) +
         " (tie: both links take 2)");
    double rec_opt = 0.0;
    for (const auto& sp : sequence_probabilities(vf))
      for (std::size_t k : {2u, 3u})
        if (contains(cs.policies[k], sp.sequence)) {
          rec_opt += sp.probability;
          break;
        }
    note("mass on sequences of the tied optimal policies (3,2) and (3,3): " +
         fmt("%.6f", rec_opt));
  }
}

void oracle_equivalence() {
  std::mt19937_64 rng(kNetworkSeed);
  const int networks = 10;
  double worst_norm = 0.0, worst_oracle = 0.0, worst_z = 0.0;
  int comparisons = 0;
  for (int n = 0; n < networks; ++n) {
    const auto m = fixtures::random_network(rng);  // <= 3 points, <= 6 links, K <= 3
    const State o = origin_state(m.network, m.support_points);
    const auto vf = solve_value_functions(m.network, m.support_points, {}, o);
    const auto nr = make_nonrecursive_logit(m.network, m.support_points, {}, o);
    const auto rec = sequence_probabilities(vf);
    const auto non = nr.sequence_probabilities();

    double sr = 0.0, sn = 0.0;
    for (const auto& s : rec) sr += s.probability;
    for (const auto& s : non) sn += s.probability;
    worst_norm = std::max({worst_norm, std::abs(sr - 1.0), std::abs(sn - 1.0)});

    // Brute force over (policy, support point) pairs.
    const auto& ps = nr.choice_set().policies;
    std::vector<double> w;
    double den = 0.0;
    for (const auto& p : ps) {
      w.push_back(std::exp(
          -fixtures::rollout_expected_time(m.network, m.support_points, p)));
      den += w.back();
    }
    std::map<StateSequence, double> brute;
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (int r = 0; r < static_cast<int>(m.support_points.size()); ++r)
        brute[fixtures::rollout(m.network, m.support_points, ps[i], r)] +=
            w[i] / den * m.support_points.probability(r);
    for (const auto& s : non) {
      const double b = brute.count(s.sequence) ? brute[s.sequence] : 0.0;
      worst_oracle = std::max(worst_oracle, std::abs(nr.sequence_likelihood(s.sequence) - b));
    }

    // Monte Carlo rollouts of the recursive model.
    const auto counts = simulate_counts(RecursiveSampler(vf), kRolloutSamples,
                                        kRolloutSeed + n);
    for (std::size_t i = 0; i < rec.size(); ++i) {
      const double p = rec[i].probability;
      const double freq = double(counts[i]) / kRolloutSamples;
      const double sd = std::sqrt(p * (1 - p) / kRolloutSamples);
      const double z = sd > 0 ? std::abs(freq - p) / sd : (freq == p ? 0.0 : INFINITY);
      worst_z = std::max(worst_z, z);
      ++comparisons;
    }
  }
  const bool ok = worst_norm <= kNormalizationTol && worst_oracle <= kOracleTol &&
                  worst_z <= kSigmas;
  report(ok, "random networks: normalization, marginalization oracle, rollouts",
         std::to_string(networks) + " networks; max |sum-1| " +
             fmt("%.2e", worst_norm) + ", max |lik - brute force| " +
             fmt("%.2e", worst_oracle) + ", max |z| over " +
             std::to_string(comparisons) + " sequences " + fmt("%.2f", worst_z) +
             " <= 3");
}

void estimation_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = example();
  const State o = origin_state(m.network, m.support_points);
  const std::vector<double> beta0{-0.5};
  std::string detail;
  bool ok = true;
  for (Model model : {Model::recursive, Model::nonrecursive}) {
    ObservationSet obs;
    if (model == Model::recursive)
      obs = simulate_sequences(
          RecursiveSampler(solve_value_functions(m.network, m.support_points, {}, o)),
          10'000, kEstimationSeed);
    else
      obs = simulate_sequences(
          NonRecursiveSampler(make_nonrecursive_logit(m.network, m.support_points, {}, o)),
          10'000, kEstimationSeed);
    const LikelihoodEvaluator ev(m.network, m.support_points, obs, model);
    const auto res = fit(ev, beta0, 1.0);
    auto f = [&](std::span<const double> b) { return ev.log_likelihood(b, 1.0); };
    const double g = std::abs(finite_difference_gradient(f, res.beta_hat)[0]);
    const double err = std::abs(res.beta_hat[0] + 1.0);
    ok = ok && err <= kBetaTol && g < kGradientTol;
    detail += to_string(model) + " beta " + fmt("%.4f", res.beta_hat[0]) +
              " |grad| " + fmt("%.1e", g) + "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 60.0;
  report(ok, "estimation recovers beta = -1 from 10^4 simulated sequences",
         detail + fmt("%.2f", secs) + " s < 60 s");
}

}  // namespace

int main() {
  try {
    example_likelihoods();
    closed_form_choices();
    policy_utilities();
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = sweep(acceptance_grid());
    ratio_formulas(rows, seconds_since(t0));
    extremeness(rows);
    deterministic_equivalence();
    small_mu_equivalence();
    oracle_equivalence();
    estimation_recovery();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance suite aborted  (%s)\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
