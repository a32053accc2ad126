// routelogit: command-line front end for the recursive / non-recursive
// routing-policy logit models.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "routelogit/comparison.hpp"
#include "routelogit/error.hpp"
#include "routelogit/estimation.hpp"
#include "routelogit/io.hpp"
#include "routelogit/nonrecursive_logit.hpp"
#include "routelogit/policy.hpp"
#include "routelogit/recursive_logit.hpp"
#include "routelogit/simulation.hpp"

using namespace routelogit;
using nlohmann::json;

namespace {

struct RunConfig {
  std::uint64_t seed = 1;
  double mu = 1.0;
  std::vector<double> beta{-1.0};
  std::uint64_t cap_policies = 1'000'000;
  std::string output;

  void validate() const {
    if (!(mu > 0.0)) throw ValidationError("--mu must be > 0");
    if (cap_policies == 0) throw ValidationError("--cap-policies must be positive");
    if (beta.empty()) throw ValidationError("--beta needs at least one value");
  }
  LinkUtilitySpec utility() const {
    LinkUtilitySpec u;
    u.beta = beta;
    u.mu = mu;
    u.attributes = beta.size() == 2 ? travel_time_and_constant_attributes()
                                    : travel_time_attribute();
    return u;
  }
};

// Writes to --output when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot write '" + path + "'");
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<Model> selected_models(const std::string& which) {
  if (which == "both") return {Model::recursive, Model::nonrecursive};
  return {parse_model(which)};
}

std::string csv_row(std::initializer_list<std::string> fields) {
  std::string s;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) s += ',';
    s += csv_field(f);
    first = false;
  }
  return s + '\n';
}

int run_validate(const RunConfig& cfg, const std::string& network_path) {
  const auto m = load_network_file(network_path);
  const auto& net = m.network;
  const auto& spp = m.support_points;
  const State init = origin_state(net, spp);
  Sink sink(cfg.output);
  auto& os = sink.out();
  os << "network ok\n";
  os << "nodes " << net.nodes().size() << "\n";
  os << "links " << net.link_count() << "\n";
  os << "periods " << spp.periods() << "\n";
  os << "support_points " << spp.size() << "\n";
  for (int t = 0; t < spp.periods(); ++t) {
    os << "event_collections t=" << t << " ";
    const auto& part = event_collections_at(spp, t);
    for (std::size_t i = 0; i < part.classes.size(); ++i)
      os << (i ? " " : "") << to_string(part.classes[i]);
    os << "\n";
  }
  os << "origin_state " << to_string(init) << "\n";
  os << "max_trip_time " << max_trip_time(net, spp, init.time) << "\n";
  return 0;
}

int run_enumerate(const RunConfig& cfg, const std::string& network_path,
                  bool count_only) {
  const auto m = load_network_file(network_path);
  const State init = origin_state(m.network, m.support_points);
  Sink sink(cfg.output);
  if (count_only) {
    sink.out() << count_policies(m.network, m.support_points, init) << "\n";
    return 0;
  }
  const auto cs =
      enumerate_policies(m.network, m.support_points, init, cfg.cap_policies);
  const auto u = cfg.utility();
  json doc;
  doc["initial_state"] = state_to_json(init);
  doc["count"] = cs.policies.size();
  json list = policies_to_json(cs);
  for (std::size_t i = 0; i < cs.policies.size(); ++i)
    list[i]["expected_utility"] =
        policy_expected_utility(m.network, m.support_points, cs.policies[i], u);
  doc["policies"] = list;
  sink.out() << doc.dump(2) << "\n";
  return 0;
}

int run_predict(const RunConfig& cfg, const std::string& network_path,
                const std::string& which) {
  const auto m = load_network_file(network_path);
  const auto& net = m.network;
  const auto& spp = m.support_points;
  const State init = origin_state(net, spp);
  const auto u = cfg.utility();
  Sink sink(cfg.output);
  auto& os = sink.out();
  os << "record,model,item,detail,probability\n";
  for (Model model : selected_models(which)) {
    std::vector<SequenceProbability> seqs;
    if (model == Model::recursive) {
      const auto vf = solve_value_functions(net, spp, u, init);
      seqs = sequence_probabilities(vf);
    } else {
      const auto nr = make_nonrecursive_logit(net, spp, u, init, cfg.cap_policies);
      const auto probs = nr.policy_probabilities();
      for (std::size_t i = 0; i < probs.size(); ++i)
        os << csv_row({"policy", to_string(model), std::to_string(i + 1),
                       "utility=" + format_number(nr.policy_utilities()[i]),
                       format_number(probs[i])});
      seqs = nr.sequence_probabilities();
    }
    for (std::size_t i = 0; i < seqs.size(); ++i)
      os << csv_row({"sequence", to_string(model), std::to_string(i + 1),
                     to_string(seqs[i].sequence), format_number(seqs[i].probability)});
    const auto paths = aggregate_paths(seqs);
    for (std::size_t i = 0; i < paths.size(); ++i)
      os << csv_row({"path", to_string(model), std::to_string(i + 1),
                     path_string(paths[i].path), format_number(paths[i].probability)});
  }
  return 0;
}

int run_simulate(const RunConfig& cfg, const std::string& network_path,
                 const std::string& which, std::uint64_t samples) {
  const auto m = load_network_file(network_path);
  const auto& net = m.network;
  const auto& spp = m.support_points;
  const State init = origin_state(net, spp);
  const auto u = cfg.utility();
  ObservationSet obs;
  const Model model = parse_model(which);
  if (model == Model::recursive) {
    const auto vf = solve_value_functions(net, spp, u, init);
    obs = simulate_sequences(RecursiveSampler(vf), samples, cfg.seed);
  } else {
    const auto nr = make_nonrecursive_logit(net, spp, u, init, cfg.cap_policies);
    obs = simulate_sequences(NonRecursiveSampler(nr), samples, cfg.seed);
  }
  Sink sink(cfg.output);
  sink.out() << observations_to_json(obs).dump() << "\n";
  return 0;
}

int run_estimate(const RunConfig& cfg, const std::string& network_path,
                 const std::string& obs_path, const std::string& which,
                 const std::string& json_path) {
  const auto m = load_network_file(network_path);
  const auto& net = m.network;
  const auto& spp = m.support_points;
  const auto obs = load_observations(read_text_file(obs_path), net, spp);
  const auto u = cfg.utility();

  json doc = json::array();
  Sink sink(cfg.output);
  auto& os = sink.out();
  char line[256];
  std::snprintf(line, sizeof line, "%-13s %-6s %-17s %-17s %-17s %-10s %s\n",
                "model", "param", "estimate", "std_error", "log_likelihood",
                "iterations", "converged");
  os << line;
  for (Model model : selected_models(which)) {
    const LikelihoodEvaluator ev(net, spp, obs, model, u.attributes,
                                 cfg.cap_policies);
    const auto res = fit(ev, cfg.beta, cfg.mu);
    for (std::size_t j = 0; j < res.beta_hat.size(); ++j) {
      const std::string se =
          res.std_errors ? format_number((*res.std_errors)[j]) : "nan";
      std::snprintf(line, sizeof line, "%-13s %-6s %-17s %-17s %-17s %-10d %s\n",
                    to_string(model).c_str(), ("beta" + std::to_string(j)).c_str(),
                    format_number(res.beta_hat[j]).c_str(), se.c_str(),
                    format_number(res.log_likelihood).c_str(), res.iterations,
                    res.converged ? "yes" : "no");
      os << line;
    }
    json r;
    r["model"] = to_string(model);
    r["mu"] = cfg.mu;
    r["observations"] = obs.size();
    r["beta_hat"] = res.beta_hat;
    r["std_errors"] = res.std_errors ? json(*res.std_errors) : json(nullptr);
    r["log_likelihood"] = res.log_likelihood;
    r["gradient"] = res.gradient;
    r["iterations"] = res.iterations;
    r["converged"] = res.converged;
    doc.push_back(r);
  }
  if (!json_path.empty()) {
    std::ofstream jf(json_path, std::ios::binary);
    if (!jf) throw Error("cannot write '" + json_path + "'");
    jf << doc.dump(2) << "\n";
  }
  return 0;
}

const char* kRatioHeader =
    "a,b,x,y,p,recursive_state1,recursive_state2,recursive_marginal,"
    "nonrecursive_state1,nonrecursive_state2,nonrecursive_marginal,"
    "pipeline_max_rel_diff,dominance,extremeness\n";

std::string ratio_csv(const SweepRow& r) {
  const auto& s = r.scenario;
  const auto& c = r.ratios.closed_form;
  std::ostringstream os;
  for (double v : {s.a, s.b, s.x, s.y, s.p, c.recursive.state1, c.recursive.state2,
                   c.recursive.marginal, c.nonrecursive.state1,
                   c.nonrecursive.state2, c.nonrecursive.marginal,
                   r.ratios.max_relative_difference})
    os << format_number(v) << ',';
  os << to_string(r.dominance) << ',' << to_string(r.extremeness) << '\n';
  return os.str();
}

GridAxis parse_axis(const std::vector<double>& v, const char* name) {
  if (v.size() != 3 || v[2] < 1 || v[2] != static_cast<int>(v[2]))
    throw ValidationError(std::string("--") + name +
                          " expects lo,hi,count with integer count >= 1");
  return {v[0], v[1], static_cast<int>(v[2])};
}

int run_compare_equivalence(const RunConfig& cfg, const std::string& network_path) {
  const auto m = load_network_file(network_path);
  const auto rep = equivalence_report(m.network, m.support_points, cfg.utility());
  Sink sink(cfg.output);
  auto& os = sink.out();
  os << "check,mu,value\n";
  if (rep.deterministic_divergence)
    os << "deterministic_path_divergence," << format_number(cfg.mu) << ','
       << format_number(*rep.deterministic_divergence) << '\n';
  for (const auto& d : rep.divergence)
    os << "max_sequence_divergence," << format_number(d.mu) << ','
       << format_number(d.max_divergence) << '\n';
  os << "monotone,," << (rep.monotone ? "true" : "false") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive and non-recursive routing-policy logit models"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--mu", cfg.mu, "Logit scale parameter")->capture_default_str();
  app.add_option("--beta", cfg.beta,
                 "Utility coefficients (1 value: travel time; 2: time, constant)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--cap-policies", cfg.cap_policies,
                 "Maximum number of enumerated policies")
      ->capture_default_str();
  app.add_option("--output", cfg.output, "Output file (default stdout)");

  std::string network, observations, model = "both", json_path;
  std::uint64_t samples = 10000;
  bool count_only = false;

  auto* validate = app.add_subcommand("validate", "Load and validate a network");
  validate->add_option("network", network)->required();

  auto* enumerate = app.add_subcommand("enumerate-policies",
                                       "List all routing policies from the origin");
  enumerate->add_option("network", network)->required();
  enumerate->add_flag("--count", count_only, "Print only the policy count");

  auto* predict = app.add_subcommand("predict", "Sequence and path probabilities");
  predict->add_option("network", network)->required();
  predict->add_option("--model", model)
      ->check(CLI::IsMember({"recursive", "nonrecursive", "both"}))
      ->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Sample observed sequences");
  simulate->add_option("network", network)->required();
  std::string sim_model = "recursive";
  simulate->add_option("--model", sim_model)
      ->check(CLI::IsMember({"recursive", "nonrecursive"}))
      ->capture_default_str();
  simulate->add_option("--samples", samples)->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "Maximum-likelihood fit of beta");
  estimate->add_option("network", network)->required();
  estimate->add_option("observations", observations)->required();
  estimate->add_option("--model", model)
      ->check(CLI::IsMember({"recursive", "nonrecursive", "both"}))
      ->capture_default_str();
  estimate->add_option("--json", json_path, "Write the results as JSON");

  auto* compare = app.add_subcommand(
      "compare", "Two-route ratio analysis, grid sweep or equivalence report");
  TwoRouteScenario sc{3, 2, -1, 0, 0.5};
  bool do_sweep = false;
  std::vector<double> x_axis{0.1, 5, 10}, y_axis{0.1, 5, 10}, p_axis{0.05, 0.95, 7};
  compare->add_option("--a", sc.a)->capture_default_str();
  compare->add_option("--b", sc.b)->capture_default_str();
  compare->add_option("--x", sc.x)->capture_default_str();
  compare->add_option("--y", sc.y)->capture_default_str();
  compare->add_option("--p", sc.p)->capture_default_str();
  compare->add_flag("--sweep", do_sweep, "Sweep the (x, y, p) grid");
  compare->add_option("--x-range", x_axis, "lo,hi,count")->delimiter(',');
  compare->add_option("--y-range", y_axis, "lo,hi,count")->delimiter(',');
  compare->add_option("--p-range", p_axis, "lo,hi,count")->delimiter(',');
  compare->add_option("--network", network,
                      "Equivalence report for a network instead");

  for (auto* sub : {validate, enumerate, predict, simulate, estimate, compare})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cfg.validate();
    if (*validate) return run_validate(cfg, network);
    if (*enumerate) return run_enumerate(cfg, network, count_only);
    if (*predict) return run_predict(cfg, network, model);
    if (*simulate) return run_simulate(cfg, network, sim_model, samples);
    if (*estimate) return run_estimate(cfg, network, observations, model, json_path);
    if (*compare) {
      if (!network.empty()) return run_compare_equivalence(cfg, network);
      Sink sink(cfg.output);
      sink.out() << kRatioHeader;
      if (!do_sweep) {
        sink.out() << ratio_csv(evaluate_scenario(sc));
        return 0;
      }
      SweepGrid grid{sc.a, sc.b, parse_axis(x_axis, "x-range"),
                     parse_axis(y_axis, "y-range"), parse_axis(p_axis, "p-range")};
      for (const auto& row : sweep(grid)) sink.out() << ratio_csv(row);
      return 0;
    }
  } catch (const ZeroProbabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
