#include "routelogit/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "routelogit/error.hpp"
#include "routelogit/logsumexp.hpp"
#include "routelogit/nonrecursive_logit.hpp"
#include "routelogit/recursive_logit.hpp"

namespace routelogit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_observations(const std::vector<double>& per_obs) {
  for (std::size_t n = 0; n < per_obs.size(); ++n)
    if (!std::isfinite(per_obs[n]))
      throw ZeroProbabilityError(
          n, "observation " + std::to_string(n) +
                 " has zero probability under the model");
}

double checked_sum(const std::vector<double>& per_obs) {
  check_observations(per_obs);
  CompensatedSum s;
  for (double v : per_obs) s.add(v);
  return s.value();
}

}  // namespace

Model parse_model(std::string_view name) {
  if (name == "recursive") return Model::recursive;
  if (name == "nonrecursive" || name == "non-recursive") return Model::nonrecursive;
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected recursive or nonrecursive)");
}

std::string to_string(Model m) {
  return m == Model::recursive ? "recursive" : "nonrecursive";
}

struct LikelihoodEvaluator::Group {
  std::shared_ptr<const StateGraph> graph;
  std::vector<GraphPath> paths;
  // Non-recursive only.
  std::vector<std::vector<double>> policy_attributes;
  std::vector<std::vector<std::size_t>> containing;
  std::vector<double> log_pr_ev;
};

LikelihoodEvaluator::LikelihoodEvaluator(const StdNetwork& net,
                                         const SupportPointSet& spp,
                                         const ObservationSet& obs,
                                         Model model, AttributeFn attributes,
                                         std::uint64_t max_policies)
    : model_(model), attributes_(std::move(attributes)) {
  std::map<State, std::size_t> group_of;
  std::vector<std::map<StateSequence, std::size_t>> distinct;
  std::vector<std::vector<StateSequence>> sequences;
  std::vector<std::pair<std::size_t, std::size_t>> refs;

  for (std::size_t n = 0; n < obs.size(); ++n) {
    try {
      validate_sequence(net, spp, obs[n]);
    } catch (const InvalidSequenceError& e) {
      throw InvalidSequenceError("observation " + std::to_string(n) + ": " +
                                 e.what());
    }
    auto [git, new_group] = group_of.try_emplace(obs[n].states.front(), groups_.size());
    if (new_group) {
      auto g = std::make_shared<Group>();
      g->graph = std::make_shared<const StateGraph>(net, spp, obs[n].states.front(),
                                                    attributes_);
      groups_.push_back(std::move(g));
      distinct.emplace_back();
      sequences.emplace_back();
    }
    const std::size_t gi = git->second;
    auto [sit, new_seq] = distinct[gi].try_emplace(obs[n], sequences[gi].size());
    if (new_seq) {
      sequences[gi].push_back(obs[n]);
      groups_[gi]->paths.push_back(locate_sequence(*groups_[gi]->graph, obs[n]));
    }
    refs.emplace_back(gi, sit->second);
  }

  if (model_ == Model::nonrecursive) {
    for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
      Group& g = *groups_[gi];
      const auto cs = enumerate_policies(net, spp, g.graph->node(0).state,
                                         max_policies);
      for (const auto& p : cs.policies)
        g.policy_attributes.push_back(
            policy_expected_attributes(net, spp, p, attributes_));
      for (const auto& seq : sequences[gi]) {
        std::vector<std::size_t> c;
        for (std::size_t i = 0; i < cs.policies.size(); ++i)
          if (contains(cs.policies[i], seq)) c.push_back(i);
        g.containing.push_back(std::move(c));
        g.log_pr_ev.push_back(std::log(
            transition_prob(spp, seq.states.back().ev, seq.states.front().ev)));
      }
    }
  }

  group_offset_.assign(groups_.size() + 1, 0);
  for (std::size_t gi = 0; gi < groups_.size(); ++gi)
    group_offset_[gi + 1] = group_offset_[gi] + groups_[gi]->paths.size();
  for (const auto& [gi, si] : refs) obs_ref_.push_back(group_offset_[gi] + si);
  parameter_count_ = groups_.empty() ? 0 : groups_.front()->graph->attribute_count();
}

std::size_t LikelihoodEvaluator::distinct_sequence_count() const {
  return group_offset_.empty() ? 0 : group_offset_.back();
}

std::vector<double> LikelihoodEvaluator::distinct_log_likelihoods(
    std::span<const double> beta, double mu, bool parallel) const {
  LinkUtilitySpec utility{std::vector<double>(beta.begin(), beta.end()), mu,
                          attributes_};
  utility.validate();
  std::vector<double> out(distinct_sequence_count(), kNegInf);

  auto evaluate_group = [&](std::size_t gi) {
    const Group& g = *groups_[gi];
    const std::size_t base = group_offset_[gi];
    if (model_ == Model::recursive) {
      const ValueFunction vf(g.graph, utility);
      for (std::size_t i = 0; i < g.paths.size(); ++i)
        out[base + i] = path_log_likelihood(vf, g.paths[i]);
    } else {
      std::vector<double> utilities;
      utilities.reserve(g.policy_attributes.size());
      for (const auto& a : g.policy_attributes) utilities.push_back(utility.utility(a));
      const auto log_p = policy_logit(utilities, mu);
      std::vector<double> terms;
      for (std::size_t i = 0; i < g.paths.size(); ++i) {
        terms.clear();
        for (std::size_t k : g.containing[i]) terms.push_back(log_p[k]);
        out[base + i] = terms.empty() ? kNegInf : log_sum_exp(terms) + g.log_pr_ev[i];
      }
    }
  };

  const auto n = static_cast<std::int64_t>(groups_.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t gi = 0; gi < n; ++gi)
      evaluate_group(static_cast<std::size_t>(gi));
  } else {
    for (std::int64_t gi = 0; gi < n; ++gi)
      evaluate_group(static_cast<std::size_t>(gi));
  }
  return out;
}

std::vector<double> LikelihoodEvaluator::observation_log_likelihoods(
    std::span<const double> beta, double mu, bool parallel) const {
  const auto distinct = distinct_log_likelihoods(beta, mu, parallel);
  std::vector<double> out;
  out.reserve(obs_ref_.size());
  for (std::size_t d : obs_ref_) out.push_back(distinct[d]);
  return out;
}

double LikelihoodEvaluator::log_likelihood(std::span<const double> beta,
                                           double mu) const {
  return checked_sum(observation_log_likelihoods(beta, mu, true));
}

double LikelihoodEvaluator::log_likelihood_serial(std::span<const double> beta,
                                                  double mu) const {
  return checked_sum(observation_log_likelihoods(beta, mu, false));
}

double log_likelihood_uncached(const StdNetwork& net, const SupportPointSet& spp,
                               const ObservationSet& obs, Model model,
                               std::span<const double> beta, double mu,
                               const AttributeFn& attributes) {
  LinkUtilitySpec utility{std::vector<double>(beta.begin(), beta.end()), mu,
                          attributes};
  std::vector<double> per_obs;
  per_obs.reserve(obs.size());
  for (const auto& seq : obs) {
    validate_sequence(net, spp, seq);
    if (model == Model::recursive) {
      auto graph = std::make_shared<const StateGraph>(net, spp, seq.states.front(),
                                                      attributes);
      const ValueFunction vf(graph, utility);
      per_obs.push_back(sequence_log_likelihood(vf, seq));
    } else {
      const auto m = make_nonrecursive_logit(net, spp, utility, seq.states.front());
      per_obs.push_back(m.sequence_log_likelihood(seq));
    }
  }
  return checked_sum(per_obs);
}

double log_likelihood(Model model, const StdNetwork& net,
                      const SupportPointSet& spp, const ObservationSet& obs,
                      std::span<const double> beta, double mu) {
  if (obs.empty()) return 0.0;
  return LikelihoodEvaluator(net, spp, obs, model).log_likelihood(beta, mu);
}

std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double rel_step) {
  std::vector<double> g(x.size());
  std::vector<double> xp(x.begin(), x.end());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    const double up = f(xp);
    xp[j] = x[j] - h;
    const double down = f(xp);
    xp[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

std::optional<std::vector<double>> standard_errors(
    const std::function<double(std::span<const double>)>& ll,
    const std::vector<double>& beta, double rel_step) {
  const std::size_t n = beta.size();
  Mat hess(n, n);
  std::vector<double> b = beta;
  for (std::size_t j = 0; j < n; ++j) {
    const double h = 1e-4 * std::max(1.0, std::abs(beta[j]));
    b[j] = beta[j] + h;
    const auto gp = finite_difference_gradient(ll, b, rel_step);
    b[j] = beta[j] - h;
    const auto gm = finite_difference_gradient(ll, b, rel_step);
    b[j] = beta[j];
    for (std::size_t i = 0; i < n; ++i) hess(i, j) = (gp[i] - gm[i]) / (2.0 * h);
  }
  const Mat info = -0.5 * (hess + hess.transpose());
  Eigen::LLT<Mat> llt(info);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Mat cov = llt.solve(Mat::Identity(n, n));
  std::vector<double> se(n);
  for (std::size_t i = 0; i < n; ++i) se[i] = std::sqrt(cov(i, i));
  return se;
}

}  // namespace

EstimationResult fit(const LikelihoodEvaluator& evaluator,
                     std::span<const double> beta0, double mu,
                     const FitOptions& options) {
  if (evaluator.observation_count() > 0 &&
      beta0.size() != evaluator.parameter_count())
    throw ValidationError("beta0 has " + std::to_string(beta0.size()) +
                          " entries, model has " +
                          std::to_string(evaluator.parameter_count()));

  // Log-likelihood with -inf for parameters that zero out an observation, so
  // the line search can back off.
  const std::function<double(std::span<const double>)> ll =
      [&](std::span<const double> b) {
        try {
          return evaluator.log_likelihood(b, mu);
        } catch (const ZeroProbabilityError&) {
          return kNegInf;
        }
      };
  auto grad = [&](const Vec& x) {
    return to_vec(finite_difference_gradient(ll, to_std(x), options.relative_step));
  };

  EstimationResult res;
  Vec x = to_vec(std::vector<double>(beta0.begin(), beta0.end()));
  double f = evaluator.log_likelihood(to_std(x), mu);  // throws on a bad start
  Vec g = grad(x);
  const Eigen::Index n = x.size();
  Mat H = Mat::Identity(n, n);  // inverse Hessian of -ll
  bool scaled = false;

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;

    // Ascent direction for ll = descent for -ll.
    Vec d = H * g;
    if (!scaled) d /= std::max(1.0, d.lpNorm<Eigen::Infinity>());
    if (d.dot(g) <= 0.0) {
      H = Mat::Identity(n, n);
      d = g / std::max(1.0, g.lpNorm<Eigen::Infinity>());
    }

    double alpha = 1.0;
    bool accepted = false;
    Vec x_new;
    double f_new = kNegInf;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + alpha * d;
      f_new = ll(to_std(x_new));
      if (std::isfinite(f_new) && f_new >= f + 1e-4 * alpha * g.dot(d)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }

    if (!accepted) {
      // At the rounding floor of f the Armijo test is uninformative; take
      // quasi-Newton steps while they shrink the gradient.
      bool improved = false;
      for (int k = 0; k < 20; ++k) {
        const Vec step = H * g;
        const Vec xs = x + step;
        const double fs = ll(to_std(xs));
        if (!std::isfinite(fs)) break;
        const Vec gs = grad(xs);
        if (gs.lpNorm<Eigen::Infinity>() >= g.lpNorm<Eigen::Infinity>()) break;
        x = xs;
        f = fs;
        g = gs;
        improved = true;
        if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;
      }
      if (!improved ||
          g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
        ++it;
        break;
      }
      continue;
    }

    const Vec g_new = grad(x_new);
    const Vec s = x_new - x;
    const Vec y = g - g_new;  // gradient change of -ll
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (!scaled) {
        H = Mat::Identity(n, n) * (sy / y.dot(y));
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Mat I = Mat::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    x = x_new;
    f = f_new;
    g = g_new;
  }

  res.beta_hat = to_std(x);
  res.log_likelihood = f;
  res.gradient = to_std(g);
  res.iterations = it;
  res.converged = g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance;
  res.std_errors = standard_errors(ll, res.beta_hat, options.relative_step);
  return res;
}

EstimationResult fit(Model model, const StdNetwork& net,
                     const SupportPointSet& spp, const ObservationSet& obs,
                     std::span<const double> beta0, double mu,
                     const FitOptions& options) {
  return fit(LikelihoodEvaluator(net, spp, obs, model), beta0, mu, options);
}

}  // namespace routelogit
