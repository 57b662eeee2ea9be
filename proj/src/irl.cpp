#include "hrc/irl.hpp"

#include <cmath>

#include "hrc/errors.hpp"
#include "hrc/projection.hpp"
#include "hrc/random.hpp"

namespace hrc {

ValueResult induced_policy(const Mdp& mdp, const FeatureMap& phi, const std::vector<double>& weights,
                           const ActionCosts& costs) {
  return value_iteration(mdp, state_rewards(phi, weights), costs);
}

IrlResult irl_learn(const Mdp& mdp, const FeatureMap& phi, const std::vector<double>& demo_mu,
                    const IrlOptions& opt) {
  if (opt.epsilon <= 0.0) throw Error("irl: epsilon must be positive");
  if (static_cast<int>(demo_mu.size()) != phi.dimension) throw Error("irl: demo feature expectations have wrong length");
  const auto start = one_hot(mdp.num_states, mdp.start);

  IrlResult r;
  r.epsilon = opt.epsilon;
  r.demo_mu = demo_mu;
  Rng rng(opt.seed);
  std::vector<int> pi0(static_cast<std::size_t>(mdp.num_states));
  for (int& a : pi0) a = uniform_index(rng, mdp.num_actions);
  r.policies.push_back(pi0);
  r.mus.push_back(feature_expectations(mdp, pi0, phi, start));
  r.best_margin = std::numeric_limits<double>::infinity();

  for (int i = 1; i <= opt.max_iterations; ++i) {
    auto proj = project_onto_hull(demo_mu, r.mus);
    r.ts.push_back(proj.distance);
    if (proj.distance < r.best_margin) {
      r.best_margin = proj.distance;
      r.best_iteration = i;
      r.lambdas = proj.lambdas;
    }
    if (proj.distance <= opt.epsilon) {
      r.converged = true;
      break;
    }
    std::vector<double> w(demo_mu.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = (demo_mu[k] - proj.point[k]) / proj.distance;
    r.directions.push_back(w);
    if (i == opt.max_iterations) break;
    auto vi = induced_policy(mdp, phi, w, opt.action_costs);
    r.policies.push_back(vi.policy);
    r.mus.push_back(feature_expectations(mdp, vi.policy, phi, start));
  }
  r.lambdas.resize(r.mus.size(), 0.0);

  r.weights.assign(demo_mu.size(), 0.0);
  const std::size_t n = r.directions.size();
  if (n > 0) {
    const std::size_t first = n / 2;
    for (std::size_t i = first; i < n; ++i)
      for (std::size_t k = 0; k < r.weights.size(); ++k) r.weights[k] += r.directions[i][k];
    for (double& v : r.weights) v /= static_cast<double>(n - first);
  }
  return r;
}

nlohmann::json to_json(const IrlResult& r) {
  return {{"weights", r.weights},       {"margins", r.ts},           {"lambdas", r.lambdas},
          {"epsilon", r.epsilon},       {"best_margin", r.best_margin}, {"best_iteration", r.best_iteration},
          {"converged", r.converged},   {"iterations", r.ts.size()}, {"demo_mu", r.demo_mu}};
}

}  // namespace hrc
