#include "hrc/mdp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hrc/errors.hpp"
#include "hrc/random.hpp"

namespace hrc {

std::vector<std::string> validate_mdp(const Mdp& m) {
  std::vector<std::string> out;
  if (static_cast<int>(m.transitions.size()) != m.num_states || static_cast<int>(m.terminal.size()) != m.num_states)
    out.push_back("state count does not match tables");
  if (m.discount <= 0.0 || m.discount >= 1.0) out.push_back("discount must lie in (0, 1)");
  if (m.start < 0 || m.start >= m.num_states) out.push_back("start state out of range");
  for (int s = 0; s < m.num_states && static_cast<std::size_t>(s) < m.transitions.size(); ++s) {
    if (m.is_terminal(s)) continue;
    for (int a = 0; a < m.num_actions; ++a) {
      double sum = 0.0;
      for (auto [t, p] : m.row(s, a)) {
        if (t < 0 || t >= m.num_states || p < 0.0)
          out.push_back("state " + std::to_string(s) + " action " + std::to_string(a) + ": invalid entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        out.push_back("state " + std::to_string(s) + " action " + std::to_string(a) + ": row sums to " +
                      std::to_string(sum));
    }
  }
  return out;
}

Mdp reduce_to_mdp(const TaskDomain& d, const std::string& tag) {
  if (!d.has_tag(tag)) throw Error("domain '" + d.name + "' has no human response tagged '" + tag + "'");
  Mdp m;
  m.num_states = d.num_steps();
  m.num_actions = d.num_robot_actions();
  m.discount = d.discount;
  m.start = d.initial;
  m.terminal.assign(static_cast<std::size_t>(m.num_states), false);
  m.transitions.assign(static_cast<std::size_t>(m.num_states), std::vector<SparseRow>(static_cast<std::size_t>(m.num_actions)));
  for (int s = 0; s < m.num_states; ++s) {
    if (d.is_terminal(s)) {
      m.terminal[static_cast<std::size_t>(s)] = true;
      for (auto& row : m.transitions[static_cast<std::size_t>(s)]) row = {{s, 1.0}};
      continue;
    }
    for (int a : d.alphabet.robot_actions()) {
      std::vector<double> dense(static_cast<std::size_t>(m.num_states), 0.0);
      for (const auto& o : d.response(tag, s, a)) dense[static_cast<std::size_t>(o.next_step)] += o.prob;
      SparseRow row;
      for (int t = 0; t < m.num_states; ++t)
        if (dense[static_cast<std::size_t>(t)] > 0.0) row.emplace_back(t, dense[static_cast<std::size_t>(t)]);
      m.transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(d.alphabet.actor_index(a))] = std::move(row);
    }
  }
  return m;
}

FeatureMap indicator_features(int num_states) {
  FeatureMap phi;
  phi.dimension = num_states;
  phi.kind = "indicator";
  for (int s = 0; s < num_states; ++s) phi.features.push_back(one_hot(num_states, s));
  return phi;
}

nlohmann::json to_json(const FeatureMap& phi) {
  if (phi.kind == "indicator")
    return {{"kind", "indicator"}, {"dimension", phi.dimension}};
  return {{"kind", phi.kind}, {"dimension", phi.dimension}, {"features", phi.features}};
}

FeatureMap feature_map_from_json(const nlohmann::json& j) {
  try {
    auto kind = j.at("kind").get<std::string>();
    int dim = j.at("dimension").get<int>();
    if (kind == "indicator") return indicator_features(dim);
    FeatureMap phi;
    phi.kind = kind;
    phi.dimension = dim;
    phi.features = j.at("features").get<std::vector<std::vector<double>>>();
    for (const auto& f : phi.features) {
      if (static_cast<int>(f.size()) != dim) throw ParseError("feature map", "row length differs from dimension");
      for (double v : f)
        if (v < 0.0 || v > 1.0) throw ParseError("feature map", "feature entries must lie in [0, 1]");
    }
    return phi;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("feature map", ex.what());
  }
}

std::vector<double> state_rewards(const FeatureMap& phi, const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != phi.dimension) throw Error("weight length differs from feature dimension");
  std::vector<double> r;
  r.reserve(phi.features.size());
  for (const auto& f : phi.features) {
    double v = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) v += f[i] * w[i];
    r.push_back(v);
  }
  return r;
}

std::vector<double> one_hot(int size, int index) {
  std::vector<double> v(static_cast<std::size_t>(size), 0.0);
  v[static_cast<std::size_t>(index)] = 1.0;
  return v;
}

double q_value(const Mdp& m, const std::vector<double>& reward, const ActionCosts& costs,
               const std::vector<double>& values, int s, int a) {
  double q = reward[static_cast<std::size_t>(s)];
  if (!costs.empty()) q += costs[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
  double future = 0.0;
  for (auto [t, p] : m.row(s, a)) future += p * values[static_cast<std::size_t>(t)];
  return q + m.discount * future;
}

ValueResult value_iteration(const Mdp& m, const std::vector<double>& reward, const ActionCosts& costs, double tol,
                            int max_iterations) {
  const auto n = static_cast<std::size_t>(m.num_states);
  ValueResult r;
  r.values.assign(n, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    if (m.terminal[s]) r.values[s] = reward[s];
  std::vector<double> next = r.values;
  for (r.iterations = 1; r.iterations <= max_iterations; ++r.iterations) {
    r.residual = 0.0;
    for (int s = 0; s < m.num_states; ++s) {
      if (m.is_terminal(s)) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < m.num_actions; ++a) best = std::max(best, q_value(m, reward, costs, r.values, s, a));
      next[static_cast<std::size_t>(s)] = best;
      r.residual = std::max(r.residual, std::abs(best - r.values[static_cast<std::size_t>(s)]));
    }
    r.values.swap(next);
    if (r.residual <= tol) break;
  }
  r.iterations = std::min(r.iterations, max_iterations);
  r.policy.assign(n, 0);
  for (int s = 0; s < m.num_states; ++s) {
    if (m.is_terminal(s)) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m.num_actions; ++a) {
      double q = q_value(m, reward, costs, r.values, s, a);
      if (q > best + 1e-9) {
        best = q;
        r.policy[static_cast<std::size_t>(s)] = a;
      }
    }
  }
  return r;
}

namespace {

// Transition matrix of the policy chain; terminal rows are zero, so a
// terminal state is counted once on arrival.
Eigen::MatrixXd policy_chain(const Mdp& m, const std::vector<int>& policy) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m.num_states, m.num_states);
  for (int s = 0; s < m.num_states; ++s) {
    if (m.is_terminal(s)) continue;
    for (auto [t, q] : m.row(s, policy[static_cast<std::size_t>(s)])) p(s, t) += q;
  }
  return p;
}

}  // namespace

std::vector<double> policy_values(const Mdp& m, const std::vector<int>& policy, const std::vector<double>& reward,
                                  const ActionCosts& costs) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m.num_states, m.num_states) - m.discount * policy_chain(m, policy);
  Eigen::VectorXd r(m.num_states);
  for (int s = 0; s < m.num_states; ++s) {
    r(s) = reward[static_cast<std::size_t>(s)];
    if (!costs.empty() && !m.is_terminal(s))
      r(s) += costs[static_cast<std::size_t>(s)][static_cast<std::size_t>(policy[static_cast<std::size_t>(s)])];
  }
  Eigen::VectorXd v = a.partialPivLu().solve(r);
  return {v.data(), v.data() + v.size()};
}

std::vector<double> feature_expectations(const Mdp& m, const std::vector<int>& policy, const FeatureMap& phi,
                                         const std::vector<double>& start) {
  Eigen::MatrixXd a =
      Eigen::MatrixXd::Identity(m.num_states, m.num_states) - m.discount * policy_chain(m, policy).transpose();
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(start.data(), static_cast<Eigen::Index>(start.size()));
  Eigen::VectorXd occupancy = a.partialPivLu().solve(b);
  std::vector<double> mu(static_cast<std::size_t>(phi.dimension), 0.0);
  for (int s = 0; s < m.num_states; ++s) {
    const auto& f = phi(s);
    for (int i = 0; i < phi.dimension; ++i) mu[static_cast<std::size_t>(i)] += occupancy(s) * f[static_cast<std::size_t>(i)];
  }
  return mu;
}

MonteCarloEstimate feature_expectations_mc(const Mdp& m, const std::vector<int>& policy, const FeatureMap& phi,
                                           const std::vector<double>& start, int rollouts, std::uint64_t seed) {
  const auto d = static_cast<std::size_t>(phi.dimension);
  const int horizon = static_cast<int>(std::ceil(std::log(1e-6) / std::log(m.discount)));
  Rng rng(seed);
  std::vector<double> sum(d, 0.0), sum_sq(d, 0.0), ret(d);
  std::vector<double> probs;
  for (int k = 0; k < rollouts; ++k) {
    std::fill(ret.begin(), ret.end(), 0.0);
    int s = sample_index(rng, start);
    double g = 1.0;
    for (int t = 0; t < horizon; ++t) {
      const auto& f = phi(s);
      for (std::size_t i = 0; i < d; ++i) ret[i] += g * f[i];
      if (m.is_terminal(s)) break;
      const auto& row = m.row(s, policy[static_cast<std::size_t>(s)]);
      probs.clear();
      for (auto [_, p] : row) probs.push_back(p);
      s = row[static_cast<std::size_t>(sample_index(rng, probs))].first;
      g *= m.discount;
    }
    for (std::size_t i = 0; i < d; ++i) {
      sum[i] += ret[i];
      sum_sq[i] += ret[i] * ret[i];
    }
  }
  MonteCarloEstimate est;
  const double n = rollouts;
  for (std::size_t i = 0; i < d; ++i) {
    double mean = sum[i] / n;
    double var = n > 1 ? std::max(0.0, (sum_sq[i] - n * mean * mean) / (n - 1)) : 0.0;
    est.mean.push_back(mean);
    est.stderr_.push_back(std::sqrt(var / n));
  }
  return est;
}

std::vector<double> empirical_feature_expectations(const std::vector<std::vector<int>>& trajectories,
                                                   const FeatureMap& phi, double discount) {
  if (trajectories.empty()) throw Error("empirical feature expectations need at least one trajectory");
  std::vector<double> mu(static_cast<std::size_t>(phi.dimension), 0.0);
  for (const auto& traj : trajectories) {
    double g = 1.0;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const int s = traj[t];
      if (s < 0 || s >= static_cast<int>(phi.features.size())) throw Error("trajectory state out of range");
      const auto& f = phi(s);
      for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += g * f[i];
      g *= discount;
    }
  }
  for (double& v : mu) v /= static_cast<double>(trajectories.size());
  return mu;
}

}  // namespace hrc
