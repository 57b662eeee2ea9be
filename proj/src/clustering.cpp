#include "hrc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "hrc/errors.hpp"
#include "hrc/random.hpp"

namespace hrc {

namespace {

std::vector<double> normalize_log(std::vector<double> logp) {
  const double m = *std::max_element(logp.begin(), logp.end());
  double sum = 0.0;
  for (double& v : logp) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : logp) v /= sum;
  return logp;
}

double log_prior(const ClusterModel& m, int z) {
  double p = m.priors[static_cast<std::size_t>(z)];
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

void m_step(const std::vector<DemoSequence>& data, int alphabet_size, const EmOptions& opt, ClusterModel& m) {
  std::vector<std::vector<const DemoSequence*>> members(static_cast<std::size_t>(m.k));
  for (std::size_t i = 0; i < data.size(); ++i) members[static_cast<std::size_t>(m.assignments[i])].push_back(&data[i]);
  m.priors.assign(static_cast<std::size_t>(m.k), 0.0);
  for (int z = 0; z < m.k; ++z) {
    m.matrices[static_cast<std::size_t>(z)] = smoothed_transitions(members[static_cast<std::size_t>(z)], alphabet_size);
    m.priors[static_cast<std::size_t>(z)] =
        opt.uniform_prior ? 1.0 / m.k
                          : static_cast<double>(members[static_cast<std::size_t>(z)].size()) /
                                static_cast<double>(data.size());
  }
}

// Moves the worst-fitting sequence of a multi-member cluster into each empty one.
void repair_empty_clusters(const std::vector<DemoSequence>& data, ClusterModel& m) {
  for (int z = 0; z < m.k; ++z) {
    std::vector<int> sizes(static_cast<std::size_t>(m.k), 0);
    for (int a : m.assignments) ++sizes[static_cast<std::size_t>(a)];
    if (sizes[static_cast<std::size_t>(z)] > 0) continue;
    int worst = -1;
    double worst_ll = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.size(); ++i) {
      int c = m.assignments[i];
      if (sizes[static_cast<std::size_t>(c)] < 2) continue;
      double ll = sequence_loglik(data[i], m.matrices[static_cast<std::size_t>(c)]);
      if (ll < worst_ll) {
        worst_ll = ll;
        worst = static_cast<int>(i);
      }
    }
    if (worst < 0) return;
    m.assignments[static_cast<std::size_t>(worst)] = z;
  }
}

}  // namespace

TransitionMatrix::TransitionMatrix(int size)
    : size_(size), theta_(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0) {}

std::vector<double> TransitionMatrix::row(int prev) const {
  auto begin = theta_.begin() + static_cast<std::ptrdiff_t>(index(0, prev));
  return {begin, begin + size_};
}

TransitionMatrix smoothed_transitions(const std::vector<const DemoSequence*>& seqs, int alphabet_size) {
  TransitionMatrix t(alphabet_size);
  for (int j = 0; j < alphabet_size; ++j)
    for (int i = 0; i < alphabet_size; ++i) t.at(i, j) = 1.0;
  for (const auto* s : seqs)
    for (std::size_t j = 1; j < s->actions.size(); ++j) t.at(s->actions[j], s->actions[j - 1]) += 1.0;
  for (int j = 0; j < alphabet_size; ++j) {
    double sum = 0.0;
    for (int i = 0; i < alphabet_size; ++i) sum += t(i, j);
    for (int i = 0; i < alphabet_size; ++i) t.at(i, j) /= sum;
  }
  return t;
}

double sequence_loglik(const DemoSequence& seq, const TransitionMatrix& theta) {
  double ll = 0.0;
  for (std::size_t j = 1; j < seq.actions.size(); ++j) ll += std::log(theta(seq.actions[j], seq.actions[j - 1]));
  return ll;
}

long long bic_parameter_count(int k, int alphabet_size) {
  return static_cast<long long>(k) * alphabet_size * (alphabet_size - 1);
}

double bic_score(double log_likelihood, int k, int alphabet_size, std::size_t n) {
  return log_likelihood -
         0.5 * static_cast<double>(bic_parameter_count(k, alphabet_size)) * std::log(static_cast<double>(n));
}

double complete_log_likelihood(const std::vector<DemoSequence>& data, const ClusterModel& model) {
  double ll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    int z = model.assignments[i];
    ll += log_prior(model, z) + sequence_loglik(data[i], model.matrices[static_cast<std::size_t>(z)]);
  }
  return ll;
}

ClusterModel em_cluster(const std::vector<DemoSequence>& data, int alphabet_size, int k, std::uint64_t seed,
                        const EmOptions& options) {
  if (k < 1) throw Error("em_cluster: k must be at least 1");
  if (data.empty()) throw Error("em_cluster: no sequences");
  const std::size_t n = data.size();
  Rng rng(seed);

  ClusterModel m;
  m.k = k;
  m.matrices.assign(static_cast<std::size_t>(k), smoothed_transitions({}, alphabet_size));
  m.priors.assign(static_cast<std::size_t>(k), 1.0 / k);

  // Random initial matrices: each cluster starts from the smoothed counts of
  // a distinct randomly chosen sequence.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int z = 0; z < k && static_cast<std::size_t>(z) < n; ++z)
    m.matrices[static_cast<std::size_t>(z)] = smoothed_transitions({&data[order[static_cast<std::size_t>(z)]]}, alphabet_size);

  std::vector<int> previous;
  for (int it = 1; it <= options.max_iterations; ++it) {
    m.assignments.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int z = 0; z < k; ++z) {
        double score = log_prior(m, z) + sequence_loglik(data[i], m.matrices[static_cast<std::size_t>(z)]);
        if (score > best) {
          best = score;
          m.assignments[i] = z;
        }
      }
    }
    repair_empty_clusters(data, m);
    const bool changed = m.assignments != previous;
    previous = m.assignments;
    m_step(data, alphabet_size, options, m);
    m.iterations = it;
    m.trace.push_back(complete_log_likelihood(data, m));
    if (!changed) {
      m.converged = true;
      break;
    }
  }
  m.log_likelihood = complete_log_likelihood(data, m);
  m.bic = bic_score(m.log_likelihood, k, alphabet_size, n);
  return m;
}

ClusterModel select_best_model(const std::vector<DemoSequence>& data, int alphabet_size, int k_min, int k_max,
                               int restarts, std::uint64_t seed, const EmOptions& options, int threads) {
  if (k_min < 1 || k_max < k_min) throw Error("select_best_model: need 1 <= k_min <= k_max");
  if (restarts < 1) throw Error("select_best_model: restarts must be at least 1");

  struct Job {
    int k, restart;
  };
  std::vector<Job> jobs;
  for (int k = k_min; k <= k_max; ++k)
    for (int r = 0; r < restarts; ++r) jobs.push_back({k, r});

  std::vector<ClusterModel> runs(jobs.size());
  auto run = [&](std::size_t j) {
    const auto [k, r] = jobs[j];
    runs[j] = em_cluster(data, alphabet_size, k, derive_seed(seed, {static_cast<std::uint64_t>(k),
                                                                     static_cast<std::uint64_t>(r)}),
                         options);
    runs[j].restart = r;
  };
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
  } else {
    std::vector<std::future<void>> pending;
    std::size_t next = 0;
    while (next < jobs.size() || !pending.empty()) {
      while (next < jobs.size() && pending.size() < static_cast<std::size_t>(threads))
        pending.push_back(std::async(std::launch::async, run, next++));
      pending.front().get();
      pending.erase(pending.begin());
    }
  }

  std::vector<BicEntry> table;
  std::size_t best_overall = 0;
  for (std::size_t j = 0; j < jobs.size();) {
    std::size_t best_k = j;
    const int k = jobs[j].k;
    for (; j < jobs.size() && jobs[j].k == k; ++j)
      if (runs[j].bic > runs[best_k].bic) best_k = j;
    table.push_back({k, jobs[best_k].restart, runs[best_k].log_likelihood, runs[best_k].bic});
    if (table.size() == 1 || runs[best_k].bic > runs[best_overall].bic) best_overall = best_k;
  }
  ClusterModel best = std::move(runs[best_overall]);
  best.bic_table = std::move(table);
  return best;
}

std::vector<double> posterior_over_types(const std::vector<DemoSequence>& seqs, const ClusterModel& model) {
  std::vector<double> logp(static_cast<std::size_t>(model.k));
  for (int z = 0; z < model.k; ++z) {
    double lp = log_prior(model, z);
    for (const auto& s : seqs) lp += sequence_loglik(s, model.matrices[static_cast<std::size_t>(z)]);
    logp[static_cast<std::size_t>(z)] = lp;
  }
  return normalize_log(std::move(logp));
}

std::vector<double> subject_vote(const std::vector<DemoSequence>& seqs, const ClusterModel& model) {
  std::vector<double> votes(static_cast<std::size_t>(model.k), 0.0);
  for (const auto& s : seqs) {
    auto post = posterior_over_types({s}, model);
    auto best = std::max_element(post.begin(), post.end());
    votes[static_cast<std::size_t>(best - post.begin())] += *best;
  }
  return votes;
}

nlohmann::json to_json(const ClusterModel& m) {
  auto mats = nlohmann::json::array();
  for (const auto& t : m.matrices) {
    auto rows = nlohmann::json::array();
    for (int j = 0; j < t.size(); ++j) rows.push_back(t.row(j));
    mats.push_back(std::move(rows));
  }
  auto table = nlohmann::json::array();
  for (const auto& e : m.bic_table)
    table.push_back({{"k", e.k}, {"restart", e.restart}, {"log_likelihood", e.log_likelihood}, {"bic", e.bic}});
  return {{"k", m.k},
          {"priors", m.priors},
          {"matrices", std::move(mats)},
          {"assignments", m.assignments},
          {"log_likelihood", m.log_likelihood},
          {"bic", m.bic},
          {"iterations", m.iterations},
          {"converged", m.converged},
          {"restart", m.restart},
          {"bic_table", std::move(table)}};
}

ClusterModel cluster_model_from_json(const nlohmann::json& j) {
  try {
    ClusterModel m;
    m.k = j.at("k").get<int>();
    m.priors = j.at("priors").get<std::vector<double>>();
    for (const auto& mat : j.at("matrices")) {
      auto rows = mat.get<std::vector<std::vector<double>>>();
      TransitionMatrix t(static_cast<int>(rows.size()));
      for (std::size_t p = 0; p < rows.size(); ++p) {
        if (rows[p].size() != rows.size()) throw Error("transition matrix is not square");
        for (std::size_t q = 0; q < rows.size(); ++q) t.at(static_cast<int>(q), static_cast<int>(p)) = rows[p][q];
      }
      m.matrices.push_back(std::move(t));
    }
    m.assignments = j.at("assignments").get<std::vector<int>>();
    m.log_likelihood = j.at("log_likelihood").get<double>();
    m.bic = j.at("bic").get<double>();
    m.iterations = j.value("iterations", 0);
    m.converged = j.value("converged", false);
    m.restart = j.value("restart", 0);
    if (j.contains("bic_table"))
      for (const auto& e : j.at("bic_table"))
        m.bic_table.push_back({e.at("k").get<int>(), e.at("restart").get<int>(), e.at("log_likelihood").get<double>(),
                               e.at("bic").get<double>()});
    if (static_cast<int>(m.matrices.size()) != m.k || static_cast<int>(m.priors.size()) != m.k)
      throw Error("k does not match matrices/priors");
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError("cluster model", ex.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& ex) {
    throw ParseError("cluster model", ex.what());
  }
}

}  // namespace hrc
