#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "hrc/demos.hpp"

namespace hrc {

/// First-order action transition matrix; entry (next, prev) = θ(next | prev).
/// Stored row-major by the conditioning action.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(int size);

  int size() const { return size_; }
  double operator()(int next, int prev) const { return theta_[index(next, prev)]; }
  double& at(int next, int prev) { return theta_[index(next, prev)]; }
  /// Row of probabilities conditioned on `prev`.
  std::vector<double> row(int prev) const;

  bool operator==(const TransitionMatrix&) const = default;

 private:
  std::size_t index(int next, int prev) const {
    return static_cast<std::size_t>(prev) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(next);
  }
  int size_ = 0;
  std::vector<double> theta_;
};

/// Add-one smoothed transition counts over all consecutive action pairs.
TransitionMatrix smoothed_transitions(const std::vector<const DemoSequence*>& seqs, int alphabet_size);

/// log ∏_{j≥2} θ(x_j | x_{j-1}).
double sequence_loglik(const DemoSequence& seq, const TransitionMatrix& theta);

struct BicEntry {
  int k = 0;
  int restart = 0;
  double log_likelihood = 0.0;
  double bic = 0.0;
};

struct ClusterModel {
  int k = 0;
  std::vector<TransitionMatrix> matrices;
  std::vector<double> priors;
  std::vector<int> assignments;  // 0-based cluster per sequence
  double log_likelihood = 0.0;
  double bic = 0.0;
  int iterations = 0;
  bool converged = false;
  int restart = 0;
  /// Complete-data log-likelihood after every EM iteration.
  std::vector<double> trace;
  /// Best run per k when produced by select_best_model.
  std::vector<BicEntry> bic_table;

  int alphabet_size() const { return matrices.empty() ? 0 : matrices.front().size(); }
};

struct EmOptions {
  int max_iterations = 200;
  /// Fix P(z) = 1/k instead of using cluster-size fractions.
  bool uniform_prior = false;
};

/// Number of free parameters k|A|(|A|-1).
long long bic_parameter_count(int k, int alphabet_size);
double bic_score(double log_likelihood, int k, int alphabet_size, std::size_t n);

/// Σ_i log(P(z_i) ∏ θ_{z_i}(x_i^j | x_i^{j-1})) for the model's assignments.
double complete_log_likelihood(const std::vector<DemoSequence>& data, const ClusterModel& model);

/// Hard-EM clustering of sequences into k transition matrices.
ClusterModel em_cluster(const std::vector<DemoSequence>& data, int alphabet_size, int k, std::uint64_t seed,
                        const EmOptions& options = {});

/// Runs em_cluster for every k in [k_min, k_max] with `restarts` seeds each
/// and returns the run with the highest BIC. Ties go to the lower k, then
/// the lower restart index, regardless of `threads`.
ClusterModel select_best_model(const std::vector<DemoSequence>& data, int alphabet_size, int k_min, int k_max,
                               int restarts, std::uint64_t seed, const EmOptions& options = {}, int threads = 1);

/// Posterior over types for sequences assumed to come from one user.
std::vector<double> posterior_over_types(const std::vector<DemoSequence>& seqs, const ClusterModel& model);

/// Likelihood-weighted vote of a subject's sequences: each sequence votes
/// for its most likely cluster, weighted by that cluster's posterior.
std::vector<double> subject_vote(const std::vector<DemoSequence>& seqs, const ClusterModel& model);

nlohmann::json to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const nlohmann::json& j);

}  // namespace hrc
