#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "lsmo/objective.hpp"

namespace lsmo {

/// Diagonal-covariance Gaussian mixture.
struct GaussianMixture {
  Eigen::VectorXd weights;  // simplex: >= 0, sums to 1
  Eigen::MatrixXd means;    // k x dim
  Eigen::MatrixXd vars;     // k x dim, floored away from zero

  int k() const { return static_cast<int>(means.rows()); }
  int dim() const { return static_cast<int>(means.cols()); }

  /// Total log density at each row of `points`.
  Eigen::VectorXd log_density(const Eigen::MatrixXd& points) const;
};

/// EM fit with k-means++-style seeding. Components that lose all their
/// responsibility mass are reseeded at a random data point. `ll_history`,
/// when given, records the mean log-likelihood after every EM iteration.
GaussianMixture em_fit(const Eigen::MatrixXd& points, int k, int iterations,
                       std::uint64_t seed, double var_floor = 1e-6,
                       std::vector<double>* ll_history = nullptr);

struct CemConfig {
  int k = 20;                  // mixture components
  int population = 2000;       // samples per iteration
  double elite_fraction = 0.1; // top fraction refit each iteration
  int iterations = 50;
  int em_iterations = 20;      // EM steps per refit
  double var_floor = 1e-6;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CemIteration {
  double elite_threshold = 0.0;  // worst accepted elite score
  double best_score = 0.0;       // best score seen this iteration
};

struct CemResult {
  GaussianMixture mixture;
  Eigen::MatrixXd component_means;   // final k x dim
  Eigen::VectorXd component_scores;  // R at each component mean
  double best_component_score = 0.0;
  double mean_component_score = 0.0;
  std::vector<CemIteration> history;
  bool early_stopped = false;
};

/// Cross-entropy method with a Gaussian-mixture sampler: sample a population
/// (clipped to the objective box), keep the top elite fraction by score,
/// refit the mixture by EM, repeat. Deterministic per seed.
CemResult cem_optimize(const ObjectiveFn& objective, const CemConfig& config);

}  // namespace lsmo
