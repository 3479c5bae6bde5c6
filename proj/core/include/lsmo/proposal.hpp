#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>

#include "lsmo/objective.hpp"

namespace lsmo {

/// Sampling distribution over candidate solutions. Implementations are
/// immutable after construction; sample() takes an explicit seed so
/// concurrent callers can use disjoint streams.
class Proposal {
 public:
  virtual ~Proposal() = default;
  virtual int dim() const = 0;
  /// n i.i.d. samples, one per row. Bitwise reproducible for a fixed seed.
  virtual Eigen::MatrixXd sample(int n, std::uint64_t seed) const = 0;
  /// Log density per row, up to a proposal-wide additive constant.
  /// -inf marks points outside the support.
  virtual Eigen::VectorXd log_density(const Eigen::MatrixXd& points) const = 0;
};

/// Uniform over an axis-aligned box.
class BoxUniform final : public Proposal {
 public:
  BoxUniform(Eigen::VectorXd lo, Eigen::VectorXd hi);
  int dim() const override { return static_cast<int>(lo_.size()); }
  Eigen::MatrixXd sample(int n, std::uint64_t seed) const override;
  Eigen::VectorXd log_density(const Eigen::MatrixXd& points) const override;

 private:
  Eigen::VectorXd lo_, hi_;
};

/// Independent normal per dimension.
class DiagonalNormal final : public Proposal {
 public:
  DiagonalNormal(Eigen::VectorXd mean, Eigen::VectorXd std);
  int dim() const override { return static_cast<int>(mean_.size()); }
  Eigen::MatrixXd sample(int n, std::uint64_t seed) const override;
  Eigen::VectorXd log_density(const Eigen::MatrixXd& points) const override;

 private:
  Eigen::VectorXd mean_, std_;
};

/// Finite-difference matrix of the second-difference stencil [1, -2, 1]
/// applied to the zero-padded interior sequence [0, xi_1..xi_T, 0]; shape
/// (T+2) x T. A = K^T K is symmetric positive definite.
Eigen::MatrixXd build_fd_matrix(int T);

/// Smoothness-structured Gaussian over trajectories: mean xi0, covariance
/// a * (I_D (x) Rcov) where Rcov is inv(K^T K) rescaled to unit max diagonal.
/// Trajectories are stored as T*D vectors in per-DoF blocks; samples pin the
/// endpoints implicitly because only interior waypoints are parameterized.
class TrajectoryPrior final : public Proposal {
 public:
  TrajectoryPrior(int T, int D, double a, Eigen::VectorXd xi0);

  int dim() const override { return T_ * D_; }
  Eigen::MatrixXd sample(int n, std::uint64_t seed) const override;
  Eigen::VectorXd log_density(const Eigen::MatrixXd& points) const override;

  int waypoints() const { return T_; }
  int dofs() const { return D_; }
  double scale() const { return a_; }
  const Eigen::MatrixXd& fd_matrix() const { return K_; }
  const Eigen::MatrixXd& precision_kernel() const { return A_; }   // K^T K
  const Eigen::MatrixXd& covariance_kernel() const { return Rcov_; }
  const Eigen::VectorXd& mean() const { return xi0_; }

 private:
  int T_, D_;
  double a_;
  Eigen::MatrixXd K_;      // (T+2) x T
  Eigen::MatrixXd A_;      // T x T, SPD
  Eigen::MatrixXd Rcov_;   // T x T, SPD, max diagonal = 1
  Eigen::MatrixXd cholR_;  // lower Cholesky factor of Rcov
  Eigen::MatrixXd precR_;  // inverse of Rcov (= max-diag(inv A) * A)
  Eigen::VectorXd xi0_;    // T*D, per-DoF blocks
};

/// Convenience constructor mirroring TrajectoryPrior's constructor.
TrajectoryPrior build_prior(int T, int D, double a, Eigen::VectorXd xi0);

/// Proposal induced by perturbing a trained generator: x = decode(z) + eps
/// with z ~ N(0, I) and eps ~ U(-h, h) per coordinate. The density is a
/// Monte-Carlo Gaussian-mixture surrogate over `mixture_size` anchor points
/// decoded from fixed prior draws, with per-component std = h.
class ModelPerturbation final : public Proposal {
 public:
  using Decoder = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  ModelPerturbation(Decoder decode, int latent_dim, int output_dim,
                    double noise_half_width, std::uint64_t anchor_seed,
                    int mixture_size = 32);

  int dim() const override { return output_dim_; }
  Eigen::MatrixXd sample(int n, std::uint64_t seed) const override;
  Eigen::VectorXd log_density(const Eigen::MatrixXd& points) const override;

  const Eigen::MatrixXd& anchors() const { return anchors_; }

 private:
  Decoder decode_;
  int latent_dim_, output_dim_;
  double noise_half_width_;
  Eigen::MatrixXd anchors_;  // mixture_size x output_dim
};

/// Proposal samples with their scores and normalized importance weights.
struct WeightedBatch {
  Eigen::MatrixXd points;    // N x dim
  Eigen::VectorXd raw;       // R(x_i)
  Eigen::VectorXd shaped;    // f(R(x_i)) in (0, 1]
  Eigen::VectorXd log_prop;  // log p_prop(x_i), up to a shared constant
  Eigen::VectorXd weights;   // >= 0, mean exactly 1
  bool degenerate_shaping = false;
};

/// Importance weights w_i proportional to shaped_i / p_prop(x_i), stabilized
/// by the batch max of log_prop and rescaled to mean 1. The mean-1 rescaling
/// removes the unknown partition constant without touching relative weights.
/// Throws std::runtime_error when every weight underflows to zero.
Eigen::VectorXd compute_weights(const Eigen::VectorXd& shaped,
                                const Eigen::VectorXd& log_prop);

/// Full batch assembly: sample, evaluate R (optionally on several threads),
/// shape, and weight.
WeightedBatch make_weighted_batch(const ObjectiveFn& objective, const Proposal& proposal,
                                  int n, const ShapingConfig& shaping,
                                  std::uint64_t seed, int threads = 1);

}  // namespace lsmo
