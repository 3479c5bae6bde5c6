#include "lsmo/proposal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lsmo/parallel.hpp"
#include "lsmo/rng.hpp"

namespace lsmo {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

BoxUniform::BoxUniform(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.size() == 0) {
    throw std::invalid_argument("BoxUniform: bounds size mismatch");
  }
  if (((hi_ - lo_).array() <= 0.0).any()) {
    throw std::invalid_argument("BoxUniform: need lo < hi per dimension");
  }
}

Eigen::MatrixXd BoxUniform::sample(int n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd out(n, dim());
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim(); ++d) out(i, d) = rng.uniform(lo_(d), hi_(d));
  }
  return out;
}

Eigen::VectorXd BoxUniform::log_density(const Eigen::MatrixXd& points) const {
  if (points.cols() != dim()) throw std::invalid_argument("log_density: dim mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (int d = 0; d < dim(); ++d) {
      if (points(i, d) < lo_(d) || points(i, d) > hi_(d)) {
        out(i) = kNegInf;
        break;
      }
    }
  }
  return out;
}

DiagonalNormal::DiagonalNormal(Eigen::VectorXd mean, Eigen::VectorXd std)
    : mean_(std::move(mean)), std_(std::move(std)) {
  if (mean_.size() != std_.size() || mean_.size() == 0) {
    throw std::invalid_argument("DiagonalNormal: shape mismatch");
  }
  if ((std_.array() <= 0.0).any()) {
    throw std::invalid_argument("DiagonalNormal: std must be positive");
  }
}

Eigen::MatrixXd DiagonalNormal::sample(int n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd out(n, dim());
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim(); ++d) out(i, d) = mean_(d) + std_(d) * rng.gaussian();
  }
  return out;
}

Eigen::VectorXd DiagonalNormal::log_density(const Eigen::MatrixXd& points) const {
  if (points.cols() != dim()) throw std::invalid_argument("log_density: dim mismatch");
  Eigen::MatrixXd z = (points.rowwise() - mean_.transpose()).array().rowwise() /
                      std_.transpose().array();
  return -0.5 * z.array().square().rowwise().sum();
}

Eigen::MatrixXd build_fd_matrix(int T) {
  if (T < 1) throw std::invalid_argument("build_fd_matrix: T must be >= 1");
  // Full convolution of the interior vector with [1, -2, 1]: row t is the
  // second difference at position t of the padded sequence [0, xi, 0].
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(T + 2, T);
  for (int c = 0; c < T; ++c) {
    K(c, c) += 1.0;
    K(c + 1, c) += -2.0;
    K(c + 2, c) += 1.0;
  }
  return K;
}

TrajectoryPrior::TrajectoryPrior(int T, int D, double a, Eigen::VectorXd xi0)
    : T_(T), D_(D), a_(a), xi0_(std::move(xi0)) {
  if (T < 1 || D < 1) throw std::invalid_argument("TrajectoryPrior: T, D must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("TrajectoryPrior: scale a must be positive");
  if (xi0_.size() != static_cast<Eigen::Index>(T) * D) {
    throw std::invalid_argument("TrajectoryPrior: xi0 must have length T*D");
  }
  K_ = build_fd_matrix(T);
  A_ = K_.transpose() * K_;
  A_ = 0.5 * (A_ + A_.transpose().eval());  // enforce exact symmetry

  Eigen::LLT<Eigen::MatrixXd> lltA(A_);
  if (lltA.info() != Eigen::Success) {
    throw std::runtime_error("TrajectoryPrior: A = K^T K failed Cholesky");
  }
  // A is invertible, so the Moore-Penrose pseudo-inverse is the inverse.
  Eigen::MatrixXd Ainv = lltA.solve(Eigen::MatrixXd::Identity(T, T));
  Ainv = 0.5 * (Ainv + Ainv.transpose().eval());
  const double max_diag = Ainv.diagonal().maxCoeff();
  Rcov_ = Ainv / max_diag;                  // unit max diagonal
  precR_ = max_diag * A_;                   // exact inverse of Rcov

  Eigen::LLT<Eigen::MatrixXd> lltR(Rcov_);
  if (lltR.info() != Eigen::Success) {
    throw std::runtime_error("TrajectoryPrior: covariance failed Cholesky");
  }
  cholR_ = lltR.matrixL();
}

TrajectoryPrior build_prior(int T, int D, double a, Eigen::VectorXd xi0) {
  return TrajectoryPrior(T, D, a, std::move(xi0));
}

Eigen::MatrixXd TrajectoryPrior::sample(int n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Rng rng(seed);
  const double sqrt_a = std::sqrt(a_);
  Eigen::MatrixXd out(n, dim());
  Eigen::VectorXd g(T_);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < D_; ++d) {
      for (int t = 0; t < T_; ++t) g(t) = rng.gaussian();
      out.row(i).segment(d * T_, T_) =
          xi0_.segment(d * T_, T_) + sqrt_a * (cholR_ * g);
    }
  }
  return out;
}

Eigen::VectorXd TrajectoryPrior::log_density(const Eigen::MatrixXd& points) const {
  if (points.cols() != dim()) throw std::invalid_argument("log_density: dim mismatch");
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double q = 0.0;
    for (int d = 0; d < D_; ++d) {
      Eigen::VectorXd delta =
          points.row(i).segment(d * T_, T_).transpose() - xi0_.segment(d * T_, T_);
      q += delta.dot(precR_ * delta);
    }
    out(i) = -q / (2.0 * a_);
  }
  return out;
}

ModelPerturbation::ModelPerturbation(Decoder decode, int latent_dim, int output_dim,
                                     double noise_half_width, std::uint64_t anchor_seed,
                                     int mixture_size)
    : decode_(std::move(decode)),
      latent_dim_(latent_dim),
      output_dim_(output_dim),
      noise_half_width_(noise_half_width) {
  if (latent_dim_ < 1 || output_dim_ < 1 || mixture_size < 1) {
    throw std::invalid_argument("ModelPerturbation: bad dimensions");
  }
  // Fixed anchor set so that log_density is a pure function of the point.
  Rng rng(anchor_seed);
  anchors_.resize(mixture_size, output_dim_);
  Eigen::VectorXd z(latent_dim_);
  for (int j = 0; j < mixture_size; ++j) {
    for (int k = 0; k < latent_dim_; ++k) z(k) = rng.gaussian();
    anchors_.row(j) = decode_(z).transpose();
  }
}

Eigen::MatrixXd ModelPerturbation::sample(int n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd out(n, output_dim_);
  Eigen::VectorXd z(latent_dim_);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < latent_dim_; ++k) z(k) = rng.gaussian();
    Eigen::VectorXd x = decode_(z);
    for (int d = 0; d < output_dim_; ++d) {
      x(d) += rng.uniform(-noise_half_width_, noise_half_width_);
    }
    out.row(i) = x.transpose();
  }
  return out;
}

Eigen::VectorXd ModelPerturbation::log_density(const Eigen::MatrixXd& points) const {
  if (points.cols() != output_dim_) {
    throw std::invalid_argument("log_density: dim mismatch");
  }
  const double var = noise_half_width_ * noise_half_width_;
  const int M = static_cast<int>(anchors_.rows());
  Eigen::VectorXd out(points.rows());
  Eigen::VectorXd comp(M);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (int j = 0; j < M; ++j) {
      comp(j) = -(points.row(i) - anchors_.row(j)).squaredNorm() / (2.0 * var);
    }
    const double mx = comp.maxCoeff();
    out(i) = mx + std::log((comp.array() - mx).exp().mean());
  }
  return out;
}

Eigen::VectorXd compute_weights(const Eigen::VectorXd& shaped,
                                const Eigen::VectorXd& log_prop) {
  const Eigen::Index n = shaped.size();
  if (n < 2 || log_prop.size() != n) {
    throw std::invalid_argument("compute_weights: need equal lengths >= 2");
  }
  if (!shaped.allFinite() || !log_prop.allFinite()) {
    throw std::invalid_argument("compute_weights: inputs must be finite");
  }
  const double mx = log_prop.maxCoeff();
  Eigen::VectorXd w = shaped.array() * (-(log_prop.array() - mx)).exp();
  const double total = w.sum();
  if (!(total > 0.0)) {
    throw std::runtime_error("compute_weights: degenerate batch, all weights zero");
  }
  return w * (static_cast<double>(n) / total);
}

WeightedBatch make_weighted_batch(const ObjectiveFn& objective, const Proposal& proposal,
                                  int n, const ShapingConfig& shaping,
                                  std::uint64_t seed, int threads) {
  if (objective.dim != proposal.dim()) {
    throw std::invalid_argument("make_weighted_batch: objective/proposal dim mismatch");
  }
  WeightedBatch batch;
  batch.points = proposal.sample(n, seed);
  batch.raw.resize(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    batch.raw(static_cast<Eigen::Index>(i)) =
        objective.eval(batch.points.row(static_cast<Eigen::Index>(i)).transpose());
  });
  ShapedScores shaped = shape_scores(batch.raw, shaping);
  batch.shaped = std::move(shaped.values);
  batch.degenerate_shaping = shaped.degenerate;
  batch.log_prop = proposal.log_density(batch.points);
  batch.weights = compute_weights(batch.shaped, batch.log_prop);
  return batch;
}

}  // namespace lsmo
