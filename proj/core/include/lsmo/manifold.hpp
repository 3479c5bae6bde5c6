#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "lsmo/objective.hpp"
#include "lsmo/proposal.hpp"
#include "lsmo/tinynet.hpp"

namespace lsmo {

/// Latent-conditioned Gaussian generator. The encoder maps a point to the
/// diagonal-Gaussian posterior over z (outputs mu and log-variance side by
/// side); the decoder maps z to the observation mean. The latent prior is
/// the standard normal and is not learned.
struct ManifoldModel {
  DenseNet encoder;  // input_dim -> ... -> 2*latent_dim
  DenseNet decoder;  // latent_dim -> ... -> input_dim
  int latent_dim = 1;
  double dec_var = 0.05;  // isotropic decoder observation variance

  int input_dim() const { return encoder.input_dim(); }
};

ManifoldModel init_model(int input_dim, int latent_dim,
                         const std::vector<int>& encoder_hidden,
                         const std::vector<int>& decoder_hidden, double dec_var,
                         std::uint64_t seed);

/// Posterior parameters for a batch; log-variances clamped to [-10, 10].
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> encode(const ManifoldModel& model,
                                                   const Eigen::MatrixXd& x);

/// z = mu + exp(logvar/2) * eps, elementwise.
Eigen::MatrixXd reparameterize(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& logvar,
                               const Eigen::MatrixXd& eps);

/// Per-channel KL(N(mu, exp(logvar)) || N(0, 1)) = (mu^2 + e^lv - 1 - lv)/2,
/// elementwise; sum a row for the total KL of one sample.
Eigen::MatrixXd gaussian_kl(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& logvar);

/// Gaussian reconstruction log-likelihood per row, additive constant dropped:
/// -|x - decode(z)|^2 / (2 dec_var).
Eigen::VectorXd recon_loglik(const ManifoldModel& model, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& z);

struct LossGrads {
  NetGrads enc;
  NetGrads dec;
};

/// Weighted capacity-constrained loss over a minibatch:
///   (1/B) sum_i w_i * ( -recon_i + gamma * |KL_i - capacity| ),
/// minimized by train(). `eps` fixes the reparameterization draws (B x L).
/// Exact reparameterized gradients are accumulated into `grads` when given;
/// the |.| term uses the sign subgradient (0 at the kink). `kl_channel_sum`,
/// when given, receives the per-channel KL summed over the batch rows.
/// Throws std::runtime_error naming the sample index if the loss goes
/// non-finite.
double weighted_loss(const ManifoldModel& model, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& weights, double capacity, double gamma,
                     const Eigen::MatrixXd& eps, LossGrads* grads = nullptr,
                     Eigen::VectorXd* kl_channel_sum = nullptr);

struct TrainConfig {
  int n_samples = 20000;
  int epochs = 350;
  int batch_size = 250;
  double lr = 0.001;
  double gamma = 0.1;              // capacity-term coefficient
  double capacity_max = 5.0;       // nats at the end of the warmup ramp
  double capacity_warmup_frac = 0.8;
  double shaping_alpha = 10.0;
  double dec_var = 0.05;
  int latent_dim = 1;
  std::vector<int> encoder_hidden = {64, 64};
  std::vector<int> decoder_hidden = {64, 64};
  std::uint64_t seed = 0;
  int outer_iterations = 1;        // proposal refresh rounds
  double perturb_noise = 0.1;      // half-width of the refresh perturbation
  int threads = 1;                 // objective-evaluation fan-out
};

/// Capacity target: linear ramp 0 -> capacity_max over the first
/// capacity_warmup_frac * epochs, constant afterwards.
double capacity_at(int epoch, const TrainConfig& config);

struct TrainReport {
  std::vector<double> loss;        // one entry per epoch
  Eigen::MatrixXd kl_per_channel;  // epochs x latent_dim, batch-mean KL
  double ess = 0.0;                // effective sample size of the weights
  double wall_time_sec = 0.0;
  bool degenerate_shaping = false;
};

/// Full training loop: draw N proposal samples, evaluate and weight them,
/// then run minibatch Adam on the weighted loss for the configured number
/// of epochs. With outer_iterations > 1 the proposal is replaced by a
/// perturbed-model proposal between rounds and the loop repeats on the same
/// model. Deterministic per config seed.
std::pair<ManifoldModel, TrainReport> train(const ObjectiveFn& objective,
                                            const Proposal& proposal,
                                            const TrainConfig& config);

/// Decoder means for a list of latent points (posterior noise excluded).
Eigen::MatrixXd sample_manifold(const ManifoldModel& model,
                                const std::vector<Eigen::VectorXd>& z_values);

/// Latent sweep used for evaluation: `count` points linearly spaced in
/// [lo, hi] per channel, with the other channels held at zero. For a 1-D
/// latent this is a plain grid of `count` points.
std::vector<Eigen::VectorXd> z_grid(int latent_dim, double lo, double hi, int count);

struct ManifoldEval {
  double mean = 0.0;
  double stddev = 0.0;
  Eigen::VectorXd scores;  // objective value per grid point
  Eigen::MatrixXd points;  // decoded grid points
};

/// Evaluates the objective at the decoded z-grid points.
ManifoldEval evaluate_manifold(const ManifoldModel& model, const ObjectiveFn& objective,
                               const std::vector<Eigen::VectorXd>& zs);

}  // namespace lsmo
