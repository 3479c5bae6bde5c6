#include "lsmo/manifold.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lsmo/rng.hpp"

namespace lsmo {

namespace {
constexpr double kLogvarClamp = 10.0;
}

ManifoldModel init_model(int input_dim, int latent_dim,
                         const std::vector<int>& encoder_hidden,
                         const std::vector<int>& decoder_hidden, double dec_var,
                         std::uint64_t seed) {
  if (input_dim < 1 || latent_dim < 1) {
    throw std::invalid_argument("init_model: dimensions must be positive");
  }
  if (!(dec_var > 0.0)) {
    throw std::invalid_argument("init_model: dec_var must be positive");
  }
  ManifoldModel m;
  m.latent_dim = latent_dim;
  m.dec_var = dec_var;

  std::vector<int> enc_sizes{input_dim};
  enc_sizes.insert(enc_sizes.end(), encoder_hidden.begin(), encoder_hidden.end());
  enc_sizes.push_back(2 * latent_dim);
  std::vector<int> dec_sizes{latent_dim};
  dec_sizes.insert(dec_sizes.end(), decoder_hidden.begin(), decoder_hidden.end());
  dec_sizes.push_back(input_dim);

  m.encoder = init_net(enc_sizes, derive_seed(seed, 1));
  m.decoder = init_net(dec_sizes, derive_seed(seed, 2));
  return m;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> encode(const ManifoldModel& model,
                                                   const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd out = forward(model.encoder, x);
  if (!out.allFinite()) {
    throw std::runtime_error("encode: non-finite encoder output");
  }
  const int L = model.latent_dim;
  Eigen::MatrixXd mu = out.leftCols(L);
  Eigen::MatrixXd logvar =
      out.rightCols(L).cwiseMax(-kLogvarClamp).cwiseMin(kLogvarClamp);
  return {std::move(mu), std::move(logvar)};
}

Eigen::MatrixXd reparameterize(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& logvar,
                               const Eigen::MatrixXd& eps) {
  return mu.array() + (logvar.array() / 2.0).exp() * eps.array();
}

Eigen::MatrixXd gaussian_kl(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& logvar) {
  return 0.5 *
         (mu.array().square() + logvar.array().exp() - 1.0 - logvar.array()).matrix();
}

Eigen::VectorXd recon_loglik(const ManifoldModel& model, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd mean = forward(model.decoder, z);
  return -(mean - x).rowwise().squaredNorm() / (2.0 * model.dec_var);
}

double weighted_loss(const ManifoldModel& model, const Eigen::MatrixXd& x,
                     const Eigen::VectorXd& weights, double capacity, double gamma,
                     const Eigen::MatrixXd& eps, LossGrads* grads,
                     Eigen::VectorXd* kl_channel_sum) {
  const Eigen::Index B = x.rows();
  const int L = model.latent_dim;
  if (weights.size() != B || eps.rows() != B || eps.cols() != L) {
    throw std::invalid_argument("weighted_loss: shape mismatch");
  }

  ForwardCache enc_cache;
  const Eigen::MatrixXd enc_out = forward(model.encoder, x, grads ? &enc_cache : nullptr);
  const Eigen::MatrixXd mu = enc_out.leftCols(L);
  const Eigen::MatrixXd raw_logvar = enc_out.rightCols(L);
  const Eigen::MatrixXd logvar =
      raw_logvar.cwiseMax(-kLogvarClamp).cwiseMin(kLogvarClamp);

  const Eigen::MatrixXd z = reparameterize(mu, logvar, eps);
  ForwardCache dec_cache;
  const Eigen::MatrixXd dec_mean = forward(model.decoder, z, grads ? &dec_cache : nullptr);

  const Eigen::MatrixXd resid = dec_mean - x;
  const Eigen::VectorXd recon = -resid.rowwise().squaredNorm() / (2.0 * model.dec_var);
  const Eigen::MatrixXd kl = gaussian_kl(mu, logvar);
  const Eigen::VectorXd kl_total = kl.rowwise().sum();
  if (kl_channel_sum) *kl_channel_sum = kl.colwise().sum().transpose();

  const Eigen::VectorXd cap_diff = kl_total.array() - capacity;
  const Eigen::VectorXd per_sample = -recon.array() + gamma * cap_diff.array().abs();

  double loss = 0.0;
  for (Eigen::Index i = 0; i < B; ++i) {
    const double term = weights(i) * per_sample(i);
    if (!std::isfinite(term)) {
      throw std::runtime_error("weighted_loss: non-finite loss at sample " +
                               std::to_string(i));
    }
    loss += term;
  }
  loss /= static_cast<double>(B);
  if (!grads) return loss;

  const double inv_b = 1.0 / static_cast<double>(B);
  // d loss / d decoder mean
  Eigen::MatrixXd dec_up = resid / model.dec_var;
  dec_up.array().colwise() *= inv_b * weights.array();
  const Eigen::MatrixXd dz = backward(model.decoder, dec_cache, dec_up, grads->dec);

  // sign subgradient of |KL - capacity|, zero exactly at the kink
  Eigen::VectorXd s(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    const double sgn = cap_diff(i) > 0.0 ? 1.0 : (cap_diff(i) < 0.0 ? -1.0 : 0.0);
    s(i) = inv_b * weights(i) * gamma * sgn;
  }

  Eigen::MatrixXd dmu = dz + mu.cwiseProduct(s.replicate(1, L));
  Eigen::MatrixXd dlogvar =
      dz.cwiseProduct((logvar.array() / 2.0).exp().matrix().cwiseProduct(eps)) * 0.5 +
      0.5 * (logvar.array().exp() - 1.0).matrix().cwiseProduct(s.replicate(1, L));
  // gradient does not flow through the clamp where it saturates
  dlogvar = dlogvar.cwiseProduct(
      (raw_logvar.array().abs() < kLogvarClamp).cast<double>().matrix());

  Eigen::MatrixXd enc_up(B, 2 * L);
  enc_up << dmu, dlogvar;
  backward(model.encoder, enc_cache, enc_up, grads->enc);
  return loss;
}

double capacity_at(int epoch, const TrainConfig& config) {
  const double warmup = config.capacity_warmup_frac * config.epochs;
  if (warmup <= 0.0) return config.capacity_max;
  const double frac = std::min(1.0, static_cast<double>(epoch) / warmup);
  return config.capacity_max * frac;
}

namespace {

void run_training_round(ManifoldModel& model, const WeightedBatch& batch,
                        const TrainConfig& cfg, TrainReport& report, Rng& rng) {
  const Eigen::Index n = batch.points.rows();
  const int L = model.latent_dim;
  AdamState enc_state = AdamState::for_net(model.encoder, cfg.lr);
  AdamState dec_state = AdamState::for_net(model.decoder, cfg.lr);
  LossGrads grads{NetGrads::zeros_like(model.encoder), NetGrads::zeros_like(model.decoder)};

  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  const int epoch_base = static_cast<int>(report.loss.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double cap = capacity_at(epoch, cfg);
    shuffle(idx, rng);

    double epoch_loss = 0.0;
    Eigen::VectorXd epoch_kl = Eigen::VectorXd::Zero(L);
    int n_batches = 0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index b = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Eigen::MatrixXd xb(b, model.input_dim());
      Eigen::VectorXd wb(b);
      for (Eigen::Index r = 0; r < b; ++r) {
        xb.row(r) = batch.points.row(idx[start + r]);
        wb(r) = batch.weights(idx[start + r]);
      }
      Eigen::MatrixXd eps(b, L);
      for (Eigen::Index r = 0; r < b; ++r) {
        for (int c = 0; c < L; ++c) eps(r, c) = rng.gaussian();
      }

      grads.enc.setZero();
      grads.dec.setZero();
      Eigen::VectorXd kl_sum;
      epoch_loss += weighted_loss(model, xb, wb, cap, cfg.gamma, eps, &grads, &kl_sum);
      epoch_kl += kl_sum;
      ++n_batches;

      adam_step(model.encoder, grads.enc, enc_state);
      adam_step(model.decoder, grads.dec, dec_state);
    }
    report.loss.push_back(epoch_loss / n_batches);
    report.kl_per_channel.row(epoch_base + epoch) =
        (epoch_kl / static_cast<double>(n)).transpose();
  }
}

}  // namespace

std::pair<ManifoldModel, TrainReport> train(const ObjectiveFn& objective,
                                            const Proposal& proposal,
                                            const TrainConfig& cfg) {
  if (objective.dim != proposal.dim()) {
    throw std::invalid_argument("train: objective/proposal dim mismatch");
  }
  const auto t0 = std::chrono::steady_clock::now();

  ManifoldModel model =
      init_model(objective.dim, cfg.latent_dim, cfg.encoder_hidden, cfg.decoder_hidden,
                 cfg.dec_var, derive_seed(cfg.seed, 1));
  TrainReport report;
  report.kl_per_channel =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg.epochs) * cfg.outer_iterations,
                            cfg.latent_dim);

  const ShapingConfig shaping{cfg.shaping_alpha};
  Rng train_rng(derive_seed(cfg.seed, 2));

  for (int outer = 0; outer < cfg.outer_iterations; ++outer) {
    WeightedBatch batch;
    if (outer == 0) {
      batch = make_weighted_batch(objective, proposal, cfg.n_samples, shaping,
                                  derive_seed(cfg.seed, 100), cfg.threads);
    } else {
      // Refresh the proposal around the current model (Algorithm 1 step 5).
      const ManifoldModel snapshot = model;
      ModelPerturbation refreshed(
          [snapshot](const Eigen::VectorXd& zv) {
            return forward(snapshot.decoder, zv.transpose()).row(0).transpose().eval();
          },
          cfg.latent_dim, objective.dim, cfg.perturb_noise,
          derive_seed(cfg.seed, 200 + outer));
      batch = make_weighted_batch(objective, refreshed, cfg.n_samples, shaping,
                                  derive_seed(cfg.seed, 100 + outer), cfg.threads);
    }
    report.degenerate_shaping = report.degenerate_shaping || batch.degenerate_shaping;
    report.ess = static_cast<double>(cfg.n_samples) * static_cast<double>(cfg.n_samples) /
                 batch.weights.squaredNorm();
    run_training_round(model, batch, cfg, report, train_rng);
  }

  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(model), std::move(report)};
}

Eigen::MatrixXd sample_manifold(const ManifoldModel& model,
                                const std::vector<Eigen::VectorXd>& z_values) {
  Eigen::MatrixXd zs(static_cast<Eigen::Index>(z_values.size()), model.latent_dim);
  for (std::size_t i = 0; i < z_values.size(); ++i) {
    if (z_values[i].size() != model.latent_dim) {
      throw std::invalid_argument("sample_manifold: latent dim mismatch");
    }
    zs.row(static_cast<Eigen::Index>(i)) = z_values[i].transpose();
  }
  return forward(model.decoder, zs);
}

std::vector<Eigen::VectorXd> z_grid(int latent_dim, double lo, double hi, int count) {
  if (latent_dim < 1 || count < 1) {
    throw std::invalid_argument("z_grid: bad arguments");
  }
  std::vector<Eigen::VectorXd> zs;
  zs.reserve(static_cast<std::size_t>(latent_dim) * count);
  for (int channel = 0; channel < latent_dim; ++channel) {
    for (int i = 0; i < count; ++i) {
      const double v = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
      Eigen::VectorXd z = Eigen::VectorXd::Zero(latent_dim);
      z(channel) = v;
      zs.push_back(std::move(z));
    }
  }
  return zs;
}

ManifoldEval evaluate_manifold(const ManifoldModel& model, const ObjectiveFn& objective,
                               const std::vector<Eigen::VectorXd>& zs) {
  if (objective.dim != model.input_dim()) {
    throw std::invalid_argument("evaluate_manifold: dim mismatch");
  }
  ManifoldEval eval;
  eval.points = sample_manifold(model, zs);
  eval.scores.resize(eval.points.rows());
  for (Eigen::Index i = 0; i < eval.points.rows(); ++i) {
    eval.scores(i) = objective.eval(eval.points.row(i).transpose());
  }
  eval.mean = eval.scores.mean();
  const double var =
      (eval.scores.array() - eval.mean).square().sum() / eval.scores.size();
  eval.stddev = std::sqrt(var);
  return eval;
}

}  // namespace lsmo
