#include "lsmo/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace lsmo {

namespace {

using nlohmann::json;

constexpr const char* kCheckpointSchema = "lsmo-checkpoint-v1";

json net_to_json(const DenseNet& net) {
  json j;
  j["sizes"] = net.sizes;
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (int l = 0; l < net.num_layers(); ++l) {
    json wl = json::array();
    for (Eigen::Index r = 0; r < net.W[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < net.W[l].cols(); ++c) wl.push_back(net.W[l](r, c));
    }
    j["weights"].push_back(std::move(wl));
    json bl = json::array();
    for (Eigen::Index r = 0; r < net.b[l].size(); ++r) bl.push_back(net.b[l](r));
    j["biases"].push_back(std::move(bl));
  }
  return j;
}

DenseNet net_from_json(const json& j, const std::string& path, const std::string& which) {
  const auto fail = [&](const std::string& what) -> std::runtime_error {
    return std::runtime_error("checkpoint " + path + ": " + which + ": " + what);
  };
  DenseNet net;
  try {
    net.sizes = j.at("sizes").get<std::vector<int>>();
  } catch (const json::exception&) {
    throw fail("missing or malformed 'sizes'");
  }
  if (net.sizes.size() < 2) throw fail("'sizes' must list at least two layers");
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  const std::size_t L = net.sizes.size() - 1;
  if (weights.size() != L || biases.size() != L) {
    throw fail("layer count does not match 'sizes'");
  }
  for (std::size_t l = 0; l < L; ++l) {
    const int rows = net.sizes[l + 1];
    const int cols = net.sizes[l];
    if (weights[l].size() != static_cast<std::size_t>(rows) * cols) {
      throw fail("weight array " + std::to_string(l) + " has wrong length");
    }
    if (biases[l].size() != static_cast<std::size_t>(rows)) {
      throw fail("bias array " + std::to_string(l) + " has wrong length");
    }
    Eigen::MatrixXd W(rows, cols);
    std::size_t idx = 0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) W(r, c) = weights[l][idx++].get<double>();
    }
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) b(r) = biases[l][r].get<double>();
    net.W.push_back(std::move(W));
    net.b.push_back(std::move(b));
  }
  return net;
}

}  // namespace

void save_model(const ModelCheckpoint& ckpt, const std::string& path) {
  json j;
  j["schema"] = kCheckpointSchema;
  j["latent_dim"] = ckpt.model.latent_dim;
  j["dec_var"] = ckpt.model.dec_var;
  j["encoder"] = net_to_json(ckpt.model.encoder);
  j["decoder"] = net_to_json(ckpt.model.decoder);
  j["train_config"] = ckpt.config_echo;
  j["seed"] = ckpt.seed;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out << j.dump(2) << '\n';
}

ModelCheckpoint load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint " + path + ": corrupt file: " + e.what());
  }
  if (j.value("schema", "") != kCheckpointSchema) {
    throw std::runtime_error("checkpoint " + path + ": field 'schema': expected '" +
                             std::string(kCheckpointSchema) + "', got '" +
                             j.value("schema", "<missing>") + "'");
  }
  ModelCheckpoint ckpt;
  try {
    ckpt.model.latent_dim = j.at("latent_dim").get<int>();
    ckpt.model.dec_var = j.at("dec_var").get<double>();
    ckpt.seed = j.at("seed").get<std::uint64_t>();
    ckpt.config_echo = j.value("train_config", json::object());
  } catch (const json::exception& e) {
    throw std::runtime_error("checkpoint " + path + ": missing field: " + e.what());
  }
  ckpt.model.encoder = net_from_json(j.at("encoder"), path, "encoder");
  ckpt.model.decoder = net_from_json(j.at("decoder"), path, "decoder");

  if (ckpt.model.encoder.output_dim() != 2 * ckpt.model.latent_dim) {
    throw std::runtime_error("checkpoint " + path +
                             ": encoder output width does not match latent_dim");
  }
  if (ckpt.model.decoder.input_dim() != ckpt.model.latent_dim) {
    throw std::runtime_error("checkpoint " + path +
                             ": decoder input width does not match latent_dim");
  }
  if (ckpt.model.decoder.output_dim() != ckpt.model.encoder.input_dim()) {
    throw std::runtime_error("checkpoint " + path +
                             ": encoder/decoder dimensions are inconsistent");
  }
  return ckpt;
}

nlohmann::json train_config_to_json(const TrainConfig& cfg) {
  json j;
  j["n_samples"] = cfg.n_samples;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["lr"] = cfg.lr;
  j["gamma"] = cfg.gamma;
  j["capacity_max"] = cfg.capacity_max;
  j["capacity_warmup_frac"] = cfg.capacity_warmup_frac;
  j["shaping_alpha"] = cfg.shaping_alpha;
  j["dec_var"] = cfg.dec_var;
  j["latent_dim"] = cfg.latent_dim;
  j["encoder_hidden"] = cfg.encoder_hidden;
  j["decoder_hidden"] = cfg.decoder_hidden;
  j["seed"] = cfg.seed;
  j["outer_iterations"] = cfg.outer_iterations;
  j["perturb_noise"] = cfg.perturb_noise;
  j["threads"] = cfg.threads;
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base) {
  TrainConfig cfg = base;
  cfg.n_samples = j.value("n_samples", cfg.n_samples);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.lr = j.value("lr", cfg.lr);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.capacity_max = j.value("capacity_max", cfg.capacity_max);
  cfg.capacity_warmup_frac = j.value("capacity_warmup_frac", cfg.capacity_warmup_frac);
  cfg.shaping_alpha = j.value("shaping_alpha", cfg.shaping_alpha);
  cfg.dec_var = j.value("dec_var", cfg.dec_var);
  cfg.latent_dim = j.value("latent_dim", cfg.latent_dim);
  cfg.encoder_hidden = j.value("encoder_hidden", cfg.encoder_hidden);
  cfg.decoder_hidden = j.value("decoder_hidden", cfg.decoder_hidden);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.outer_iterations = j.value("outer_iterations", cfg.outer_iterations);
  cfg.perturb_noise = j.value("perturb_noise", cfg.perturb_noise);
  cfg.threads = j.value("threads", cfg.threads);
  return cfg;
}

}  // namespace lsmo
