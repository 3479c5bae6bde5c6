#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "lsmo/manifold.hpp"

namespace lsmo {

/// Human-readable JSON checkpoint: schema version, architecture, flat
/// parameter arrays in layer order, decoder variance, a config echo, and the
/// training seed. save -> load -> save is byte identical.
struct ModelCheckpoint {
  ManifoldModel model;
  nlohmann::json config_echo;
  std::uint64_t seed = 0;
};

void save_model(const ModelCheckpoint& ckpt, const std::string& path);

/// Throws std::runtime_error naming the path and offending field on version
/// mismatch, shape mismatch, or a corrupt file.
ModelCheckpoint load_model(const std::string& path);

/// TrainConfig <-> JSON (the checkpoint's config echo and the config file
/// share this representation).
nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace lsmo
