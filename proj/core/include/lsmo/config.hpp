#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsmo/cem.hpp"
#include "lsmo/manifold.hpp"
#include "lsmo/planning.hpp"

namespace lsmo {

/// Raised for malformed configs, missing files, or bad CLI arguments; the
/// runner maps it to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode {
  kToyTrain,
  kToyEval,
  kCem,
  kPlanTrain,
  kPlanSample,
  kPlanFinetune,
  kPlot,
};

Mode parse_mode(const std::string& name);  // throws ConfigError on unknown name
std::string mode_name(Mode mode);

struct ZGridSpec {
  double lo = -1.28;
  double hi = 1.28;
  int count = 200;
};

/// "lo:hi:count", e.g. "-1.28:1.28:7".
ZGridSpec parse_z_grid(const std::string& text);

/// One experiment recipe: mode, objective or world, seeds, and the
/// per-module config blocks. Loaded from a JSON file; CLI flags override.
struct ExperimentConfig {
  Mode mode = Mode::kToyTrain;
  int objective = 2;                  // toy function id for toy/cem modes
  std::string world_file;             // planning modes
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "out";
  int threads = 1;
  ZGridSpec z_grid;
  bool z_grid_given = false;          // CLI/file provided an explicit grid
  TrainConfig train;
  CemConfig cem;
  ChompConfig chomp;
  CostConfig cost;
  int plan_waypoints = 50;
  double plan_prior_scale = 1.0;
  std::vector<std::string> checkpoints;  // inputs for eval/sample modes
  std::string plot_kind;                 // heatmap | world | curves
  std::vector<std::string> plot_inputs;  // files for the plot mode
};

ExperimentConfig load_config(const std::string& path);

/// Post-parse validation: seeds non-empty, referenced files exist, mode has
/// the inputs it needs. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

}  // namespace lsmo
