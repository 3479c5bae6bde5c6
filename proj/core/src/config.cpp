#include "lsmo/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "lsmo/checkpoint.hpp"

namespace lsmo {

namespace {
using nlohmann::json;
}

Mode parse_mode(const std::string& name) {
  if (name == "toy-train") return Mode::kToyTrain;
  if (name == "toy-eval") return Mode::kToyEval;
  if (name == "cem") return Mode::kCem;
  if (name == "plan-train") return Mode::kPlanTrain;
  if (name == "plan-sample") return Mode::kPlanSample;
  if (name == "plan-finetune") return Mode::kPlanFinetune;
  if (name == "plot") return Mode::kPlot;
  throw ConfigError("unknown mode '" + name + "'");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kToyTrain: return "toy-train";
    case Mode::kToyEval: return "toy-eval";
    case Mode::kCem: return "cem";
    case Mode::kPlanTrain: return "plan-train";
    case Mode::kPlanSample: return "plan-sample";
    case Mode::kPlanFinetune: return "plan-finetune";
    case Mode::kPlot: return "plot";
  }
  return "?";
}

ZGridSpec parse_z_grid(const std::string& text) {
  ZGridSpec spec;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw ConfigError("z-grid must be lo:hi:count, got '" + text + "'");
  }
  try {
    spec.lo = std::stod(text.substr(0, first));
    spec.hi = std::stod(text.substr(first + 1, second - first - 1));
    spec.count = std::stoi(text.substr(second + 1));
  } catch (const std::exception&) {
    throw ConfigError("z-grid must be lo:hi:count, got '" + text + "'");
  }
  if (spec.count < 1) throw ConfigError("z-grid count must be >= 1");
  return spec;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": parse error: " + std::string(e.what()));
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
    cfg.objective = j.value("objective", cfg.objective);
    cfg.world_file = j.value("world", cfg.world_file);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("z_grid")) {
      const auto& z = j.at("z_grid");
      cfg.z_grid.lo = z.value("lo", cfg.z_grid.lo);
      cfg.z_grid.hi = z.value("hi", cfg.z_grid.hi);
      cfg.z_grid.count = z.value("count", cfg.z_grid.count);
      cfg.z_grid_given = true;
    }
    if (j.contains("train")) cfg.train = train_config_from_json(j.at("train"), cfg.train);
    if (j.contains("cem")) {
      const auto& c = j.at("cem");
      cfg.cem.k = c.value("k", cfg.cem.k);
      cfg.cem.population = c.value("population", cfg.cem.population);
      cfg.cem.elite_fraction = c.value("elite_fraction", cfg.cem.elite_fraction);
      cfg.cem.iterations = c.value("iterations", cfg.cem.iterations);
      cfg.cem.em_iterations = c.value("em_iterations", cfg.cem.em_iterations);
      cfg.cem.var_floor = c.value("var_floor", cfg.cem.var_floor);
    }
    if (j.contains("chomp")) {
      const auto& c = j.at("chomp");
      cfg.chomp.eta = c.value("eta", cfg.chomp.eta);
      cfg.chomp.max_iters = c.value("max_iters", cfg.chomp.max_iters);
      cfg.chomp.tol = c.value("tol", cfg.chomp.tol);
    }
    if (j.contains("cost")) {
      cfg.cost.smooth_weight = j.at("cost").value("smooth_weight", cfg.cost.smooth_weight);
    }
    if (j.contains("plan")) {
      const auto& p = j.at("plan");
      cfg.plan_waypoints = p.value("waypoints", cfg.plan_waypoints);
      cfg.plan_prior_scale = p.value("prior_scale", cfg.plan_prior_scale);
    }
    if (j.contains("checkpoints")) {
      cfg.checkpoints = j.at("checkpoints").get<std::vector<std::string>>();
    }
    cfg.plot_kind = j.value("plot_kind", cfg.plot_kind);
    if (j.contains("plot_inputs")) {
      cfg.plot_inputs = j.at("plot_inputs").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + std::string(e.what()));
  }
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("seed list is empty");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");

  const bool planning = cfg.mode == Mode::kPlanTrain || cfg.mode == Mode::kPlanSample ||
                        cfg.mode == Mode::kPlanFinetune;
  const bool toy = cfg.mode == Mode::kToyTrain || cfg.mode == Mode::kToyEval ||
                   cfg.mode == Mode::kCem;
  if (toy && (cfg.objective < 1 || cfg.objective > 4)) {
    throw ConfigError("objective must be a toy function id in 1..4");
  }
  if (planning) {
    if (cfg.world_file.empty()) throw ConfigError("planning modes need a world file");
    if (!std::filesystem::exists(cfg.world_file)) {
      throw ConfigError("world file does not exist: " + cfg.world_file);
    }
    if (cfg.plan_waypoints < 1) throw ConfigError("plan.waypoints must be >= 1");
    if (!(cfg.plan_prior_scale > 0.0)) throw ConfigError("plan.prior_scale must be > 0");
  }
  const bool needs_checkpoints = cfg.mode == Mode::kToyEval ||
                                 cfg.mode == Mode::kPlanSample ||
                                 cfg.mode == Mode::kPlanFinetune;
  if (needs_checkpoints) {
    if (cfg.checkpoints.empty()) {
      throw ConfigError(mode_name(cfg.mode) + " needs at least one checkpoint");
    }
    for (const auto& p : cfg.checkpoints) {
      if (!std::filesystem::exists(p)) {
        throw ConfigError("checkpoint does not exist: " + p);
      }
    }
  }
  if (cfg.mode == Mode::kPlot) {
    if (cfg.plot_kind.empty()) throw ConfigError("plot mode needs plot_kind");
    for (const auto& p : cfg.plot_inputs) {
      if (!std::filesystem::exists(p)) {
        throw ConfigError("plot input does not exist: " + p);
      }
    }
  }
}

}  // namespace lsmo
