#include "lsmo/world_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace lsmo {

namespace {

using nlohmann::json;

constexpr const char* kWorldSchema = "lsmo-world-v1";

Eigen::Vector2d read_vec2(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) {
    throw std::runtime_error("world file: field '" + field + "' must be a 2-array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

World2D load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("world file: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("world file " + path + ": parse error: " + e.what());
  }
  if (j.value("schema", "") != kWorldSchema) {
    throw std::runtime_error("world file " + path + ": unsupported schema '" +
                             j.value("schema", "<missing>") + "'");
  }
  World2D w;
  w.name = j.value("name", "");
  w.margin = j.at("margin").get<double>();
  w.lo = read_vec2(j.at("bounds").at("lo"), "bounds.lo");
  w.hi = read_vec2(j.at("bounds").at("hi"), "bounds.hi");
  w.start = read_vec2(j.at("start"), "start");
  w.goal = read_vec2(j.at("goal"), "goal");
  for (const auto& o : j.at("obstacles")) {
    Obstacle obs;
    obs.center = read_vec2(o.at("center"), "obstacles[].center");
    obs.radius = o.at("radius").get<double>();
    if (!(obs.radius > 0.0)) {
      throw std::runtime_error("world file " + path + ": obstacle radius must be > 0");
    }
    w.obstacles.push_back(obs);
  }
  if (!(w.margin > 0.0)) {
    throw std::runtime_error("world file " + path + ": margin must be > 0");
  }
  return w;
}

void save_world(const World2D& world, const std::string& path) {
  json j;
  j["schema"] = kWorldSchema;
  j["name"] = world.name;
  j["margin"] = world.margin;
  j["bounds"]["lo"] = {world.lo(0), world.lo(1)};
  j["bounds"]["hi"] = {world.hi(0), world.hi(1)};
  j["start"] = {world.start(0), world.start(1)};
  j["goal"] = {world.goal(0), world.goal(1)};
  j["obstacles"] = json::array();
  for (const Obstacle& o : world.obstacles) {
    j["obstacles"].push_back({{"center", {o.center(0), o.center(1)}}, {"radius", o.radius}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("world file: cannot write " + path);
  out << j.dump(2) << '\n';
}

World2D benchmark_world(int id) {
  World2D w;
  w.lo = {0.0, 0.0};
  w.hi = {4.0, 4.0};
  w.margin = 0.2;
  w.start = {0.5, 2.0};
  w.goal = {3.5, 2.0};
  switch (id) {
    case 1:
      w.name = "single-center";
      w.obstacles = {{{2.0, 2.0}, 0.4}};
      break;
    case 2:
      w.name = "corridor";
      w.obstacles = {{{1.6, 1.1}, 0.45}, {{2.4, 2.9}, 0.45}};
      break;
    case 3:
      w.name = "off-axis";
      w.obstacles = {{{2.2, 2.35}, 0.5}};
      break;
    default:
      throw std::invalid_argument("benchmark_world: id must be 1, 2 or 3");
  }
  return w;
}

}  // namespace lsmo
