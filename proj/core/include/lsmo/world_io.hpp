#pragma once

#include <string>

#include "lsmo/planning.hpp"

namespace lsmo {

/// World files are JSON documents with a `schema` field ("lsmo-world-v1"),
/// workspace bounds, start/goal, margin, and a list of circular obstacles.
World2D load_world(const std::string& path);
void save_world(const World2D& world, const std::string& path);

/// The three benchmark layouts: a single centered obstacle between start and
/// goal, a two-obstacle corridor, and an off-axis obstacle.
World2D benchmark_world(int id);

}  // namespace lsmo
