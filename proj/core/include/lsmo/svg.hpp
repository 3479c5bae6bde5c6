#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "lsmo/manifold.hpp"
#include "lsmo/objective.hpp"
#include "lsmo/planning.hpp"

namespace lsmo {

/// Objective heatmap over its box (resolution x resolution colored cells)
/// with the decoded manifold points overlaid as circles.
void emit_heatmap_plot(const ObjectiveFn& objective, int resolution,
                       const Eigen::MatrixXd& points, const std::string& path);

/// Workspace view: obstacles (plus margin rings), start/goal markers, and a
/// fan of trajectories colored by their z value.
void emit_world_plot(const World2D& world, const std::vector<Trajectory>& trajectories,
                     const std::vector<double>& z_values, const std::string& path);

/// Loss and per-channel KL training curves, one polyline each.
void emit_curves_plot(const TrainReport& report, const std::string& path);

}  // namespace lsmo
