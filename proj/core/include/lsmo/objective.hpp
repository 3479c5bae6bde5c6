#pragma once

#include <Eigen/Core>
#include <functional>

namespace lsmo {

/// A scalar objective R(x) to be maximized over a box. `eval` must be pure:
/// identical input yields identical output.
struct ObjectiveFn {
  int dim = 0;
  Eigen::VectorXd lo;  // per-dimension lower bounds, lo[d] < hi[d]
  Eigen::VectorXd hi;
  std::function<double(const Eigen::VectorXd&)> eval;
};

/// The four 2-D test functions. Each is a distance-to-solution-set transform
/// R(x) = exp(-...) evaluated on the box [0,2]^2; functions 1, 2 and 4 reach
/// 1.0 inside the box, function 3 stays strictly below it.
/// Throws std::invalid_argument for func_id outside 1..4.
double eval_toy(int func_id, double x1, double x2);

/// eval_toy wrapped as an ObjectiveFn on [0,2]^2.
ObjectiveFn toy_objective(int func_id);

struct ShapingConfig {
  double alpha = 10.0;  // sharpness of the exponential shaping, > 0
};

struct ShapedScores {
  Eigen::VectorXd values;   // in (0, 1], batch max maps to exactly 1
  bool degenerate = false;  // raw max == raw min; values forced to all ones
};

/// Batch-relative exponential shaping:
///   f_i = exp(alpha * (raw_i - max) / (max - min)).
/// A degenerate batch (max == min) yields all ones with the flag set, which
/// makes the induced target density uniform over the batch.
ShapedScores shape_scores(const Eigen::VectorXd& raw, const ShapingConfig& cfg);

struct GridMax {
  Eigen::Vector2d argmax;
  double value = 0.0;
};

/// Exhaustive search over a resolution x resolution grid on [0,2]^2.
/// Deterministic brute-force reference for the toy functions.
GridMax grid_max(int func_id, int resolution);

}  // namespace lsmo
