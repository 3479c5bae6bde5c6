#include "lsmo/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace lsmo {

namespace {

// Distance terms of the four test functions, written exactly as defined,
// including the (0.09+1)^2 and (0.04+1)^2 mid-branch denominators.
double toy1_d(double x1, double x2) {
  if (x1 < 0.5) {
    return std::sqrt((x2 - 1.05) * (x2 - 1.05) + (x1 - 0.5) * (x1 - 0.5));
  }
  if (x1 < 1.5) {
    return std::abs(-0.3 * x1 - x2 + 1.2) / ((0.09 + 1.0) * (0.09 + 1.0));
  }
  return std::sqrt((x2 - 0.75) * (x2 - 0.75) + (x1 - 1.5) * (x1 - 1.5));
}

double toy3_d(double x1, double x2) {
  if (x1 < 0.7) {
    return std::sqrt((x2 - 0.94) * (x2 - 0.94) + (x1 - 0.7) * (x1 - 0.7));
  }
  if (x1 < 1.4) {
    return std::abs(0.2 * x1 - x2 + 0.8) / ((0.04 + 1.0) * (0.04 + 1.0));
  }
  return std::sqrt((x2 - 1.08) * (x2 - 1.08) + (x1 - 1.4) * (x1 - 1.4));
}

}  // namespace

double eval_toy(int func_id, double x1, double x2) {
  switch (func_id) {
    case 1:
      return std::exp(-toy1_d(x1, x2));
    case 2: {
      const double d = std::abs((x2 - 1.5) * (x2 - 1.5) + (x1 + 1.0) * (x1 + 1.0) - 2.5);
      return std::exp(-d / 10.0);
    }
    case 3:
      return std::exp(-(toy3_d(x1, x2) + 0.2 * x2 + 0.14));
    case 4: {
      const double d = std::abs((x2 - 1.0) * (x2 - 1.0) + (x1 - 1.0) * (x1 - 1.0) - 0.5);
      return std::exp(-d / 10.0);
    }
    default:
      throw std::invalid_argument("eval_toy: func_id must be in 1..4, got " +
                                  std::to_string(func_id));
  }
}

ObjectiveFn toy_objective(int func_id) {
  if (func_id < 1 || func_id > 4) {
    throw std::invalid_argument("toy_objective: func_id must be in 1..4");
  }
  ObjectiveFn f;
  f.dim = 2;
  f.lo = Eigen::Vector2d(0.0, 0.0);
  f.hi = Eigen::Vector2d(2.0, 2.0);
  f.eval = [func_id](const Eigen::VectorXd& x) {
    return eval_toy(func_id, x(0), x(1));
  };
  return f;
}

ShapedScores shape_scores(const Eigen::VectorXd& raw, const ShapingConfig& cfg) {
  if (raw.size() < 2) {
    throw std::invalid_argument("shape_scores: need at least 2 scores");
  }
  if (!(cfg.alpha > 0.0)) {
    throw std::invalid_argument("shape_scores: alpha must be positive");
  }
  ShapedScores out;
  const double mx = raw.maxCoeff();
  const double mn = raw.minCoeff();
  if (mx == mn) {
    out.values = Eigen::VectorXd::Ones(raw.size());
    out.degenerate = true;
    return out;
  }
  out.values = (cfg.alpha * (raw.array() - mx) / (mx - mn)).exp();
  return out;
}

GridMax grid_max(int func_id, int resolution) {
  if (resolution < 100) {
    throw std::invalid_argument("grid_max: resolution must be >= 100");
  }
  GridMax best;
  best.value = -std::numeric_limits<double>::infinity();
  const double step = 2.0 / (resolution - 1);
  for (int i = 0; i < resolution; ++i) {
    const double x1 = i * step;
    for (int j = 0; j < resolution; ++j) {
      const double x2 = j * step;
      const double v = eval_toy(func_id, x1, x2);
      if (v > best.value) {
        best.value = v;
        best.argmax = Eigen::Vector2d(x1, x2);
      }
    }
  }
  return best;
}

}  // namespace lsmo
