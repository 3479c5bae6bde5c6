#include "lsmo/planning.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsmo {

Eigen::MatrixXd Trajectory::sequence() const {
  Eigen::MatrixXd seq(waypoints() + 2, dofs());
  seq.row(0) = start.transpose();
  seq.middleRows(1, waypoints()) = interior;
  seq.row(waypoints() + 1) = goal.transpose();
  return seq;
}

Eigen::MatrixXd straight_line_interior(const Eigen::Vector2d& start,
                                       const Eigen::Vector2d& goal, int T) {
  Eigen::MatrixXd out(T, 2);
  for (int t = 0; t < T; ++t) {
    const double frac = static_cast<double>(t + 1) / (T + 1);
    out.row(t) = (start + frac * (goal - start)).transpose();
  }
  return out;
}

Eigen::VectorXd trajectory_to_vector(const Trajectory& traj) {
  const int T = traj.waypoints();
  const int D = traj.dofs();
  Eigen::VectorXd xi(T * D);
  for (int d = 0; d < D; ++d) xi.segment(d * T, T) = traj.interior.col(d);
  return xi;
}

Trajectory vector_to_trajectory(const Eigen::VectorXd& xi, const Eigen::Vector2d& start,
                                const Eigen::Vector2d& goal, int T, double dt) {
  const int D = 2;
  if (xi.size() != static_cast<Eigen::Index>(T) * D) {
    throw std::invalid_argument("vector_to_trajectory: length must be T*2");
  }
  Trajectory traj;
  traj.start = start;
  traj.goal = goal;
  traj.dt = dt;
  traj.interior.resize(T, D);
  for (int d = 0; d < D; ++d) traj.interior.col(d) = xi.segment(d * T, T);
  return traj;
}

double signed_distance(const World2D& world, const Eigen::Vector2d& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Obstacle& obs : world.obstacles) {
    best = std::min(best, (p - obs.center).norm() - obs.radius);
  }
  return best;
}

double local_collision_cost(double d, double eps) {
  if (d > eps) return 0.0;
  if (d > 0.0) return (d - eps) * (d - eps) / (2.0 * eps);
  return -d + eps / 2.0;
}

namespace {

// derivative of local_collision_cost w.r.t. d; continuous at both branch
// boundaries (0 at d = eps, -1 at d = 0)
double local_collision_cost_ddist(double d, double eps) {
  if (d > eps) return 0.0;
  if (d > 0.0) return (d - eps) / eps;
  return -1.0;
}

// gradient of the signed distance at p: unit vector away from the nearest
// obstacle center, zero exactly at a center (measure-zero singularity)
Eigen::Vector2d signed_distance_gradient(const World2D& world, const Eigen::Vector2d& p) {
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  for (const Obstacle& obs : world.obstacles) {
    const Eigen::Vector2d delta = p - obs.center;
    const double dist = delta.norm() - obs.radius;
    if (dist < best) {
      best = dist;
      grad = delta.norm() > 0.0 ? (delta / delta.norm()).eval() : Eigen::Vector2d::Zero();
    }
  }
  return grad;
}

// velocity profile of the full sequence: one-sided at the ends, central
// differences inside
Eigen::MatrixXd velocities(const Eigen::MatrixXd& seq, double dt) {
  const Eigen::Index n = seq.rows();
  Eigen::MatrixXd vel(n, seq.cols());
  vel.row(0) = (seq.row(1) - seq.row(0)) / dt;
  for (Eigen::Index t = 1; t + 1 < n; ++t) {
    vel.row(t) = (seq.row(t + 1) - seq.row(t - 1)) / (2.0 * dt);
  }
  vel.row(n - 1) = (seq.row(n - 1) - seq.row(n - 2)) / dt;
  return vel;
}

}  // namespace

CostBreakdown trajectory_cost(const World2D& world, const Trajectory& traj,
                              const CostConfig& cfg) {
  const int T = traj.waypoints();
  const Eigen::MatrixXd seq = traj.sequence();
  const Eigen::MatrixXd vel = velocities(seq, traj.dt);

  CostBreakdown out;
  for (Eigen::Index t = 0; t < seq.rows(); ++t) {
    const double d = signed_distance(world, seq.row(t).transpose());
    const double c = std::isinf(d) ? 0.0 : local_collision_cost(d, world.margin);
    out.obstacle += 0.5 * c * vel.row(t).norm();
  }

  // acceleration of the deviation from the straight line, through the same
  // stencil as the trajectory prior
  const Eigen::MatrixXd K = build_fd_matrix(T);
  const Eigen::MatrixXd dev = traj.interior - straight_line_interior(traj.start, traj.goal, T);
  const Eigen::MatrixXd acc = K * dev / (traj.dt * traj.dt);
  out.smooth = acc.squaredNorm();

  out.total = out.obstacle + cfg.smooth_weight * out.smooth;
  return out;
}

Eigen::MatrixXd cost_gradient(const World2D& world, const Trajectory& traj,
                              const CostConfig& cfg) {
  const int T = traj.waypoints();
  const int D = traj.dofs();
  const double dt = traj.dt;
  const Eigen::MatrixXd seq = traj.sequence();
  const Eigen::MatrixXd vel = velocities(seq, dt);

  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(T, D);

  for (Eigen::Index t = 0; t < seq.rows(); ++t) {
    const Eigen::Vector2d p = seq.row(t).transpose();
    const double d = signed_distance(world, p);
    if (std::isinf(d)) continue;
    const double c = local_collision_cost(d, world.margin);
    const double dc = local_collision_cost_ddist(d, world.margin);
    const double speed = vel.row(t).norm();
    const Eigen::RowVector2d vhat =
        speed > 0.0 ? (vel.row(t) / speed).eval() : Eigen::RowVector2d::Zero().eval();

    // position dependence (interior waypoints only; endpoints are fixed)
    if (t >= 1 && t <= T) {
      grad.row(t - 1) +=
          0.5 * dc * speed * signed_distance_gradient(world, p).transpose();
    }
    // velocity dependence spreads onto the stencil neighbours
    const double u = 0.5 * c;
    if (t == 0) {
      grad.row(0) += u * vhat / dt;  // v_0 = (q_1 - q_0)/dt
    } else if (t == seq.rows() - 1) {
      grad.row(T - 1) -= u * vhat / dt;  // v_last = (q_goal - q_T)/dt
    } else {
      if (t + 1 <= T) grad.row(t) += u * vhat / (2.0 * dt);      // seq index t+1
      if (t - 1 >= 1) grad.row(t - 2) -= u * vhat / (2.0 * dt);  // seq index t-1
    }
  }

  const Eigen::MatrixXd K = build_fd_matrix(T);
  const Eigen::MatrixXd dev = traj.interior - straight_line_interior(traj.start, traj.goal, T);
  const double dt4 = dt * dt * dt * dt;
  grad += (2.0 * cfg.smooth_weight / dt4) * (K.transpose() * (K * dev));
  return grad;
}

Eigen::LLT<Eigen::MatrixXd> smoothness_factorization(int T) {
  const Eigen::MatrixXd K = build_fd_matrix(T);
  Eigen::MatrixXd A = K.transpose() * K;
  A = 0.5 * (A + A.transpose().eval());
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("smoothness_factorization: Cholesky failed");
  }
  return llt;
}

Trajectory chomp_update(const Trajectory& traj, const Eigen::MatrixXd& grad,
                        const ChompConfig& cfg, const Eigen::LLT<Eigen::MatrixXd>& A_llt) {
  if (grad.rows() != traj.waypoints() || grad.cols() != traj.dofs()) {
    throw std::invalid_argument("chomp_update: gradient shape mismatch");
  }
  Trajectory out = traj;
  out.interior -= A_llt.solve(grad) / cfg.eta;
  return out;
}

FineTuneResult fine_tune(const World2D& world, const Trajectory& traj,
                         const CostConfig& cost_cfg, const ChompConfig& chomp_cfg) {
  const Eigen::LLT<Eigen::MatrixXd> A_llt = smoothness_factorization(traj.waypoints());

  FineTuneResult result;
  result.traj = traj;
  Trajectory current = traj;
  Trajectory best = traj;
  double best_cost = trajectory_cost(world, traj, cost_cfg).total;

  for (int it = 1; it <= chomp_cfg.max_iters; ++it) {
    const Eigen::MatrixXd g = cost_gradient(world, current, cost_cfg);
    Trajectory next = chomp_update(current, g, chomp_cfg, A_llt);
    const double step = (next.interior - current.interior).cwiseAbs().maxCoeff();
    current = std::move(next);
    result.iterations = it;

    const double cost = trajectory_cost(world, current, cost_cfg).total;
    result.cost_history.push_back(cost);
    if (cost < best_cost) {
      best_cost = cost;
      best = current;
    }
    if (step < chomp_cfg.tol) {
      result.converged = true;
      break;
    }
  }

  if (result.converged) {
    result.traj = std::move(current);
    result.final_cost = result.cost_history.back();
  } else {
    result.traj = std::move(best);
    result.final_cost = best_cost;
  }
  return result;
}

bool collision_free(const World2D& world, const Trajectory& traj) {
  const Eigen::MatrixXd seq = traj.sequence();
  for (Eigen::Index t = 0; t < seq.rows(); ++t) {
    if (!(signed_distance(world, seq.row(t).transpose()) > 0.0)) return false;
  }
  constexpr int kChecksPerSegment = 10;
  for (Eigen::Index t = 0; t + 1 < seq.rows(); ++t) {
    for (int j = 1; j <= kChecksPerSegment; ++j) {
      const double frac = static_cast<double>(j) / (kChecksPerSegment + 1);
      const Eigen::Vector2d p =
          (1.0 - frac) * seq.row(t).transpose() + frac * seq.row(t + 1).transpose();
      if (!(signed_distance(world, p) > 0.0)) return false;
    }
  }
  return true;
}

TrainConfig planning_train_defaults() {
  TrainConfig cfg;
  cfg.epochs = 700;
  cfg.gamma = 10.0;
  cfg.shaping_alpha = 20.0;  // 1-D latent; 10 is the 2-D latent setting
  cfg.encoder_hidden = {300, 200};
  cfg.decoder_hidden = {200, 300};
  return cfg;
}

ObjectiveFn planning_objective(const World2D& world, int T, const CostConfig& cfg,
                               double dt) {
  ObjectiveFn f;
  f.dim = T * 2;
  f.lo.resize(f.dim);
  f.hi.resize(f.dim);
  for (int d = 0; d < 2; ++d) {
    f.lo.segment(d * T, T).setConstant(world.lo(d));
    f.hi.segment(d * T, T).setConstant(world.hi(d));
  }
  const Eigen::Vector2d start = world.start;
  const Eigen::Vector2d goal = world.goal;
  f.eval = [world, T, cfg, dt, start, goal](const Eigen::VectorXd& xi) {
    const Trajectory traj = vector_to_trajectory(xi, start, goal, T, dt);
    return -trajectory_cost(world, traj, cfg).total;
  };
  return f;
}

PlanResult plan_with_manifold(const World2D& world, const PlanConfig& cfg) {
  const int T = cfg.waypoints;
  PlanResult result;
  result.xi0 = trajectory_to_vector(
      {world.start, world.goal, straight_line_interior(world.start, world.goal, T), cfg.dt});

  const TrajectoryPrior prior(T, 2, cfg.prior_scale, result.xi0);
  const ObjectiveFn objective = planning_objective(world, T, cfg.cost, cfg.dt);
  auto [model, report] = train(objective, prior, cfg.train);
  result.model = std::move(model);
  result.report = std::move(report);
  return result;
}

Trajectory decode_trajectory(const ManifoldModel& model, const World2D& world,
                             const Eigen::VectorXd& z, int T, double dt) {
  const Eigen::VectorXd xi =
      forward(model.decoder, z.transpose()).row(0).transpose();
  return vector_to_trajectory(xi, world.start, world.goal, T, dt);
}

}  // namespace lsmo
