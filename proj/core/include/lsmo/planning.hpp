#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <string>
#include <vector>

#include "lsmo/manifold.hpp"
#include "lsmo/objective.hpp"
#include "lsmo/proposal.hpp"

namespace lsmo {

struct Obstacle {
  Eigen::Vector2d center;
  double radius = 0.0;
};

/// Planar workspace with circular obstacles for a point robot.
struct World2D {
  std::vector<Obstacle> obstacles;
  double margin = 0.2;  // clearance epsilon of the local collision cost
  Eigen::Vector2d lo{0.0, 0.0};
  Eigen::Vector2d hi{4.0, 4.0};
  Eigen::Vector2d start{0.0, 0.0};
  Eigen::Vector2d goal{0.0, 0.0};
  std::string name;
};

/// Discretized path: fixed start/goal endpoints plus T free interior
/// waypoints per DoF. Optimizers touch only `interior`.
struct Trajectory {
  Eigen::Vector2d start;
  Eigen::Vector2d goal;
  Eigen::MatrixXd interior;  // T x D
  double dt = 1.0;

  int waypoints() const { return static_cast<int>(interior.rows()); }
  int dofs() const { return static_cast<int>(interior.cols()); }
  /// Full sequence including endpoints, (T+2) x D.
  Eigen::MatrixXd sequence() const;
};

/// Interior of the linear interpolation start -> goal (T rows).
Eigen::MatrixXd straight_line_interior(const Eigen::Vector2d& start,
                                       const Eigen::Vector2d& goal, int T);

/// Interior waypoints flattened to per-DoF blocks (matches TrajectoryPrior).
Eigen::VectorXd trajectory_to_vector(const Trajectory& traj);
Trajectory vector_to_trajectory(const Eigen::VectorXd& xi, const Eigen::Vector2d& start,
                                const Eigen::Vector2d& goal, int T, double dt = 1.0);

/// min over obstacles of (|p - c| - r); +inf when there are no obstacles.
double signed_distance(const World2D& world, const Eigen::Vector2d& p);

/// Hinge-style clearance penalty: 0 beyond the margin, quadratic inside the
/// margin band, linear once penetrating. Continuous (and C1) at both branch
/// boundaries.
double local_collision_cost(double d, double eps);

struct CostConfig {
  double smooth_weight = 1e-3;  // weight on the acceleration penalty
};

struct CostBreakdown {
  double obstacle = 0.0;
  double smooth = 0.0;
  double total = 0.0;
};

/// Obstacle cost: (1/2) sum_t c(d(q_t)) * |velocity_t| over the full
/// sequence, central-difference velocities with one-sided stencils at the
/// endpoints. Smoothness cost: squared acceleration of the deviation from
/// the straight line, accumulated through the same second-difference stencil
/// as the trajectory prior (so its gradient is 2 A (xi - line) per DoF).
CostBreakdown trajectory_cost(const World2D& world, const Trajectory& traj,
                              const CostConfig& cfg);

/// Analytic gradient of trajectory_cost w.r.t. the interior waypoints (T x D).
Eigen::MatrixXd cost_gradient(const World2D& world, const Trajectory& traj,
                              const CostConfig& cfg);

struct ChompConfig {
  double eta = 100.0;  // trust-region regularization
  int max_iters = 200;
  double tol = 1e-4;   // convergence threshold on |delta|_inf
};

/// Cholesky factorization of A = K^T K for T interior waypoints; the metric
/// that preconditions the CHOMP update.
Eigen::LLT<Eigen::MatrixXd> smoothness_factorization(int T);

/// One preconditioned step: solve A delta = g / eta per DoF and move the
/// interior waypoints by -delta. Endpoints are untouched.
Trajectory chomp_update(const Trajectory& traj, const Eigen::MatrixXd& grad,
                        const ChompConfig& cfg, const Eigen::LLT<Eigen::MatrixXd>& A_llt);

struct FineTuneResult {
  Trajectory traj;
  int iterations = 0;
  double final_cost = 0.0;
  bool converged = false;
  std::vector<double> cost_history;  // cost after each accepted update
};

/// Iterated CHOMP: gradient + preconditioned step until |delta|_inf < tol or
/// max_iters. On non-convergence the best-cost iterate is returned with
/// converged = false.
FineTuneResult fine_tune(const World2D& world, const Trajectory& traj,
                         const CostConfig& cost_cfg, const ChompConfig& chomp_cfg);

/// True iff signed distance stays positive at every waypoint and at 10
/// intermediate points along every segment.
bool collision_free(const World2D& world, const Trajectory& traj);

struct PlanConfig {
  int waypoints = 50;       // interior waypoints T
  double prior_scale = 1.0; // peak marginal variance a of the trajectory prior
  double dt = 1.0;
  CostConfig cost;
  TrainConfig train;        // planning defaults applied by planning_train_defaults()
};

/// Training defaults for the planning task (larger nets, longer schedule).
TrainConfig planning_train_defaults();

/// The trajectory objective R(xi) = -C(xi) over interior-waypoint vectors.
ObjectiveFn planning_objective(const World2D& world, int T, const CostConfig& cfg,
                               double dt = 1.0);

struct PlanResult {
  ManifoldModel model;
  TrainReport report;
  Eigen::VectorXd xi0;  // straight-line mean used by the trajectory prior
};

/// Trains a trajectory manifold: straight-line initialization, structured
/// trajectory-prior proposal, weighted generative training on R = -C.
PlanResult plan_with_manifold(const World2D& world, const PlanConfig& cfg);

/// Decoder mean at z, reassembled into a trajectory with the fixed endpoints.
Trajectory decode_trajectory(const ManifoldModel& model, const World2D& world,
                             const Eigen::VectorXd& z, int T, double dt = 1.0);

}  // namespace lsmo
