#include "lsmo/cem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lsmo/parallel.hpp"
#include "lsmo/rng.hpp"

namespace lsmo {

namespace {

// log N(x; mean, diag(vars)) per component, one row of `out` per point
void component_log_densities(const GaussianMixture& gm, const Eigen::MatrixXd& points,
                             Eigen::MatrixXd& out) {
  const int k = gm.k();
  out.resize(points.rows(), k);
  for (int j = 0; j < k; ++j) {
    const double log_norm =
        -0.5 * (gm.dim() * std::log(2.0 * M_PI) + gm.vars.row(j).array().log().sum());
    out.col(j) =
        (-0.5 * ((points.rowwise() - gm.means.row(j)).array().square().rowwise() /
                 gm.vars.row(j).array())
                    .rowwise()
                    .sum() +
         log_norm)
            .matrix();
  }
}

}  // namespace

Eigen::VectorXd GaussianMixture::log_density(const Eigen::MatrixXd& points) const {
  Eigen::MatrixXd comp;
  component_log_densities(*this, points, comp);
  comp.array().rowwise() += weights.transpose().array().log();
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double mx = comp.row(i).maxCoeff();
    out(i) = mx + std::log((comp.row(i).array() - mx).exp().sum());
  }
  return out;
}

GaussianMixture em_fit(const Eigen::MatrixXd& points, int k, int iterations,
                       std::uint64_t seed, double var_floor,
                       std::vector<double>* ll_history) {
  const Eigen::Index n = points.rows();
  const int dim = static_cast<int>(points.cols());
  if (k < 1) throw std::invalid_argument("em_fit: k must be >= 1");
  if (n < k) throw std::invalid_argument("em_fit: need at least k points");

  Rng rng(seed);
  GaussianMixture gm;
  gm.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  gm.means.resize(k, dim);
  gm.vars.resize(k, dim);

  // k-means++-style seeding: first mean uniform, then proportional to the
  // squared distance from the nearest chosen mean.
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::max());
  gm.means.row(0) = points.row(static_cast<Eigen::Index>(rng.integer(n)));
  for (int j = 1; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (points.row(i) - gm.means.row(j - 1)).squaredNorm());
    }
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (; pick + 1 < n; ++pick) {
        u -= d2(pick);
        if (u <= 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.integer(n));
    }
    gm.means.row(j) = points.row(pick);
  }

  // initial variances: global per-dimension sample variance
  Eigen::RowVectorXd global_mean = points.colwise().mean();
  Eigen::RowVectorXd global_var =
      (points.rowwise() - global_mean).array().square().colwise().mean();
  global_var = global_var.cwiseMax(var_floor);
  for (int j = 0; j < k; ++j) gm.vars.row(j) = global_var;

  Eigen::MatrixXd comp, resp;
  for (int it = 0; it < iterations; ++it) {
    // E-step
    component_log_densities(gm, points, comp);
    comp.array().rowwise() += gm.weights.transpose().array().log();
    resp.resize(n, k);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = comp.row(i).maxCoeff();
      const double lse = mx + std::log((comp.row(i).array() - mx).exp().sum());
      resp.row(i) = (comp.row(i).array() - lse).exp();
      ll += lse;
    }
    if (ll_history) ll_history->push_back(ll / static_cast<double>(n));

    // M-step
    for (int j = 0; j < k; ++j) {
      const double mass = resp.col(j).sum();
      if (mass < 1e-12) {
        // dead component: reseed at a random data point, widest variance
        gm.means.row(j) = points.row(static_cast<Eigen::Index>(rng.integer(n)));
        gm.vars.row(j) = global_var;
        gm.weights(j) = 1.0 / n;
        continue;
      }
      gm.weights(j) = mass / static_cast<double>(n);
      gm.means.row(j) = (resp.col(j).transpose() * points) / mass;
      gm.vars.row(j) =
          ((points.rowwise() - gm.means.row(j)).array().square().colwise() *
           resp.col(j).array())
              .colwise()
              .sum() /
          mass;
      gm.vars.row(j) = gm.vars.row(j).cwiseMax(var_floor);
    }
    gm.weights /= gm.weights.sum();
  }
  return gm;
}

CemResult cem_optimize(const ObjectiveFn& objective, const CemConfig& cfg) {
  const int dim = objective.dim;
  if (!(cfg.elite_fraction > 0.0 && cfg.elite_fraction < 1.0)) {
    throw std::invalid_argument("cem_optimize: elite_fraction must be in (0, 1)");
  }
  const int n_elite = std::max(cfg.k, static_cast<int>(cfg.population * cfg.elite_fraction));
  if (n_elite > cfg.population) {
    throw std::invalid_argument("cem_optimize: population too small for elite count");
  }

  Rng rng(derive_seed(cfg.seed, 1));

  // initial mixture spread over the box
  GaussianMixture gm;
  gm.weights = Eigen::VectorXd::Constant(cfg.k, 1.0 / cfg.k);
  gm.means.resize(cfg.k, dim);
  gm.vars.resize(cfg.k, dim);
  for (int j = 0; j < cfg.k; ++j) {
    for (int d = 0; d < dim; ++d) {
      gm.means(j, d) = rng.uniform(objective.lo(d), objective.hi(d));
      const double half = 0.5 * (objective.hi(d) - objective.lo(d));
      gm.vars(j, d) = half * half;
    }
  }

  CemResult result;
  Eigen::MatrixXd population(cfg.population, dim);
  Eigen::VectorXd scores(cfg.population);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    // sample population from the mixture, clipped to the box
    Eigen::VectorXd cum(cfg.k);
    std::partial_sum(gm.weights.data(), gm.weights.data() + cfg.k, cum.data());
    for (int i = 0; i < cfg.population; ++i) {
      const double u = rng.uniform();
      int j = 0;
      while (j + 1 < cfg.k && u > cum(j)) ++j;
      for (int d = 0; d < dim; ++d) {
        double v = gm.means(j, d) + std::sqrt(gm.vars(j, d)) * rng.gaussian();
        population(i, d) = std::clamp(v, objective.lo(d), objective.hi(d));
      }
    }

    parallel_for(static_cast<std::size_t>(cfg.population), cfg.threads,
                 [&](std::size_t i) {
                   scores(static_cast<Eigen::Index>(i)) =
                       objective.eval(population.row(static_cast<Eigen::Index>(i))
                                          .transpose());
                 });

    std::vector<int> order(cfg.population);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a) > scores(b); });

    Eigen::MatrixXd elites(n_elite, dim);
    for (int i = 0; i < n_elite; ++i) elites.row(i) = population.row(order[i]);

    result.history.push_back({scores(order[n_elite - 1]), scores(order[0])});

    // degenerate elite set: every elite is the same point
    const Eigen::RowVectorXd spread =
        elites.colwise().maxCoeff() - elites.colwise().minCoeff();
    if (spread.maxCoeff() == 0.0) {
      result.early_stopped = true;
      for (int j = 0; j < cfg.k; ++j) gm.means.row(j) = elites.row(0);
      gm.vars.setConstant(cfg.var_floor);
      break;
    }

    gm = em_fit(elites, cfg.k, cfg.em_iterations, derive_seed(cfg.seed, 100 + iter),
                cfg.var_floor);
  }

  result.component_means = gm.means;
  result.component_scores.resize(cfg.k);
  for (int j = 0; j < cfg.k; ++j) {
    result.component_scores(j) = objective.eval(gm.means.row(j).transpose());
  }
  result.best_component_score = result.component_scores.maxCoeff();
  result.mean_component_score = result.component_scores.mean();
  result.mixture = std::move(gm);
  return result;
}

}  // namespace lsmo
