/*
Copyright 2026 The odfkit Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef ODFKIT_DISTANCES_HPP
#define ODFKIT_DISTANCES_HPP

#include <Eigen/Dense>
#include <string>

#include "odfkit/fodf.hpp"
#include "odfkit/transport.hpp"

namespace odf {

// Shared smoothing/snapping grid (p = 362) built once.
const GridPtr& default_grid();

// Shared quadrature grid (p = 1000) for rmise.
const GridPtr& default_eval_grid();

// Earth mover's distance with arc-length ground costs; works for any mix of
// atomic and gridded inputs. Result lies in [0, pi/2].
double emd(const Fodf& f1, const Fodf& f2);

// Square root of the optimal value under squared arc-length costs.
double wasserstein2(const Fodf& f1, const Fodf& f2);

// Half L1 distance between histograms; in [0, 1].
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double total_variation(const GridFodf& f1, const GridFodf& f2);
// Atomic inputs are snapped onto `grid` first.
double total_variation(const Fodf& f1, const Fodf& f2, const GridPtr& grid);

double smoothed_tv(const Fodf& f1, const Fodf& f2, SmoothingParam lambda,
                   const GridPtr& grid);

// Symmetrized Kullback-Leibler divergence over shared grid weights;
// +infinity when either side puts mass on a zero of the other.
double skl(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double skl(const GridFodf& f1, const GridFodf& f2);
double skl(const Fodf& f1, const Fodf& f2, const GridPtr& grid);

// Same divergence from log weights. Smoothed densities are strictly
// positive, so their divergence is finite even where exp(log w) underflows;
// this form preserves that.
double skl_from_log(const Eigen::VectorXd& logp, const Eigen::VectorXd& logq);

double smoothed_skl(const Fodf& f1, const Fodf& f2, SmoothingParam lambda,
                    const GridPtr& grid);

// Optimal matching (Hungarian assignment) of two equally sized direction
// sets; weights are ignored. Throws UndefinedAngularErrorError for gridded
// inputs or mismatched atom counts.
double angular_error(const DiscreteFodf& f1, const DiscreteFodf& f2);
double angular_error(const Fodf& f1, const Fodf& f2);

// L2 distance between the orientation-response projections of two fODFs,
// integrated over an eval grid of `eval_p` quasi-uniform directions.
double rmise(const Fodf& f1, const Fodf& f2, double kappa,
             std::size_t eval_p = 1000);

// Minimum-cost perfect assignment on a square cost matrix.
double min_assignment_cost(const Eigen::MatrixXd& cost);

// ---------------------------------------------------------------------------
// Metric selector used by the CLI, the resampling reports, and experiments.

enum class Metric {
  Emd,
  Wasserstein2,
  Tv,
  SmoothedTv,
  Skl,
  SmoothedSkl,
  AngularError,
  Rmise,
};

struct DistanceSpec {
  Metric metric = Metric::Emd;
  double lambda = 10.0;    // smoothed variants
  double kappa = 1.5;      // rmise
  GridPtr grid;            // snapping/smoothing grid; null selects default_grid()
  std::size_t eval_p = 1000;
};

double fodf_distance(const DistanceSpec& spec, const Fodf& f1, const Fodf& f2);

Metric parse_metric(const std::string& name);
std::string metric_name(Metric m);

// ---------------------------------------------------------------------------
// Euclidean-line ground metric: one-dimensional atomic measures used by the
// scale-equivariance and outlier-robustness checks.

namespace line {

Eigen::MatrixXd cost_matrix(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys);

double emd(const Eigen::VectorXd& xs, const Eigen::VectorXd& wx,
           const Eigen::VectorXd& ys, const Eigen::VectorXd& wy);

double wasserstein2(const Eigen::VectorXd& xs, const Eigen::VectorXd& wx,
                    const Eigen::VectorXd& ys, const Eigen::VectorXd& wy);

// Gaussian smoothing of an atomic measure onto a 1-D evaluation grid,
// normalized to total mass 1.
Eigen::VectorXd smooth(const Eigen::VectorXd& support, const Eigen::VectorXd& weights,
                       double lambda, const Eigen::VectorXd& grid);

// Exact TV between atomic measures (computed on the union of supports).
double total_variation_atomic(const Eigen::VectorXd& xs, const Eigen::VectorXd& wx,
                              const Eigen::VectorXd& ys, const Eigen::VectorXd& wy);

}  // namespace line

}  // namespace odf

#endif  // ODFKIT_DISTANCES_HPP
