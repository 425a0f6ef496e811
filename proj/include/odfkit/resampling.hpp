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

#ifndef ODFKIT_RESAMPLING_HPP
#define ODFKIT_RESAMPLING_HPP

#include <functional>
#include <vector>

#include "odfkit/distances.hpp"
#include "odfkit/estimators.hpp"

namespace odf {

// A fit procedure usable by the resampling operations. Throws EmptyFitError
// when the data admits no support.
using Estimator = std::function<DiscreteFodf(const SignalSet&, const GridPtr&)>;

Estimator nnls_estimator();
Estimator best_k_estimator(int k_hat);
Estimator bayes_mean_estimator(double sigma2, std::size_t bayes_grid_p = 150);

// Disjoint cover of measurement indices with fold sizes differing by at
// most one; the assignment is a single seeded shuffle.
struct FoldPartition {
  int K = 0;
  std::vector<int> assignment;  // fold id per measurement index

  static FoldPartition draw(std::size_t n, int K, Rng& rng);
  std::vector<std::size_t> fold_indices(int fold) const;
  std::vector<std::size_t> complement_indices(int fold) const;
};

// Restriction of a signal set to a subset of measurement indices.
SignalSet subset_signal(const SignalSet& y, const std::vector<std::size_t>& indices);

// One fODF per fold, each fit on the complement of that fold.
// Requires 2 <= K <= n.
std::vector<DiscreteFodf> kfold_fodfs(const SignalSet& y, const GridPtr& grid,
                                      int K, const Estimator& estimator, Rng& rng);

// Cross-validated root-mean-square prediction error. The signal scale for
// prediction is ||beta||_1 from a full-data NNLS fit, shared across folds.
double cvrmse(const SignalSet& y, const GridPtr& grid, int K,
              const Estimator& estimator, Rng& rng);

// Root-mean-square error of the fit on y1 predicted against the raw values
// of the replicate y2; both signal sets must share the acquisition scheme.
double rrmse(const SignalSet& y1, const SignalSet& y2, const GridPtr& grid,
             const Estimator& estimator);

// Distance between fODFs fitted on two independent replicates.
double replicate_error(const Fodf& f1, const Fodf& f2, const DistanceSpec& metric);

struct ReplicateReport {
  DistanceSpec metric;
  double value = 0.0;
  int K = 0;
  Eigen::VectorXd pair_distances;  // unordered fold pairs, (0,1), (0,2), ...
};

// K-fold replicate error: ((K-1)/sqrt(K)) times the mean pairwise distance
// between the K fold fits.
ReplicateReport kfold_replicate_error(const SignalSet& y, const GridPtr& grid,
                                      int K, const Estimator& estimator,
                                      const DistanceSpec& metric, Rng& rng);

// B refits on synthetic data drawn around predict_signal(f0); task b uses
// the generator stream derived from (rng seed, b).
std::vector<DiscreteFodf> parametric_bootstrap(const DiscreteFodf& f0,
                                               const AcquisitionScheme& scheme,
                                               double sigma2_hat, int B,
                                               const Estimator& estimator,
                                               const GridPtr& grid, Rng& rng);

// Grid-supported measure minimizing the mean earth-mover distance to the
// inputs, solved exactly as a linear program over the grid (support points
// are generated on demand and certified optimal by dual pricing).
GridFodf wasserstein_barycenter(const std::vector<DiscreteFodf>& fodfs,
                                const GridPtr& grid);
GridFodf wasserstein_barycenter(const std::vector<DiscreteFodf>& fodfs,
                                const Eigen::VectorXd& input_weights,
                                const GridPtr& grid);

GridFodf kfold_barycenter(const SignalSet& y, const GridPtr& grid, int K,
                          const Estimator& estimator, Rng& rng);

GridFodf posterior_barycenter(const BayesPosterior& post, const GridPtr& grid,
                              std::size_t N, Rng& rng);

}  // namespace odf

#endif  // ODFKIT_RESAMPLING_HPP
