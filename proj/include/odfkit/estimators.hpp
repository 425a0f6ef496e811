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

#ifndef ODFKIT_ESTIMATORS_HPP
#define ODFKIT_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "odfkit/fodf.hpp"
#include "odfkit/rng.hpp"
#include "odfkit/signal.hpp"

namespace odf {

// Forward-model matrix: entry (i, j) = exp(-kappa (u_j . x_i)^2) for grid
// point u_j and measurement direction x_i. Entries lie in (0, 1].
struct DesignMatrix {
  DesignMatrix(GridPtr grid_, const AcquisitionScheme& scheme);

  GridPtr grid;
  Eigen::MatrixXd entries;  // n x p
};

// Result of a nonnegative least-squares style fit.
struct NnlsFit {
  Eigen::VectorXd beta;              // p nonnegative coefficients
  double s0_hat = 0.0;               // = beta.sum()
  double objective = 0.0;            // ||y - A beta||^2
  std::optional<DiscreteFodf> fodf;  // absent when beta is identically zero
};

// Lawson-Hanson active-set solve of min ||y - A beta||^2 over beta >= 0.
// An all-zero signal yields beta = 0 and no fODF.
NnlsFit fit_nnls(const SignalSet& y, const GridPtr& grid);
NnlsFit fit_nnls(const DesignMatrix& design, const Eigen::VectorXd& y);

// Exhaustive best-subset fit with exactly k_hat candidate directions
// (1 <= k_hat <= 5); each subset is solved through the precomputed Gram
// matrix. Ties resolve to the lexicographically first subset.
NnlsFit fit_best_k_subset(const SignalSet& y, const GridPtr& grid, int k_hat);
NnlsFit fit_best_k_subset(const DesignMatrix& design, const Eigen::VectorXd& y,
                          int k_hat);

// Posterior over unordered grid-point pairs {u_i, u_j} for the two-fiber,
// equal-weight model with magnitude (Rician) noise and a uniform prior.
struct BayesPosterior {
  GridPtr grid;
  Eigen::VectorXd pair_log_weights;  // normalized: logsumexp = 0
  std::vector<int> pair_first;       // i of each pair, i <= j
  std::vector<int> pair_second;      // j of each pair

  std::size_t pair_count() const { return pair_first.size(); }
};

BayesPosterior fit_bayes(const SignalSet& y, const GridPtr& grid, double sigma2);

// Grid weights of the posterior mean fODF.
GridFodf posterior_mean(const BayesPosterior& post);

// Independent pair draws, each returned as an equal-weight two-atom fODF
// (a diagonal pair collapses to a single atom).
std::vector<DiscreteFodf> posterior_sample(const BayesPosterior& post, Rng& rng,
                                           std::size_t count);

}  // namespace odf

#endif  // ODFKIT_ESTIMATORS_HPP
