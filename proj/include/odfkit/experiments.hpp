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

#ifndef ODFKIT_EXPERIMENTS_HPP
#define ODFKIT_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odfkit/resampling.hpp"

namespace odf {

struct ExperimentConfig {
  std::vector<double> kappas = {1.5};
  double sigma2 = 0.04;
  std::size_t n_dirs = 150;
  std::size_t grid_p = 362;
  std::size_t bayes_grid_p = 150;
  std::size_t post_bary_samples = 50;
  std::size_t eval_p = 1000;  // rmise quadrature density
  int trials = 1000;
  int k_folds = 20;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 selects the hardware thread count
  // Snap drawn truth directions onto the deconvolution grid (used by the
  // noise-free sanity checks, where recovery is exact only on the grid).
  bool grid_align_truth = false;
  // Fit used by the correlation study: "nnls" or "b2s".
  std::string correlation_estimator = "nnls";

  void validate() const;
  std::string echo() const;  // key=value summary for output metadata
};

// Labeled numeric results with Monte Carlo standard errors. NaN cells render
// as "NA" (used where a statistic is undefined for a model).
struct ResultTable {
  std::string row_header = "row";
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Eigen::MatrixXd values;
  Eigen::MatrixXd standard_errors;
  std::vector<std::string> row_notes;  // optional status column
  std::string metadata;                // single "# ..." line content

  double cell(const std::string& row, const std::string& col) const;
  std::string to_tsv() const;
};

// Sample Pearson correlation; throws UndefinedCorrelationError when either
// series has zero variance or fewer than two points.
double pearson_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Two-orthogonal-fiber simulation: one row per model, one column per
// accuracy measure, averaged over cfg.trials trials. Uses cfg.kappas[0].
ResultTable run_model_comparison(const ExperimentConfig& cfg);

// Random two-fiber truths with two replicates per trial; rows are kappa
// values, columns are Corr(err_d, RE_d) per metric plus the
// Corr(RRMSE, RE_RMISE) column.
ResultTable run_correlation_study(const ExperimentConfig& cfg);

// Generic per-voxel dataset (shared directions, one or two replicate signal
// vectors per voxel).
struct VoxelDataset {
  struct Voxel {
    std::string id;
    Eigen::VectorXd y1;
    std::optional<Eigen::VectorXd> y2;
    std::string parse_error;  // nonempty marks a malformed row
  };
  std::vector<Direction> dirs;
  std::vector<Voxel> voxels;
};

// Per-voxel K-fold replicate error (EMD), replicate error when a second
// replicate exists, and CVRMSE. Malformed voxels report an error note and
// processing continues.
ResultTable voxel_map(const VoxelDataset& dataset, const ExperimentConfig& cfg);

// Pinned study targets used by `reproduce --check` and the acceptance suite.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> check_correlation_targets(const ResultTable& table);
std::vector<CheckResult> check_model_comparison_targets(const ResultTable& table);

}  // namespace odf

#endif  // ODFKIT_EXPERIMENTS_HPP
