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

#include "odfkit/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "odfkit/simplex.hpp"

namespace odf {

Estimator nnls_estimator() {
  return [](const SignalSet& y, const GridPtr& grid) {
    NnlsFit fit = fit_nnls(y, grid);
    if (!fit.fodf) throw EmptyFitError("nnls estimator: all-zero fit");
    return *fit.fodf;
  };
}

Estimator best_k_estimator(int k_hat) {
  return [k_hat](const SignalSet& y, const GridPtr& grid) {
    NnlsFit fit = fit_best_k_subset(y, grid, k_hat);
    if (!fit.fodf) throw EmptyFitError("best-k estimator: all-zero fit");
    return *fit.fodf;
  };
}

Estimator bayes_mean_estimator(double sigma2, std::size_t bayes_grid_p) {
  return [sigma2, bayes_grid_p](const SignalSet& y, const GridPtr& /*grid*/) {
    const GridPtr bayes_grid = make_grid(bayes_grid_p);
    return to_discrete(posterior_mean(fit_bayes(y, bayes_grid, sigma2)));
  };
}

FoldPartition FoldPartition::draw(std::size_t n, int K, Rng& rng) {
  if (K < 2) throw InvalidArgumentError("FoldPartition: K must be at least 2");
  if (static_cast<std::size_t>(K) > n) {
    throw InvalidArgumentError("FoldPartition: more folds than measurements");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
    const std::size_t j = rng.below(i);
    std::swap(order[i - 1], order[j]);
  }
  FoldPartition part;
  part.K = K;
  part.assignment.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    part.assignment[order[t]] = static_cast<int>(t % static_cast<std::size_t>(K));
  }
  return part;
}

std::vector<std::size_t> FoldPartition::fold_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPartition::complement_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

SignalSet subset_signal(const SignalSet& y, const std::vector<std::size_t>& indices) {
  std::vector<Direction> dirs;
  dirs.reserve(indices.size());
  Eigen::VectorXd values(static_cast<Eigen::Index>(indices.size()));
  Eigen::Index k = 0;
  for (const std::size_t i : indices) {
    dirs.push_back(y.scheme.meas_dirs[i]);
    values[k++] = y.y[static_cast<Eigen::Index>(i)];
  }
  AcquisitionScheme scheme(std::move(dirs), y.scheme.kappa, y.scheme.s0,
                           y.scheme.sigma2);
  return SignalSet(std::move(scheme), std::move(values));
}

std::vector<DiscreteFodf> kfold_fodfs(const SignalSet& y, const GridPtr& grid,
                                      int K, const Estimator& estimator, Rng& rng) {
  const FoldPartition part = FoldPartition::draw(y.scheme.n(), K, rng);
  std::vector<DiscreteFodf> fits;
  fits.reserve(static_cast<std::size_t>(K));
  for (int fold = 0; fold < K; ++fold) {
    fits.push_back(estimator(subset_signal(y, part.complement_indices(fold)), grid));
  }
  return fits;
}

double cvrmse(const SignalSet& y, const GridPtr& grid, int K,
              const Estimator& estimator, Rng& rng) {
  const FoldPartition part = FoldPartition::draw(y.scheme.n(), K, rng);
  const NnlsFit full = fit_nnls(y, grid);
  const double s0_hat = full.s0_hat;
  double sum_sq = 0.0;
  for (int fold = 0; fold < K; ++fold) {
    const DiscreteFodf fit =
        estimator(subset_signal(y, part.complement_indices(fold)), grid);
    const std::vector<std::size_t> held_out = part.fold_indices(fold);
    std::vector<Direction> dirs;
    dirs.reserve(held_out.size());
    for (const std::size_t i : held_out) dirs.push_back(y.scheme.meas_dirs[i]);
    const Eigen::VectorXd pred = st_project(fit, y.scheme.kappa, dirs);
    Eigen::Index k = 0;
    for (const std::size_t i : held_out) {
      const double r = y.y[static_cast<Eigen::Index>(i)] - s0_hat * pred[k++];
      sum_sq += r * r;
    }
  }
  return std::sqrt(sum_sq / static_cast<double>(y.scheme.n()));
}

double rrmse(const SignalSet& y1, const SignalSet& y2, const GridPtr& grid,
             const Estimator& estimator) {
  if (!y1.scheme.same_as(y2.scheme)) {
    throw InvalidArgumentError("rrmse: replicate acquisition schemes differ");
  }
  const DiscreteFodf fit = estimator(y1, grid);
  const double s0_hat = fit_nnls(y1, grid).s0_hat;
  const Eigen::VectorXd pred =
      s0_hat * st_project(fit, y1.scheme.kappa, y1.scheme.meas_dirs);
  return std::sqrt((y2.y - pred).squaredNorm() /
                   static_cast<double>(y1.scheme.n()));
}

double replicate_error(const Fodf& f1, const Fodf& f2, const DistanceSpec& metric) {
  return fodf_distance(metric, f1, f2);
}

ReplicateReport kfold_replicate_error(const SignalSet& y, const GridPtr& grid,
                                      int K, const Estimator& estimator,
                                      const DistanceSpec& metric, Rng& rng) {
  const std::vector<DiscreteFodf> fits = kfold_fodfs(y, grid, K, estimator, rng);
  ReplicateReport report;
  report.metric = metric;
  report.K = K;
  report.pair_distances.resize(static_cast<Eigen::Index>(K) * (K - 1) / 2);
  Eigen::Index idx = 0;
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      report.pair_distances[idx++] = fodf_distance(metric, Fodf(fits[static_cast<std::size_t>(i)]),
                                                   Fodf(fits[static_cast<std::size_t>(j)]));
    }
  }
  const double mean = report.pair_distances.mean();
  report.value = (static_cast<double>(K) - 1.0) / std::sqrt(static_cast<double>(K)) * mean;
  return report;
}

std::vector<DiscreteFodf> parametric_bootstrap(const DiscreteFodf& f0,
                                               const AcquisitionScheme& scheme,
                                               double sigma2_hat, int B,
                                               const Estimator& estimator,
                                               const GridPtr& grid, Rng& rng) {
  if (B < 1) throw InvalidArgumentError("parametric_bootstrap: B must be positive");
  const Eigen::VectorXd mu = predict_signal(f0, scheme);
  std::vector<DiscreteFodf> fits;
  fits.reserve(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    Rng stream = rng.child(static_cast<std::uint64_t>(b));
    const Eigen::VectorXd yb = add_rician_noise(mu, sigma2_hat, stream);
    fits.push_back(estimator(SignalSet(scheme, yb), grid));
  }
  return fits;
}

// ---------------------------------------------------------------------------
// Wasserstein barycenter.
//
// The barycenter over a fixed candidate grid solves
//   min_{w, x^1..x^K}  sum_i rho_i <c_i, x^i>
//   s.t.  x^i has atom marginals a_i and grid marginal w for every i.
// Support points enter lazily: the restricted program on a support set S is
// solved exactly, and a grid point l outside S is added while the dual score
//   sum_i min_j (rho_i c_ijl - alpha_ij)
// stays negative. A nonnegative score for every grid point certifies global
// optimality, so the returned weights are the exact LP optimum.

namespace {

struct BarycenterInput {
  std::vector<Vec3> atom_dirs;
  Eigen::VectorXd atom_weights;
  double rho = 0.0;
};

double arc_cost(const Vec3& a, const Vec3& b) {
  const double d = std::min(1.0, std::max(-1.0, a.dot(b)));
  return std::acos(std::abs(d));
}

GridFodf solve_barycenter(const std::vector<BarycenterInput>& inputs,
                          const GridPtr& grid) {
  const int K = static_cast<int>(inputs.size());
  const int p = static_cast<int>(grid->size());

  // Row layout: atom rows first (fixed), then K coupling rows per support
  // point in the order the points were generated.
  std::vector<int> atom_row_offset(static_cast<std::size_t>(K));
  int total_atoms = 0;
  for (int i = 0; i < K; ++i) {
    atom_row_offset[static_cast<std::size_t>(i)] = total_atoms;
    total_atoms += static_cast<int>(inputs[static_cast<std::size_t>(i)].atom_dirs.size());
  }

  // Best single-support-point start: argmin_l sum_i rho_i sum_j a_ij d(v_ij, u_l).
  std::vector<int> support;
  {
    int best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int l = 0; l < p; ++l) {
      const Vec3& u = (*grid)[static_cast<std::size_t>(l)].vec();
      double score = 0.0;
      for (const auto& input : inputs) {
        for (std::size_t j = 0; j < input.atom_dirs.size(); ++j) {
          score += input.rho * input.atom_weights[static_cast<Eigen::Index>(j)] *
                   arc_cost(input.atom_dirs[j], u);
        }
      }
      if (score < best_score - 1e-15) {
        best_score = score;
        best = l;
      }
    }
    support.push_back(best);
  }

  // Columns for routing every input to support point `l`, with that point's
  // coupling rows starting at `coupling_base`.
  std::vector<int> w_cols;
  const auto point_columns = [&](int l, int coupling_base,
                                 std::vector<std::vector<std::pair<int, double>>>& cols,
                                 std::vector<double>& costs) {
    const Vec3& u = (*grid)[static_cast<std::size_t>(l)].vec();
    for (int i = 0; i < K; ++i) {
      const auto& input = inputs[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < input.atom_dirs.size(); ++j) {
        cols.push_back({{atom_row_offset[static_cast<std::size_t>(i)] + static_cast<int>(j), 1.0},
                        {coupling_base + i, 1.0}});
        costs.push_back(input.rho * arc_cost(input.atom_dirs[j], u));
      }
    }
    std::vector<std::pair<int, double>> w_col;
    w_col.reserve(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) w_col.push_back({coupling_base + i, -1.0});
    cols.push_back(std::move(w_col));
    costs.push_back(0.0);
  };

  LpProblem lp;
  lp.rows = total_atoms + K;
  lp.rhs = Eigen::VectorXd::Zero(lp.rows);
  for (int i = 0; i < K; ++i) {
    const auto& input = inputs[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < input.atom_dirs.size(); ++j) {
      lp.rhs[atom_row_offset[static_cast<std::size_t>(i)] + static_cast<int>(j)] =
          input.atom_weights[static_cast<Eigen::Index>(j)];
    }
  }
  {
    std::vector<std::vector<std::pair<int, double>>> cols;
    std::vector<double> costs;
    point_columns(support[0], total_atoms, cols, costs);
    lp.cols = std::move(cols);
    lp.costs = std::move(costs);
    w_cols.push_back(static_cast<int>(lp.cols.size()) - 1);
  }

  SimplexSolver solver(lp);
  LpSolution sol = solver.solve();
  std::vector<char> in_support(static_cast<std::size_t>(p), 0);
  in_support[static_cast<std::size_t>(support[0])] = 1;

  for (int round = 0; round < p; ++round) {
    if (!sol.feasible || !sol.optimal) {
      throw Error("wasserstein_barycenter: linear program did not converge");
    }
    // Dual pricing over grid points outside the support: a point improves
    // the program iff sum_i min_j (rho_i c_ijl - alpha_ij) is negative.
    int best_l = -1;
    double best_score = -1e-9;
    for (int l = 0; l < p; ++l) {
      if (in_support[static_cast<std::size_t>(l)]) continue;
      const Vec3& u = (*grid)[static_cast<std::size_t>(l)].vec();
      double score = 0.0;
      for (int i = 0; i < K; ++i) {
        const auto& input = inputs[static_cast<std::size_t>(i)];
        double cheapest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < input.atom_dirs.size(); ++j) {
          const double alpha =
              sol.duals[atom_row_offset[static_cast<std::size_t>(i)] + static_cast<int>(j)];
          cheapest = std::min(cheapest,
                              input.rho * arc_cost(input.atom_dirs[j], u) - alpha);
        }
        score += cheapest;
      }
      if (score < best_score) {
        best_score = score;
        best_l = l;
      }
    }
    if (best_l < 0) break;  // optimality certified over the whole grid

    const int coupling_base = total_atoms + K * (static_cast<int>(support.size()));
    support.push_back(best_l);
    in_support[static_cast<std::size_t>(best_l)] = 1;
    std::vector<std::vector<std::pair<int, double>>> cols;
    std::vector<double> costs;
    point_columns(best_l, coupling_base, cols, costs);
    sol = solver.extend_and_reoptimize(K, cols, costs);
    w_cols.push_back(static_cast<int>(sol.x.size()) - 1);
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Zero(p);
  for (std::size_t s = 0; s < support.size(); ++s) {
    weights[support[s]] = std::max(0.0, sol.x[w_cols[s]]);
  }
  const double total = weights.sum();
  if (!(total > 0.0)) {
    throw Error("wasserstein_barycenter: degenerate solution");
  }
  return GridFodf(grid, weights / total);
}

}  // namespace

GridFodf wasserstein_barycenter(const std::vector<DiscreteFodf>& fodfs,
                                const GridPtr& grid) {
  const Eigen::VectorXd rho = Eigen::VectorXd::Constant(
      static_cast<Eigen::Index>(fodfs.size()),
      1.0 / static_cast<double>(fodfs.empty() ? 1 : fodfs.size()));
  return wasserstein_barycenter(fodfs, rho, grid);
}

GridFodf wasserstein_barycenter(const std::vector<DiscreteFodf>& fodfs,
                                const Eigen::VectorXd& input_weights,
                                const GridPtr& grid) {
  if (fodfs.empty()) {
    throw InvalidArgumentError("wasserstein_barycenter: no input fODFs");
  }
  if (input_weights.size() != static_cast<Eigen::Index>(fodfs.size())) {
    throw InvalidArgumentError("wasserstein_barycenter: weight count mismatch");
  }
  if (fodfs.size() == 1) return snap_to_grid(fodfs[0], grid);

  // Group identical inputs (common with degenerate posteriors): equal atom
  // lists pool their weight, which shrinks the program without changing it.
  std::vector<BarycenterInput> inputs;
  const double rho_total = input_weights.sum();
  for (std::size_t i = 0; i < fodfs.size(); ++i) {
    if (!(input_weights[static_cast<Eigen::Index>(i)] > 0.0)) {
      throw InvalidArgumentError("wasserstein_barycenter: weights must be positive");
    }
    const Support s = support_of(fodfs[i]);
    bool merged = false;
    for (auto& existing : inputs) {
      if (existing.atom_dirs.size() != s.dirs.size()) continue;
      bool same = true;
      for (std::size_t j = 0; j < s.dirs.size(); ++j) {
        if (existing.atom_dirs[j] != s.dirs[j].vec() ||
            existing.atom_weights[static_cast<Eigen::Index>(j)] !=
                s.weights[static_cast<Eigen::Index>(j)]) {
          same = false;
          break;
        }
      }
      if (same) {
        existing.rho += input_weights[static_cast<Eigen::Index>(i)] / rho_total;
        merged = true;
        break;
      }
    }
    if (merged) continue;
    BarycenterInput input;
    input.atom_dirs.reserve(s.dirs.size());
    for (const Direction& d : s.dirs) input.atom_dirs.push_back(d.vec());
    input.atom_weights = s.weights;
    input.rho = input_weights[static_cast<Eigen::Index>(i)] / rho_total;
    inputs.push_back(std::move(input));
  }
  if (inputs.size() == 1) return snap_to_grid(fodfs[0], grid);
  return solve_barycenter(inputs, grid);
}

GridFodf kfold_barycenter(const SignalSet& y, const GridPtr& grid, int K,
                          const Estimator& estimator, Rng& rng) {
  return wasserstein_barycenter(kfold_fodfs(y, grid, K, estimator, rng), grid);
}

GridFodf posterior_barycenter(const BayesPosterior& post, const GridPtr& grid,
                              std::size_t N, Rng& rng) {
  if (N == 0) {
    throw InvalidArgumentError("posterior_barycenter: N must be positive");
  }
  const std::vector<DiscreteFodf> samples = posterior_sample(post, rng, N);
  return wasserstein_barycenter(samples, grid);
}

}  // namespace odf
