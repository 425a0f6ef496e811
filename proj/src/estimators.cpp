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

#include "odfkit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace odf {

namespace {

constexpr double kDualTol = 1e-10;
constexpr double kZeroTol = 1e-14;

NnlsFit make_fit(const Eigen::VectorXd& beta, const GridPtr& grid,
                 double objective) {
  NnlsFit fit;
  fit.beta = beta;
  fit.s0_hat = beta.sum();
  fit.objective = objective;
  if (fit.s0_hat > 0.0) {
    std::vector<WeightedDirection> atoms;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      if (beta[j] > 0.0) {
        atoms.push_back({(*grid)[static_cast<std::size_t>(j)], beta[j] / fit.s0_hat});
      }
    }
    fit.fodf = DiscreteFodf(std::move(atoms));
  }
  return fit;
}

// Gaussian elimination with partial pivoting for the tiny (<= 5x5) subset
// solves; returns false when the system is numerically singular.
bool solve_small(double a[5][5], double b[5], int n, double z[5]) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-13) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col][c], a[piv][c]);
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * z[c];
    z[r] = acc / a[r][r];
  }
  return true;
}

}  // namespace

DesignMatrix::DesignMatrix(GridPtr grid_, const AcquisitionScheme& scheme)
    : grid(std::move(grid_)) {
  const Eigen::Index n = static_cast<Eigen::Index>(scheme.meas_dirs.size());
  const Eigen::Index p = static_cast<Eigen::Index>(grid->size());
  entries.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3& x = scheme.meas_dirs[static_cast<std::size_t>(i)].vec();
    for (Eigen::Index j = 0; j < p; ++j) {
      const double c = (*grid)[static_cast<std::size_t>(j)].vec().dot(x);
      entries(i, j) = std::exp(-scheme.kappa * c * c);
    }
  }
}

NnlsFit fit_nnls(const SignalSet& y, const GridPtr& grid) {
  return fit_nnls(DesignMatrix(grid, y.scheme), y.y);
}

NnlsFit fit_nnls(const DesignMatrix& design, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd& A = design.entries;
  if (A.rows() != y.size()) {
    throw InvalidArgumentError("fit_nnls: signal length does not match design");
  }
  const Eigen::Index p = A.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  std::vector<Eigen::Index> passive;
  std::vector<char> in_passive(static_cast<std::size_t>(p), 0);
  Eigen::VectorXd w = A.transpose() * y;  // gradient of the zero solution

  const int max_outer = static_cast<int>(5 * p + 20);
  for (int outer = 0; outer < max_outer; ++outer) {
    // Most violated dual constraint among the active (zero) coefficients.
    Eigen::Index best = -1;
    double best_w = kDualTol;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!in_passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive.push_back(best);
    in_passive[static_cast<std::size_t>(best)] = 1;

    for (;;) {
      const Eigen::Index k = static_cast<Eigen::Index>(passive.size());
      Eigen::MatrixXd Ap(A.rows(), k);
      for (Eigen::Index c = 0; c < k; ++c) {
        Ap.col(c) = A.col(passive[static_cast<std::size_t>(c)]);
      }
      const Eigen::VectorXd z = Ap.colPivHouseholderQr().solve(y);
      bool all_positive = true;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (z[c] <= 0.0) {
          all_positive = false;
          break;
        }
      }
      if (all_positive) {
        for (Eigen::Index c = 0; c < k; ++c) {
          beta[passive[static_cast<std::size_t>(c)]] = z[c];
        }
        break;
      }
      // Step back along the segment to the feasible boundary and drop the
      // coefficients that reach zero.
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        if (z[c] <= 0.0) {
          const double bj = beta[passive[static_cast<std::size_t>(c)]];
          alpha = std::min(alpha, bj / (bj - z[c]));
        }
      }
      std::vector<Eigen::Index> kept;
      for (Eigen::Index c = 0; c < k; ++c) {
        const Eigen::Index j = passive[static_cast<std::size_t>(c)];
        beta[j] += alpha * (z[c] - beta[j]);
        if (beta[j] <= kZeroTol) {
          beta[j] = 0.0;
          in_passive[static_cast<std::size_t>(j)] = 0;
        } else {
          kept.push_back(j);
        }
      }
      passive = std::move(kept);
      if (passive.empty()) break;
    }
    if (passive.empty()) break;
    w = A.transpose() * (y - A * beta);
  }
  const double objective = (y - A * beta).squaredNorm();
  return make_fit(beta, design.grid, objective);
}

NnlsFit fit_best_k_subset(const SignalSet& y, const GridPtr& grid, int k_hat) {
  return fit_best_k_subset(DesignMatrix(grid, y.scheme), y.y, k_hat);
}

NnlsFit fit_best_k_subset(const DesignMatrix& design, const Eigen::VectorXd& y,
                          int k_hat) {
  const Eigen::MatrixXd& A = design.entries;
  const int p = static_cast<int>(A.cols());
  if (k_hat < 1 || k_hat > p) {
    throw InvalidArgumentError("fit_best_k_subset: k_hat out of range");
  }
  if (k_hat > 5) {
    throw InvalidArgumentError(
        "fit_best_k_subset: k_hat > 5 refused (exhaustive search)");
  }
  const Eigen::MatrixXd gram = A.transpose() * A;
  const Eigen::VectorXd proj = A.transpose() * y;
  const double yty = y.squaredNorm();

  double best_obj = yty;  // beta = 0 baseline
  int best_subset[5] = {0};
  double best_z[5] = {0.0};
  int best_mask = 0;

  std::vector<int> subset(static_cast<std::size_t>(k_hat));
  for (int i = 0; i < k_hat; ++i) subset[static_cast<std::size_t>(i)] = i;

  for (;;) {
    // Optimal nonnegative coefficients on this subset: enumerate supports,
    // solve the stationarity system, keep feasible candidates.
    for (int mask = 1; mask < (1 << k_hat); ++mask) {
      int idx[5];
      int m = 0;
      for (int b = 0; b < k_hat; ++b) {
        if (mask & (1 << b)) idx[m++] = subset[static_cast<std::size_t>(b)];
      }
      double g[5][5], rhs[5], z[5];
      for (int r = 0; r < m; ++r) {
        rhs[r] = proj[idx[r]];
        for (int c = 0; c < m; ++c) g[r][c] = gram(idx[r], idx[c]);
      }
      if (!solve_small(g, rhs, m, z)) continue;
      bool feasible = true;
      double fit_term = 0.0;
      for (int r = 0; r < m; ++r) {
        if (z[r] <= 0.0) {
          feasible = false;
          break;
        }
        fit_term += z[r] * proj[idx[r]];
      }
      if (!feasible) continue;
      const double obj = yty - fit_term;
      if (obj < best_obj - 1e-15 * (1.0 + yty)) {
        best_obj = obj;
        best_mask = m;
        for (int r = 0; r < m; ++r) {
          best_subset[r] = idx[r];
          best_z[r] = z[r];
        }
      }
    }
    // Next lexicographic subset.
    int pos = k_hat - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == p - k_hat + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < k_hat; ++q) {
      subset[static_cast<std::size_t>(q)] = subset[static_cast<std::size_t>(q - 1)] + 1;
    }
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int r = 0; r < best_mask; ++r) beta[best_subset[r]] = best_z[r];
  return make_fit(beta, design.grid, best_obj);
}

BayesPosterior fit_bayes(const SignalSet& y, const GridPtr& grid, double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw InvalidArgumentError("fit_bayes: sigma2 must be positive");
  }
  const DesignMatrix design(grid, y.scheme);
  const Eigen::MatrixXd& A = design.entries;
  const Eigen::Index n = A.rows();
  const int p = static_cast<int>(grid->size());
  const double s0 = y.scheme.s0;

  BayesPosterior post;
  post.grid = grid;
  const std::size_t pairs = static_cast<std::size_t>(p) * (p + 1) / 2;
  post.pair_log_weights.resize(static_cast<Eigen::Index>(pairs));
  post.pair_first.reserve(pairs);
  post.pair_second.reserve(pairs);

  // Per-measurement terms that do not depend on the pair.
  Eigen::VectorXd base(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double ym = y.y[m];
    base[m] = ym > 0.0 ? std::log(ym / sigma2) - ym * ym / (2.0 * sigma2)
                       : -std::numeric_limits<double>::infinity();
  }

  Eigen::Index idx = 0;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      double ll = 0.0;
      for (Eigen::Index m = 0; m < n; ++m) {
        const double mu = s0 * 0.5 * (A(m, i) + A(m, j));
        ll += base[m] - mu * mu / (2.0 * sigma2) +
              log_bessel_i0(y.y[m] * mu / sigma2);
      }
      post.pair_log_weights[idx++] = ll;
      post.pair_first.push_back(i);
      post.pair_second.push_back(j);
    }
  }

  // Normalize through log-sum-exp; a flat (all -inf) likelihood falls back
  // to the uniform prior.
  const double top = post.pair_log_weights.maxCoeff();
  if (!std::isfinite(top)) {
    post.pair_log_weights.setConstant(-std::log(static_cast<double>(pairs)));
    return post;
  }
  double z = 0.0;
  for (Eigen::Index k = 0; k < post.pair_log_weights.size(); ++k) {
    z += std::exp(post.pair_log_weights[k] - top);
  }
  const double log_z = top + std::log(z);
  for (Eigen::Index k = 0; k < post.pair_log_weights.size(); ++k) {
    post.pair_log_weights[k] -= log_z;
  }
  return post;
}

GridFodf posterior_mean(const BayesPosterior& post) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(post.grid->size()));
  for (std::size_t k = 0; k < post.pair_count(); ++k) {
    const double mass = std::exp(post.pair_log_weights[static_cast<Eigen::Index>(k)]);
    w[post.pair_first[k]] += 0.5 * mass;
    w[post.pair_second[k]] += 0.5 * mass;
  }
  return GridFodf(post.grid, std::move(w));
}

std::vector<DiscreteFodf> posterior_sample(const BayesPosterior& post, Rng& rng,
                                           std::size_t count) {
  if (count == 0) {
    throw InvalidArgumentError("posterior_sample: count must be positive");
  }
  Eigen::VectorXd cdf(post.pair_log_weights.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < post.pair_log_weights.size(); ++k) {
    acc += std::exp(post.pair_log_weights[k]);
    cdf[k] = acc;
  }
  std::vector<DiscreteFodf> samples;
  samples.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double u = rng.uniform() * acc;
    const double* begin = cdf.data();
    const double* it = std::lower_bound(begin, begin + cdf.size(), u);
    std::size_t k = static_cast<std::size_t>(it - begin);
    if (k >= post.pair_count()) k = post.pair_count() - 1;
    const Direction& d1 = (*post.grid)[static_cast<std::size_t>(post.pair_first[k])];
    const Direction& d2 = (*post.grid)[static_cast<std::size_t>(post.pair_second[k])];
    samples.push_back(DiscreteFodf({{d1, 0.5}, {d2, 0.5}}));
  }
  return samples;
}

}  // namespace odf
