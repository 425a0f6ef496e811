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

#include "odfkit/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace odf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const GridPtr& grid_or_default(const GridPtr& grid) {
  return grid ? grid : default_grid();
}

}  // namespace

const GridPtr& default_grid() {
  static const GridPtr g = make_grid(362);
  return g;
}

const GridPtr& default_eval_grid() {
  static const GridPtr g = make_grid(1000);
  return g;
}

double emd(const Fodf& f1, const Fodf& f2) {
  const Support s1 = support_of(f1);
  const Support s2 = support_of(f2);
  const Eigen::MatrixXd c = cost_matrix(s1.dirs, s2.dirs);
  return solve_transport(c, s1.weights, s2.weights).cost;
}

double wasserstein2(const Fodf& f1, const Fodf& f2) {
  const Support s1 = support_of(f1);
  const Support s2 = support_of(f2);
  Eigen::MatrixXd c = cost_matrix(s1.dirs, s2.dirs);
  c = c.cwiseProduct(c);
  const double value = solve_transport(c, s1.weights, s2.weights).cost;
  return std::sqrt(std::max(0.0, value));
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) {
    throw GridMismatchError("total_variation: histogram length mismatch");
  }
  return 0.5 * (p - q).cwiseAbs().sum();
}

double total_variation(const GridFodf& f1, const GridFodf& f2) {
  if (!f1.grid().same_as(f2.grid())) {
    throw GridMismatchError("total_variation: fODFs live on different grids");
  }
  return total_variation(f1.weights(), f2.weights());
}

double total_variation(const Fodf& f1, const Fodf& f2, const GridPtr& grid) {
  const GridPtr& g = grid_or_default(grid);
  return total_variation(snap_to_grid(f1, g), snap_to_grid(f2, g));
}

double smoothed_tv(const Fodf& f1, const Fodf& f2, SmoothingParam lambda,
                   const GridPtr& grid) {
  const GridPtr& g = grid_or_default(grid);
  return total_variation(smooth(f1, lambda, g), smooth(f2, lambda, g));
}

double skl(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) {
    throw GridMismatchError("skl: histogram length mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double lo = std::min(p[i], q[i]);
    const double hi = std::max(p[i], q[i]);
    if (lo == hi) continue;  // includes the 0/0 convention
    if (lo == 0.0) return kInf;  // mass on a zero of the other side
    // Per-element value 0.5 (p - q) log(p / q), evaluated on the ordered
    // pair so swapping the arguments is bitwise neutral.
    acc += 0.5 * (hi - lo) * std::log(hi / lo);
  }
  return acc;
}

double skl(const GridFodf& f1, const GridFodf& f2) {
  if (!f1.grid().same_as(f2.grid())) {
    throw GridMismatchError("skl: fODFs live on different grids");
  }
  return skl(f1.weights(), f2.weights());
}

double skl(const Fodf& f1, const Fodf& f2, const GridPtr& grid) {
  const GridPtr& g = grid_or_default(grid);
  return skl(snap_to_grid(f1, g), snap_to_grid(f2, g));
}

double skl_from_log(const Eigen::VectorXd& logp, const Eigen::VectorXd& logq) {
  if (logp.size() != logq.size()) {
    throw GridMismatchError("skl_from_log: histogram length mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < logp.size(); ++i) {
    const double lo = std::min(logp[i], logq[i]);
    const double hi = std::max(logp[i], logq[i]);
    if (lo == hi) continue;
    // 0.5 (p - q) log(p / q) on the ordered pair; an underflowing larger
    // weight contributes exactly its true (negligible) share.
    acc += 0.5 * (std::exp(hi) - std::exp(lo)) * (hi - lo);
  }
  return acc;
}

double smoothed_skl(const Fodf& f1, const Fodf& f2, SmoothingParam lambda,
                    const GridPtr& grid) {
  const GridPtr& g = grid_or_default(grid);
  return skl_from_log(smooth_log(f1, lambda, g), smooth_log(f2, lambda, g));
}

double min_assignment_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) {
    throw InvalidArgumentError("min_assignment_cost: matrix must be square");
  }
  if (n == 0) return 0.0;
  // Hungarian algorithm with potentials; p[j] is the row matched to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

double angular_error(const DiscreteFodf& f1, const DiscreteFodf& f2) {
  if (f1.size() != f2.size()) {
    throw UndefinedAngularErrorError(
        "angular_error: direction sets have different sizes");
  }
  const Support s1 = support_of(f1);
  const Support s2 = support_of(f2);
  return min_assignment_cost(cost_matrix(s1.dirs, s2.dirs));
}

double angular_error(const Fodf& f1, const Fodf& f2) {
  const auto* d1 = std::get_if<DiscreteFodf>(&f1);
  const auto* d2 = std::get_if<DiscreteFodf>(&f2);
  if (!d1 || !d2) {
    throw UndefinedAngularErrorError(
        "angular_error: undefined for grid-form estimates");
  }
  return angular_error(*d1, *d2);
}

double rmise(const Fodf& f1, const Fodf& f2, double kappa, std::size_t eval_p) {
  if (!(kappa > 0.0)) {
    throw InvalidArgumentError("rmise: kappa must be positive");
  }
  const GridPtr grid = eval_p == 1000 ? default_eval_grid() : make_grid(eval_p);
  const Eigen::VectorXd a = st_project(f1, kappa, grid->points());
  const Eigen::VectorXd b = st_project(f2, kappa, grid->points());
  const double area = 2.0 * M_PI / static_cast<double>(grid->size());
  return std::sqrt(area * (a - b).squaredNorm());
}

double fodf_distance(const DistanceSpec& spec, const Fodf& f1, const Fodf& f2) {
  switch (spec.metric) {
    case Metric::Emd:
      return emd(f1, f2);
    case Metric::Wasserstein2:
      return wasserstein2(f1, f2);
    case Metric::Tv:
      return total_variation(f1, f2, spec.grid);
    case Metric::SmoothedTv:
      return smoothed_tv(f1, f2, SmoothingParam(spec.lambda), spec.grid);
    case Metric::Skl:
      return skl(f1, f2, spec.grid);
    case Metric::SmoothedSkl:
      return smoothed_skl(f1, f2, SmoothingParam(spec.lambda), spec.grid);
    case Metric::AngularError:
      return angular_error(f1, f2);
    case Metric::Rmise:
      return rmise(f1, f2, spec.kappa, spec.eval_p);
  }
  throw InvalidArgumentError("fodf_distance: unknown metric");
}

Metric parse_metric(const std::string& name) {
  static const std::map<std::string, Metric> table = {
      {"emd", Metric::Emd},     {"w2", Metric::Wasserstein2},
      {"tv", Metric::Tv},       {"stv", Metric::SmoothedTv},
      {"skl", Metric::Skl},     {"sskl", Metric::SmoothedSkl},
      {"ae", Metric::AngularError}, {"rmise", Metric::Rmise},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    throw InvalidArgumentError("unknown metric: " + name);
  }
  return it->second;
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::Emd: return "emd";
    case Metric::Wasserstein2: return "w2";
    case Metric::Tv: return "tv";
    case Metric::SmoothedTv: return "stv";
    case Metric::Skl: return "skl";
    case Metric::SmoothedSkl: return "sskl";
    case Metric::AngularError: return "ae";
    case Metric::Rmise: return "rmise";
  }
  return "unknown";
}

namespace line {

Eigen::MatrixXd cost_matrix(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
  Eigen::MatrixXd c(xs.size(), ys.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    for (Eigen::Index j = 0; j < ys.size(); ++j) {
      c(i, j) = std::abs(xs[i] - ys[j]);
    }
  }
  return c;
}

double emd(const Eigen::VectorXd& xs, const Eigen::VectorXd& wx,
           const Eigen::VectorXd& ys, const Eigen::VectorXd& wy) {
  return solve_transport(cost_matrix(xs, ys), wx, wy).cost;
}

double wasserstein2(const Eigen::VectorXd& xs, const Eigen::VectorXd& wx,
                    const Eigen::VectorXd& ys, const Eigen::VectorXd& wy) {
  Eigen::MatrixXd c = cost_matrix(xs, ys);
  c = c.cwiseProduct(c);
  return std::sqrt(std::max(0.0, solve_transport(c, wx, wy).cost));
}

Eigen::VectorXd smooth(const Eigen::VectorXd& support, const Eigen::VectorXd& weights,
                       double lambda, const Eigen::VectorXd& grid) {
  if (!(lambda > 0.0)) {
    throw InvalidArgumentError("line::smooth: lambda must be positive");
  }
  const double precision = kSmoothingPrecisionScale * lambda;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.size());
  for (Eigen::Index l = 0; l < grid.size(); ++l) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < support.size(); ++j) {
      const double d = grid[l] - support[j];
      acc += weights[j] * std::exp(-0.5 * precision * d * d);
    }
    out[l] = acc;
  }
  const double total = out.sum();
  if (total <= 0.0) {
    throw DomainError("line::smooth: grid does not cover the support");
  }
  return out / total;
}

double total_variation_atomic(const Eigen::VectorXd& xs, const Eigen::VectorXd& wx,
                              const Eigen::VectorXd& ys, const Eigen::VectorXd& wy) {
  std::map<double, double> diff;
  for (Eigen::Index i = 0; i < xs.size(); ++i) diff[xs[i]] += wx[i];
  for (Eigen::Index j = 0; j < ys.size(); ++j) diff[ys[j]] -= wy[j];
  double acc = 0.0;
  for (const auto& [pos, d] : diff) acc += std::abs(d);
  return 0.5 * acc;
}

}  // namespace line

}  // namespace odf
