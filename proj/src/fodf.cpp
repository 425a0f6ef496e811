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

#include "odfkit/fodf.hpp"

#include <cmath>
#include <limits>

namespace odf {

namespace {

constexpr double kMergeTol = 1e-9;
constexpr double kMassTol = 1e-6;

void normalize_or_throw(Eigen::VectorXd& w, const char* what) {
  const double total = w.sum();
  if (std::abs(total - 1.0) > kMassTol) {
    throw InvalidArgumentError(std::string(what) +
                               ": weights must sum to 1 within 1e-6");
  }
  w /= total;
}

}  // namespace

DiscreteFodf::DiscreteFodf(std::vector<WeightedDirection> atoms) {
  for (const auto& a : atoms) {
    if (a.weight < 0.0 || !std::isfinite(a.weight)) {
      throw InvalidArgumentError("DiscreteFodf: negative or non-finite weight");
    }
    if (a.weight == 0.0) continue;
    bool merged = false;
    for (auto& existing : atoms_) {
      if (arc_distance(existing.dir, a.dir) < kMergeTol) {
        existing.weight += a.weight;
        merged = true;
        break;
      }
    }
    if (!merged) atoms_.push_back(a);
  }
  if (atoms_.empty()) {
    throw InvalidArgumentError("DiscreteFodf: no atoms with positive weight");
  }
  double total = 0.0;
  for (const auto& a : atoms_) total += a.weight;
  if (std::abs(total - 1.0) > kMassTol) {
    throw InvalidArgumentError("DiscreteFodf: weights must sum to 1 within 1e-6");
  }
  for (auto& a : atoms_) a.weight /= total;
}

GridFodf::GridFodf(GridPtr grid, Eigen::VectorXd weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
  if (!grid_) throw InvalidArgumentError("GridFodf: null grid");
  if (static_cast<std::size_t>(weights_.size()) != grid_->size()) {
    throw InvalidArgumentError("GridFodf: weight count does not match grid");
  }
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (weights_[i] < 0.0 || !std::isfinite(weights_[i])) {
      throw InvalidArgumentError("GridFodf: negative or non-finite weight");
    }
  }
  normalize_or_throw(weights_, "GridFodf");
}

SmoothingParam::SmoothingParam(double l) : lambda(l) {
  if (!(l > 0.0) || !std::isfinite(l)) {
    throw InvalidArgumentError("SmoothingParam: lambda must be positive");
  }
}

DiscreteFodf to_discrete(const GridFodf& f) {
  std::vector<WeightedDirection> atoms;
  for (Eigen::Index i = 0; i < f.weights().size(); ++i) {
    if (f.weights()[i] > 0.0) {
      atoms.push_back({f.grid()[static_cast<std::size_t>(i)], f.weights()[i]});
    }
  }
  return DiscreteFodf(std::move(atoms));
}

Support support_of(const DiscreteFodf& f) {
  Support s;
  s.dirs.reserve(f.size());
  s.weights.resize(static_cast<Eigen::Index>(f.size()));
  Eigen::Index i = 0;
  for (const auto& a : f.atoms()) {
    s.dirs.push_back(a.dir);
    s.weights[i++] = a.weight;
  }
  return s;
}

Support support_of(const GridFodf& f) {
  Support s;
  std::vector<double> w;
  for (Eigen::Index i = 0; i < f.weights().size(); ++i) {
    if (f.weights()[i] > 0.0) {
      s.dirs.push_back(f.grid()[static_cast<std::size_t>(i)]);
      w.push_back(f.weights()[i]);
    }
  }
  s.weights = Eigen::Map<const Eigen::VectorXd>(w.data(),
                                                static_cast<Eigen::Index>(w.size()));
  return s;
}

Support support_of(const Fodf& f) {
  return std::visit([](const auto& g) { return support_of(g); }, f);
}

namespace {

GridFodf snap_support(const Support& s, const GridPtr& grid) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t j = 0; j < s.dirs.size(); ++j) {
    const std::size_t idx = grid->nearest(s.dirs[j]);
    w[static_cast<Eigen::Index>(idx)] += s.weights[static_cast<Eigen::Index>(j)];
  }
  return GridFodf(grid, std::move(w));
}

// Log weights of the kernel-smoothed measure. Each atom spreads its mass
// through a grid-normalized kernel, so total mass per atom is conserved and
// the tight-kernel limit is the snap. All arithmetic stays in the log domain
// until the caller decides to exponentiate.
Eigen::VectorXd smooth_log_support(const Support& s, double precision,
                                   const GridPtr& grid) {
  const Eigen::Index p = static_cast<Eigen::Index>(grid->size());
  const Eigen::Index k = static_cast<Eigen::Index>(s.dirs.size());
  Eigen::MatrixXd expo(p, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double max_expo = -std::numeric_limits<double>::infinity();
    for (Eigen::Index l = 0; l < p; ++l) {
      const double d = arc_distance((*grid)[static_cast<std::size_t>(l)],
                                    s.dirs[static_cast<std::size_t>(j)]);
      expo(l, j) = -0.5 * precision * d * d;
      if (expo(l, j) > max_expo) max_expo = expo(l, j);
    }
    double z = 0.0;
    for (Eigen::Index l = 0; l < p; ++l) z += std::exp(expo(l, j) - max_expo);
    const double log_z = max_expo + std::log(z);
    const double log_weight = std::log(s.weights[j]);
    for (Eigen::Index l = 0; l < p; ++l) expo(l, j) += log_weight - log_z;
  }
  // Row-wise log-sum-exp over atoms.
  Eigen::VectorXd logw(p);
  for (Eigen::Index l = 0; l < p; ++l) {
    const double top = expo.row(l).maxCoeff();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) acc += std::exp(expo(l, j) - top);
    logw[l] = top + std::log(acc);
  }
  // Normalize so the weights sum to exactly one after exponentiation.
  const double top = logw.maxCoeff();
  double z = 0.0;
  for (Eigen::Index l = 0; l < p; ++l) z += std::exp(logw[l] - top);
  logw.array() -= top + std::log(z);
  return logw;
}

GridFodf smooth_support(const Support& s, double precision, const GridPtr& grid) {
  Eigen::VectorXd w = smooth_log_support(s, precision, grid).array().exp();
  w /= w.sum();
  return GridFodf(grid, std::move(w));
}

Eigen::VectorXd project_support(const Support& s, double kappa,
                                const std::vector<Direction>& eval_dirs) {
  if (!(kappa > 0.0)) {
    throw InvalidArgumentError("st_project: kappa must be positive");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(eval_dirs.size()));
  for (std::size_t i = 0; i < eval_dirs.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.dirs.size(); ++j) {
      const double c = eval_dirs[i].vec().dot(s.dirs[j].vec());
      acc += s.weights[static_cast<Eigen::Index>(j)] * std::exp(-kappa * c * c);
    }
    out[static_cast<Eigen::Index>(i)] = acc;
  }
  return out;
}

}  // namespace

GridFodf snap_to_grid(const DiscreteFodf& f, const GridPtr& grid) {
  return snap_support(support_of(f), grid);
}

GridFodf snap_to_grid(const GridFodf& f, const GridPtr& grid) {
  if (f.grid_ptr() == grid || f.grid().same_as(*grid)) {
    return GridFodf(grid, f.weights());
  }
  return snap_support(support_of(f), grid);
}

GridFodf snap_to_grid(const Fodf& f, const GridPtr& grid) {
  return std::visit([&](const auto& g) { return snap_to_grid(g, grid); }, f);
}

GridFodf smooth(const DiscreteFodf& f, SmoothingParam lambda, const GridPtr& grid) {
  return smooth_support(support_of(f), lambda.kernel_precision(), grid);
}

GridFodf smooth(const GridFodf& f, SmoothingParam lambda, const GridPtr& grid) {
  return smooth_support(support_of(f), lambda.kernel_precision(), grid);
}

GridFodf smooth(const Fodf& f, SmoothingParam lambda, const GridPtr& grid) {
  return std::visit([&](const auto& g) { return smooth(g, lambda, grid); }, f);
}

Eigen::VectorXd smooth_log(const DiscreteFodf& f, SmoothingParam lambda,
                           const GridPtr& grid) {
  return smooth_log_support(support_of(f), lambda.kernel_precision(), grid);
}

Eigen::VectorXd smooth_log(const GridFodf& f, SmoothingParam lambda,
                           const GridPtr& grid) {
  return smooth_log_support(support_of(f), lambda.kernel_precision(), grid);
}

Eigen::VectorXd smooth_log(const Fodf& f, SmoothingParam lambda, const GridPtr& grid) {
  return std::visit([&](const auto& g) { return smooth_log(g, lambda, grid); }, f);
}

Eigen::VectorXd st_project(const DiscreteFodf& f, double kappa,
                           const std::vector<Direction>& eval_dirs) {
  return project_support(support_of(f), kappa, eval_dirs);
}

Eigen::VectorXd st_project(const GridFodf& f, double kappa,
                           const std::vector<Direction>& eval_dirs) {
  return project_support(support_of(f), kappa, eval_dirs);
}

Eigen::VectorXd st_project(const Fodf& f, double kappa,
                           const std::vector<Direction>& eval_dirs) {
  return std::visit([&](const auto& g) { return st_project(g, kappa, eval_dirs); }, f);
}

}  // namespace odf
