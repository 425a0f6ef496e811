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

#ifndef ODFKIT_FODF_HPP
#define ODFKIT_FODF_HPP

#include <Eigen/Dense>
#include <memory>
#include <variant>
#include <vector>

#include "odfkit/geometry.hpp"

namespace odf {

using GridPtr = std::shared_ptr<const DirectionGrid>;

inline GridPtr make_grid(std::size_t p) {
  return std::make_shared<const DirectionGrid>(sample_grid(p));
}

struct WeightedDirection {
  Direction dir;
  double weight;
};

// Finite mixture of orientation atoms; weights are positive and sum to 1.
// Atoms closer than 1e-9 rad are merged at construction.
class DiscreteFodf {
 public:
  explicit DiscreteFodf(std::vector<WeightedDirection> atoms);

  const std::vector<WeightedDirection>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<WeightedDirection> atoms_;
};

// Probability weights over a fixed direction grid.
class GridFodf {
 public:
  GridFodf(GridPtr grid, Eigen::VectorXd weights);

  const DirectionGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  GridPtr grid_;
  Eigen::VectorXd weights_;
};

using Fodf = std::variant<DiscreteFodf, GridFodf>;

// Smoothing strength; must be positive. The Gaussian kernel carries
// variance (kSmoothingPrecisionScale * lambda)^-1, so the presets 1/10/100
// span bandwidths of roughly 0.32 down to 0.03 rad.
inline constexpr double kSmoothingPrecisionScale = 10.0;

struct SmoothingParam {
  explicit SmoothingParam(double l);
  double lambda;

  double kernel_precision() const { return kSmoothingPrecisionScale * lambda; }
};

// Atoms at the strictly positive grid weights.
DiscreteFodf to_discrete(const GridFodf& f);

// Common support form used by the transport-based distances: directions
// paired with strictly positive weights.
struct Support {
  std::vector<Direction> dirs;
  Eigen::VectorXd weights;
};

Support support_of(const DiscreteFodf& f);
Support support_of(const GridFodf& f);
Support support_of(const Fodf& f);

// Moves each atom's mass to its nearest grid point (ties to the lowest
// index); total mass is preserved.
GridFodf snap_to_grid(const DiscreteFodf& f, const GridPtr& grid);
GridFodf snap_to_grid(const GridFodf& f, const GridPtr& grid);
GridFodf snap_to_grid(const Fodf& f, const GridPtr& grid);

// Kernel smoothing onto `grid`: every atom spreads its mass through a
// grid-normalized Gaussian in arc length, so total mass is 1 and the
// tight-kernel limit reproduces the snap.
GridFodf smooth(const DiscreteFodf& f, SmoothingParam lambda, const GridPtr& grid);
GridFodf smooth(const GridFodf& f, SmoothingParam lambda, const GridPtr& grid);
GridFodf smooth(const Fodf& f, SmoothingParam lambda, const GridPtr& grid);

// Log weights of the smoothed measure (log-sum-exp normalized to 0). The
// smoothed density is strictly positive everywhere; this form keeps its far
// tail representable where exp() would underflow, which the divergence
// computations need at tight bandwidths.
Eigen::VectorXd smooth_log(const DiscreteFodf& f, SmoothingParam lambda,
                           const GridPtr& grid);
Eigen::VectorXd smooth_log(const GridFodf& f, SmoothingParam lambda,
                           const GridPtr& grid);
Eigen::VectorXd smooth_log(const Fodf& f, SmoothingParam lambda, const GridPtr& grid);

// Projection through the orientation response kernel exp(-kappa (v.w)^2):
// entry i integrates the kernel at eval_dirs[i] against the fODF's mass.
Eigen::VectorXd st_project(const DiscreteFodf& f, double kappa,
                           const std::vector<Direction>& eval_dirs);
Eigen::VectorXd st_project(const GridFodf& f, double kappa,
                           const std::vector<Direction>& eval_dirs);
Eigen::VectorXd st_project(const Fodf& f, double kappa,
                           const std::vector<Direction>& eval_dirs);

}  // namespace odf

#endif  // ODFKIT_FODF_HPP
