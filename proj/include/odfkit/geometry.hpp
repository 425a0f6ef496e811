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

#ifndef ODFKIT_GEOMETRY_HPP
#define ODFKIT_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "odfkit/errors.hpp"
#include "odfkit/rng.hpp"

namespace odf {

using Vec3 = Eigen::Vector3d;

// An undirected orientation: a unit 3-vector with v and -v identified.
// The stored representative lies in the canonical hemisphere (z > 0, ties
// broken by y > 0 then x > 0) so equality and hashing are well defined.
class Direction {
 public:
  // Requires ||v|| within 1e-6 of 1; renormalizes and canonicalizes.
  explicit Direction(const Vec3& v);

  // Accepts any nonzero vector and normalizes it first.
  static Direction normalized(const Vec3& v);

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

  bool operator==(const Direction& other) const { return v_ == other.v_; }

 private:
  struct Unchecked {};
  Direction(const Vec3& v, Unchecked) : v_(v) {}

  Vec3 v_;
};

// Arc-length distance on the projective plane: arccos(|u.w|) in [0, pi/2].
double arc_distance(const Direction& u, const Direction& w);

// Raw-vector overload; throws InvalidDirectionError when either norm
// deviates from 1 by more than 1e-6.
double arc_distance(const Vec3& u, const Vec3& w);

// Deterministic quasi-uniform sampling of the projective plane: a Fibonacci
// (golden-angle) lattice restricted to the z > 0 hemisphere. The same p
// always yields the identical point list.
class DirectionGrid {
 public:
  explicit DirectionGrid(std::vector<Direction> points);

  std::size_t size() const { return points_.size(); }
  const Direction& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Direction>& points() const { return points_; }

  // Index of the grid point nearest to `d` (ties resolved to the lowest
  // index).
  std::size_t nearest(const Direction& d) const;

  bool same_as(const DirectionGrid& other) const;

 private:
  std::vector<Direction> points_;
};

// Throws EmptyGridError for p = 0.
DirectionGrid sample_grid(std::size_t p);

// Uniform draw on the projective plane (normalized standard-normal triple,
// flipped into the canonical hemisphere).
Direction random_direction(Rng& rng);

// A direction uniformly distributed on the great circle orthogonal to `u`.
Direction random_orthogonal_direction(const Direction& u, Rng& rng);

// Pairwise arc-length costs, entry (i, j) = arc_distance(a[i], b[j]).
// Throws InvalidArgumentError when either list is empty.
Eigen::MatrixXd cost_matrix(const std::vector<Direction>& a,
                            const std::vector<Direction>& b);

}  // namespace odf

#endif  // ODFKIT_GEOMETRY_HPP
