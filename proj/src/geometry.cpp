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

#include "odfkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace odf {

namespace {

constexpr double kUnitNormTol = 1e-6;

// Flip to the canonical hemisphere representative: z > 0, ties broken by
// y > 0, then x > 0.
Vec3 canonical(Vec3 v) {
  if (v.z() < 0.0) return -v;
  if (v.z() == 0.0) {
    if (v.y() < 0.0) return -v;
    if (v.y() == 0.0 && v.x() < 0.0) return -v;
  }
  return v;
}

double clamped_acos_abs_dot(const Vec3& u, const Vec3& w) {
  // Identical or exactly mirrored inputs are distance 0; skipping the dot
  // product avoids acos(1 - eps) noise of order sqrt(eps).
  if ((u.x() == w.x() && u.y() == w.y() && u.z() == w.z()) ||
      (u.x() == -w.x() && u.y() == -w.y() && u.z() == -w.z())) {
    return 0.0;
  }
  // Clamp into [-1, 1] so roundoff near parallel vectors cannot produce NaN.
  const double d = std::min(1.0, std::max(-1.0, u.dot(w)));
  return std::acos(std::abs(d));
}

void require_unit(const Vec3& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > kUnitNormTol) {
    throw InvalidDirectionError(std::string(what) +
                                ": vector norm deviates from 1 by more than 1e-6");
  }
}

}  // namespace

Direction::Direction(const Vec3& v) {
  require_unit(v, "Direction");
  const double n = v.norm();
  // Keep bit-exact components when already unit so construction is
  // idempotent; renormalize only genuinely off-unit input.
  v_ = canonical(std::abs(n - 1.0) <= 1e-12 ? v : Vec3(v / n));
}

Direction Direction::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InvalidDirectionError("Direction::normalized: zero or non-finite vector");
  }
  return Direction(Vec3(v / n));
}

double arc_distance(const Direction& u, const Direction& w) {
  return clamped_acos_abs_dot(u.vec(), w.vec());
}

double arc_distance(const Vec3& u, const Vec3& w) {
  require_unit(u, "arc_distance");
  require_unit(w, "arc_distance");
  return clamped_acos_abs_dot(u, w);
}

DirectionGrid::DirectionGrid(std::vector<Direction> points)
    : points_(std::move(points)) {
  if (points_.empty()) throw EmptyGridError("DirectionGrid: no points");
}

std::size_t DirectionGrid::nearest(const Direction& d) const {
  std::size_t best = 0;
  double best_dot = -1.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double a = std::abs(points_[i].vec().dot(d.vec()));
    if (a > best_dot) {
      best_dot = a;
      best = i;
    }
  }
  return best;
}

bool DirectionGrid::same_as(const DirectionGrid& other) const {
  if (this == &other) return true;
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!(points_[i] == other.points_[i])) return false;
  }
  return true;
}

DirectionGrid sample_grid(std::size_t p) {
  if (p == 0) throw EmptyGridError("sample_grid: p must be positive");
  // Golden-angle spiral over z in (0, 1); every representative already lies
  // in the canonical hemisphere.
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<Direction> pts;
  pts.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double z = (static_cast<double>(i) + 0.5) / static_cast<double>(p);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = golden * static_cast<double>(i);
    const double phi = 2.0 * M_PI * (t - std::floor(t));
    Vec3 v(r * std::cos(phi), r * std::sin(phi), z);
    pts.push_back(Direction::normalized(v));
  }
  return DirectionGrid(std::move(pts));
}

Direction random_direction(Rng& rng) {
  for (;;) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-12) return Direction(Vec3(v / n));
  }
}

Direction random_orthogonal_direction(const Direction& u, Rng& rng) {
  // Orthonormal frame of the plane orthogonal to u.
  const Vec3 axis = std::abs(u.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 e1 = u.vec().cross(axis).normalized();
  const Vec3 e2 = u.vec().cross(e1).normalized();
  const double phi = 2.0 * M_PI * rng.uniform();
  return Direction(Vec3(std::cos(phi) * e1 + std::sin(phi) * e2));
}

Eigen::MatrixXd cost_matrix(const std::vector<Direction>& a,
                            const std::vector<Direction>& b) {
  if (a.empty() || b.empty()) {
    throw InvalidArgumentError("cost_matrix: empty direction list");
  }
  Eigen::MatrixXd c(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          arc_distance(a[i], b[j]);
    }
  }
  return c;
}

}  // namespace odf
