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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "odfkit/fodf.hpp"

using namespace odf;

namespace {
const Direction dx{Vec3::UnitX()};
const Direction dy{Vec3::UnitY()};
const Direction dz{Vec3::UnitZ()};
}  // namespace

TEST_CASE("DiscreteFodf invariants") {
  // Duplicates merge (the second atom is the antipode of the first).
  const DiscreteFodf f({{dx, 0.25}, {Direction(Vec3(-Vec3::UnitX())), 0.25}, {dy, 0.5}});
  CHECK(f.size() == 2);
  CHECK(f.atoms()[0].weight == doctest::Approx(0.5));

  CHECK_THROWS_AS(DiscreteFodf({{dx, 0.5}, {dy, 0.6}}), InvalidArgumentError);
  CHECK_THROWS_AS(DiscreteFodf({{dx, -0.2}, {dy, 1.2}}), InvalidArgumentError);
  CHECK_THROWS_AS(DiscreteFodf({}), InvalidArgumentError);

  // Weights renormalize to an exact unit sum.
  const DiscreteFodf g({{dx, 0.5 + 4e-7}, {dy, 0.5}});
  double total = 0.0;
  for (const auto& a : g.atoms()) total += a.weight;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("GridFodf invariants") {
  const GridPtr grid = make_grid(16);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(16, 1.0 / 16.0);
  CHECK_NOTHROW(GridFodf(grid, w));
  w[0] = -0.01;
  CHECK_THROWS_AS(GridFodf(grid, w), InvalidArgumentError);
  CHECK_THROWS_AS(GridFodf(grid, Eigen::VectorXd::Constant(15, 1.0 / 15.0)),
                  InvalidArgumentError);
}

TEST_CASE("snap_to_grid") {
  const GridPtr grid = make_grid(64);
  const Direction on_grid = (*grid)[10];

  // An atom already on a grid point keeps all mass at that index.
  const GridFodf snapped = snap_to_grid(DiscreteFodf({{on_grid, 1.0}}), grid);
  CHECK(snapped.weights()[10] == doctest::Approx(1.0));

  // Two atoms snapping to the same point accumulate.
  Rng rng(1);
  const Vec3 nudged = (on_grid.vec() + 0.001 * Vec3::UnitZ()).normalized();
  const GridFodf merged =
      snap_to_grid(DiscreteFodf({{on_grid, 0.5}, {Direction(nudged), 0.5}}), grid);
  CHECK(merged.weights()[10] == doctest::Approx(1.0));

  for (int t = 0; t < 20; ++t) {
    const DiscreteFodf f({{random_direction(rng), 0.3}, {random_direction(rng), 0.7}});
    CHECK(snap_to_grid(f, grid).weights().sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("smooth limits") {
  const GridPtr grid = make_grid(362);
  const DiscreteFodf f({{dx, 0.5}, {dy, 0.5}});

  // Very tight kernel reproduces the snap.
  const GridFodf tight = smooth(f, SmoothingParam(1e6), grid);
  const GridFodf snapped = snap_to_grid(f, grid);
  CHECK((tight.weights() - snapped.weights()).cwiseAbs().maxCoeff() < 1e-9);

  // Very wide kernel approaches the uniform distribution.
  const GridFodf wide = smooth(f, SmoothingParam(1e-6), grid);
  CHECK(wide.weights().maxCoeff() - wide.weights().minCoeff() < 1e-4);

  CHECK(tight.weights().sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(wide.weights().sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(SmoothingParam(0.0), InvalidArgumentError);
  CHECK_THROWS_AS(SmoothingParam(-2.0), InvalidArgumentError);
}

TEST_CASE("smooth is antipodally invariant") {
  const GridPtr grid = make_grid(100);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const Direction d = random_direction(rng);
    const GridFodf a = smooth(DiscreteFodf({{d, 1.0}}), SmoothingParam(25.0), grid);
    const GridFodf b = smooth(DiscreteFodf({{Direction(Vec3(-d.vec())), 1.0}}),
                              SmoothingParam(25.0), grid);
    CHECK((a.weights() - b.weights()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("st_project point values") {
  const DiscreteFodf delta_x({{dx, 1.0}});
  const double kappa = 1.5;

  // Evaluation orthogonal to the atom: kernel exp(0) = 1.
  CHECK(st_project(delta_x, kappa, {dy})[0] == doctest::Approx(1.0));
  // Evaluation at the atom: exp(-kappa).
  CHECK(st_project(delta_x, kappa, {dx})[0] == doctest::Approx(std::exp(-1.5)));

  const DiscreteFodf pair({{dx, 0.5}, {dy, 0.5}});
  CHECK(st_project(pair, kappa, {dx})[0] ==
        doctest::Approx(0.5 * std::exp(-1.5) + 0.5).epsilon(1e-12));
  CHECK(st_project(pair, kappa, {dx})[0] == doctest::Approx(0.6116).epsilon(1e-4));
}

TEST_CASE("st_project bounds and antipodal invariance") {
  const GridPtr grid = make_grid(50);
  Rng rng(8);
  const double kappa = 2.0;
  const std::vector<Direction> eval = sample_grid(40).points();
  for (int t = 0; t < 10; ++t) {
    const DiscreteFodf f({{random_direction(rng), 0.4}, {random_direction(rng), 0.6}});
    const Eigen::VectorXd vals = st_project(f, kappa, eval);
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      CHECK(vals[i] > std::exp(-kappa) - 1e-12);
      CHECK(vals[i] <= 1.0 + 1e-12);
    }
    std::vector<WeightedDirection> mirrored = f.atoms();
    mirrored[0].dir = Direction(Vec3(-mirrored[0].dir.vec()));
    const Eigen::VectorXd vals2 = st_project(DiscreteFodf(mirrored), kappa, eval);
    CHECK((vals - vals2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("grid fodf round trips through to_discrete") {
  const GridPtr grid = make_grid(30);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(30);
  w[3] = 0.25;
  w[17] = 0.75;
  const GridFodf g(grid, w);
  const DiscreteFodf d = to_discrete(g);
  REQUIRE(d.size() == 2);
  const GridFodf back = snap_to_grid(d, grid);
  CHECK((back.weights() - g.weights()).cwiseAbs().maxCoeff() < 1e-12);
}
