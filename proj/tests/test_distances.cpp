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

#include "odfkit/distances.hpp"
#include "support/oracles.hpp"

using namespace odf;

namespace {

const Direction dx{Vec3::UnitX()};
const Direction dy{Vec3::UnitY()};
const Direction dz{Vec3::UnitZ()};

DiscreteFodf random_fodf(Rng& rng, int max_atoms = 5) {
  const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_atoms)));
  std::vector<WeightedDirection> atoms;
  double total = 0.0;
  std::vector<double> raw;
  for (int i = 0; i < k; ++i) {
    raw.push_back(rng.uniform());
    total += raw.back();
  }
  for (int i = 0; i < k; ++i) {
    atoms.push_back({random_direction(rng), raw[static_cast<std::size_t>(i)] / total});
  }
  return DiscreteFodf(std::move(atoms));
}

}  // namespace

TEST_CASE("emd point values") {
  const DiscreteFodf fx({{dx, 1.0}});
  const DiscreteFodf fy({{dy, 1.0}});
  const DiscreteFodf pair({{dx, 0.5}, {dy, 0.5}});

  CHECK(emd(Fodf(pair), Fodf(pair)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(emd(Fodf(fx), Fodf(fy)) == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(emd(Fodf(pair), Fodf(fx)) == doctest::Approx(M_PI / 4).epsilon(1e-12));
  CHECK(emd(Fodf(pair), Fodf(fx)) == doctest::Approx(0.7854).epsilon(1e-4));
}

TEST_CASE("wasserstein2 point values") {
  const DiscreteFodf fx({{dx, 1.0}});
  const DiscreteFodf fy({{dy, 1.0}});
  const DiscreteFodf pair({{dx, 0.5}, {dy, 0.5}});
  CHECK(wasserstein2(Fodf(pair), Fodf(pair)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wasserstein2(Fodf(fx), Fodf(fy)) == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(wasserstein2(Fodf(pair), Fodf(fx)) ==
        doctest::Approx(std::sqrt(0.5) * M_PI / 2).epsilon(1e-12));
  CHECK(wasserstein2(Fodf(pair), Fodf(fx)) == doctest::Approx(1.1107).epsilon(1e-4));
}

TEST_CASE("emd metric axioms on random atomic fODFs") {
  Rng rng(101);
  for (int t = 0; t < 1000; ++t) {
    const DiscreteFodf a = random_fodf(rng);
    const DiscreteFodf b = random_fodf(rng);
    const double ab = emd(Fodf(a), Fodf(b));
    const double ba = emd(Fodf(b), Fodf(a));
    CHECK(ab >= 0.0);
    CHECK(ab <= M_PI / 2 + 1e-12);
    CHECK(std::abs(ab - ba) < 1e-9);
    if (t % 4 == 0) {
      const DiscreteFodf c = random_fodf(rng);
      const double ac = emd(Fodf(a), Fodf(c));
      const double cb = emd(Fodf(c), Fodf(b));
      CHECK(ab <= ac + cb + 1e-8);
    }
    CHECK(emd(Fodf(a), Fodf(a)) <= 1e-9);  // identity of indiscernibles
  }
}

TEST_CASE("emd is dominated by wasserstein2") {
  Rng rng(102);
  for (int t = 0; t < 1000; ++t) {
    const DiscreteFodf a = random_fodf(rng);
    const DiscreteFodf b = random_fodf(rng);
    CHECK(emd(Fodf(a), Fodf(b)) <= wasserstein2(Fodf(a), Fodf(b)) + 1e-9);
  }
}

TEST_CASE("total variation on grids") {
  const GridPtr grid = make_grid(64);
  const Direction a = (*grid)[5];
  const Direction b = (*grid)[40];
  const DiscreteFodf fa({{a, 1.0}});
  const DiscreteFodf fb({{b, 1.0}});
  const DiscreteFodf mix({{a, 0.5}, {b, 0.5}});

  CHECK(total_variation(Fodf(fa), Fodf(fa), grid) == doctest::Approx(0.0));
  // Disjoint atomic supports saturate at one.
  CHECK(total_variation(Fodf(fa), Fodf(fb), grid) == doctest::Approx(1.0));
  CHECK(total_variation(Fodf(mix), Fodf(fa), grid) == doctest::Approx(0.5));

  const GridPtr other = make_grid(65);
  const GridFodf ga = snap_to_grid(fa, grid);
  const GridFodf gb = snap_to_grid(fb, other);
  CHECK_THROWS_AS(total_variation(ga, gb), GridMismatchError);

  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const double tv =
        total_variation(Fodf(random_fodf(rng)), Fodf(random_fodf(rng)), grid);
    CHECK(tv >= 0.0);
    CHECK(tv <= 1.0 + 1e-12);
  }
}

TEST_CASE("smoothed tv basics") {
  const GridPtr grid = make_grid(362);
  const DiscreteFodf fa({{dx, 1.0}});
  const DiscreteFodf fb({{dy, 1.0}});
  CHECK(smoothed_tv(Fodf(fa), Fodf(fa), SmoothingParam(10.0), grid) ==
        doctest::Approx(0.0));
  // Huge bandwidth smooths everything to near uniform.
  CHECK(smoothed_tv(Fodf(fa), Fodf(fb), SmoothingParam(1e-6), grid) < 1e-4);
}

TEST_CASE("smoothed tv is nondecreasing and concave in separation") {
  // Sweep of separations in a fixed plane on a fine grid; the quadrature
  // noise must stay below the concavity tolerance.
  const GridPtr grid = make_grid(2000);
  const SmoothingParam lambda(10.0);
  const int steps = 20;
  std::vector<double> tv;
  for (int s = 0; s <= steps; ++s) {
    const double theta = (M_PI / 2) * s / steps;
    const Direction w(Vec3(std::cos(theta), std::sin(theta), 0.0));
    tv.push_back(smoothed_tv(Fodf(DiscreteFodf({{dx, 1.0}})),
                             Fodf(DiscreteFodf({{w, 1.0}})), lambda, grid));
  }
  for (int s = 0; s + 1 <= steps; ++s) {
    CHECK(tv[static_cast<std::size_t>(s + 1)] >= tv[static_cast<std::size_t>(s)] - 1e-9);
  }
  for (int s = 1; s + 1 <= steps; ++s) {
    const double second = tv[static_cast<std::size_t>(s + 1)] -
                          2.0 * tv[static_cast<std::size_t>(s)] +
                          tv[static_cast<std::size_t>(s - 1)];
    CHECK(second <= 1e-6);
  }
}

TEST_CASE("skl point values and symmetry") {
  const GridPtr grid = make_grid(64);
  const Direction a = (*grid)[5];
  const Direction b = (*grid)[40];
  const DiscreteFodf fa({{a, 1.0}});
  const DiscreteFodf fb({{b, 1.0}});
  CHECK(skl(Fodf(fa), Fodf(fa), grid) == doctest::Approx(0.0));
  // Disjoint atomic supports diverge.
  CHECK(std::isinf(skl(Fodf(fa), Fodf(fb), grid)));

  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const DiscreteFodf f1 = random_fodf(rng);
    const DiscreteFodf f2 = random_fodf(rng);
    const GridFodf s1 = smooth(f1, SmoothingParam(10.0), grid);
    const GridFodf s2 = smooth(f2, SmoothingParam(10.0), grid);
    CHECK(skl(s1, s2) == skl(s2, s1));  // exact symmetry
    CHECK(skl(s1, s2) >= 0.0);
  }
}

TEST_CASE("smoothed skl is finite for disjoint atoms") {
  const GridPtr grid = make_grid(362);
  const DiscreteFodf fa({{dx, 1.0}});
  const DiscreteFodf fb({{dy, 1.0}});
  CHECK(smoothed_skl(Fodf(fa), Fodf(fa), SmoothingParam(10.0), grid) ==
        doctest::Approx(0.0));
  const double v = smoothed_skl(Fodf(fa), Fodf(fb), SmoothingParam(10.0), grid);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
  CHECK(smoothed_skl(Fodf(fa), Fodf(fb), SmoothingParam(10.0), grid) ==
        smoothed_skl(Fodf(fb), Fodf(fa), SmoothingParam(10.0), grid));
}

TEST_CASE("angular error via optimal matching") {
  const DiscreteFodf f1({{dx, 0.3}, {dy, 0.7}});
  const DiscreteFodf f2({{dy, 0.5}, {dx, 0.5}});  // same set, swapped order
  CHECK(angular_error(f1, f2) == doctest::Approx(0.0));

  const DiscreteFodf a({{dx, 1.0}});
  const DiscreteFodf b({{dy, 1.0}});
  CHECK(angular_error(a, b) == doctest::Approx(M_PI / 2));

  CHECK_THROWS_AS(angular_error(a, f1), UndefinedAngularErrorError);
  const GridPtr grid = make_grid(16);
  const Fodf gridded(snap_to_grid(f1, grid));
  CHECK_THROWS_AS(angular_error(gridded, Fodf(f1)), UndefinedAngularErrorError);
}

TEST_CASE("hungarian matching equals brute force") {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng.below(4));  // 2..5
    Eigen::MatrixXd c(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) c(i, j) = rng.uniform();
    }
    CHECK(min_assignment_cost(c) ==
          doctest::Approx(oracles::assignment_bruteforce(c)).epsilon(1e-12));
  }
}

TEST_CASE("rmise basics") {
  const DiscreteFodf fx({{dx, 1.0}});
  const DiscreteFodf fy({{dy, 1.0}});
  CHECK(rmise(Fodf(fx), Fodf(fx), 1.5) == doctest::Approx(0.0));
  CHECK(rmise(Fodf(fx), Fodf(fy), 1.5) ==
        doctest::Approx(rmise(Fodf(fy), Fodf(fx), 1.5)).epsilon(1e-12));

  // Monte Carlo quadrature oracle for orthogonal single atoms.
  Rng rng(44);
  double acc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const Direction v = random_direction(rng);
    const double cx = v.vec().dot(dx.vec());
    const double cy = v.vec().dot(dy.vec());
    const double diff = std::exp(-1.5 * cx * cx) - std::exp(-1.5 * cy * cy);
    acc += diff * diff;
  }
  const double mc = std::sqrt(2.0 * M_PI * acc / draws);
  CHECK(rmise(Fodf(fx), Fodf(fy), 1.5) == doctest::Approx(mc).epsilon(0.01));
}

TEST_CASE("robustness to outliers on the euclidean line") {
  // P = delta_0 contaminated with mass eps at distance x.
  for (const double eps : {1e-1, 1e-2, 1e-3}) {
    for (const double x : {10.0, 100.0}) {
      Eigen::VectorXd xs(1), wx(1), ys(2), wy(2);
      xs << 0.0;
      wx << 1.0;
      ys << 0.0, x;
      wy << 1.0 - eps, eps;
      CHECK(line::emd(xs, wx, ys, wy) == doctest::Approx(eps * x).epsilon(1e-9));
      CHECK(line::wasserstein2(xs, wx, ys, wy) ==
            doctest::Approx(std::sqrt(eps) * x).epsilon(1e-9));

      // Smoothed TV with lambda = 100 responds with about eps.
      const double lambda = 100.0;
      const double lo = -1.0, hi = x + 1.0, step = 0.005;
      const int n = static_cast<int>((hi - lo) / step) + 1;
      Eigen::VectorXd grid(n);
      for (int i = 0; i < n; ++i) grid[i] = lo + i * step;
      const Eigen::VectorXd p = line::smooth(xs, wx, lambda, grid);
      const Eigen::VectorXd q = line::smooth(ys, wy, lambda, grid);
      const double stv = total_variation(p, q);
      CHECK(stv == doctest::Approx(eps).epsilon(0.10));
    }
  }
}

TEST_CASE("scale equivariance of transport distances on the line") {
  Rng rng(3);
  for (const double scale : {2.0, 10.0}) {
    for (int t = 0; t < 100; ++t) {
      const int k1 = 1 + static_cast<int>(rng.below(4));
      const int k2 = 1 + static_cast<int>(rng.below(4));
      Eigen::VectorXd xs(k1), ys(k2), wx(k1), wy(k2);
      for (int i = 0; i < k1; ++i) {
        xs[i] = 10.0 * (rng.uniform() - 0.5);
        wx[i] = rng.uniform();
      }
      for (int j = 0; j < k2; ++j) {
        ys[j] = 10.0 * (rng.uniform() - 0.5);
        wy[j] = rng.uniform();
      }
      wx /= wx.sum();
      wy /= wy.sum();
      const double base = line::emd(xs, wx, ys, wy);
      const double scaled = line::emd(scale * xs, wx, scale * ys, wy);
      CHECK(scaled == doctest::Approx(scale * base).epsilon(1e-9));

      // Unsmoothed TV is scale invariant.
      CHECK(line::total_variation_atomic(scale * xs, wx, scale * ys, wy) ==
            doctest::Approx(line::total_variation_atomic(xs, wx, ys, wy))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("single-atom distances extend the angular error") {
  Rng rng(77);
  for (int t = 0; t < 50; ++t) {
    const Direction v = random_direction(rng);
    const Direction w = random_direction(rng);
    const double arc = arc_distance(v, w);
    const DiscreteFodf fv({{v, 1.0}});
    const DiscreteFodf fw({{w, 1.0}});
    CHECK(emd(Fodf(fv), Fodf(fw)) == doctest::Approx(arc).epsilon(1e-12));
    CHECK(wasserstein2(Fodf(fv), Fodf(fw)) == doctest::Approx(arc).epsilon(1e-12));
    CHECK(angular_error(fv, fw) == doctest::Approx(arc).epsilon(1e-12));
  }
}

TEST_CASE("metric parsing round trip") {
  for (const auto name : {"emd", "w2", "tv", "stv", "skl", "sskl", "ae", "rmise"}) {
    CHECK(metric_name(parse_metric(name)) == name);
  }
  CHECK_THROWS_AS(parse_metric("nope"), InvalidArgumentError);
}
