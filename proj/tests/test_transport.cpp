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

#include "odfkit/rng.hpp"
#include "odfkit/transport.hpp"
#include "support/oracles.hpp"

using namespace odf;

namespace {

Eigen::VectorXd random_weights(int n, Rng& rng) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = rng.uniform();
  return w / w.sum();
}

}  // namespace

TEST_CASE("forced transport on singleton supports") {
  Eigen::MatrixXd c(1, 1);
  c << 0.37;
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  const TransportPlan plan = solve_transport(c, one, one);
  CHECK(plan.plan(0, 0) == doctest::Approx(1.0));
  CHECK(plan.cost == doctest::Approx(0.37));
}

TEST_CASE("single destination pools the weighted costs") {
  Eigen::MatrixXd c(2, 1);
  c << 0.2, 0.8;
  Eigen::VectorXd w1(2);
  w1 << 0.5, 0.5;
  Eigen::VectorXd w2 = Eigen::VectorXd::Ones(1);
  const TransportPlan plan = solve_transport(c, w1, w2);
  CHECK(plan.cost == doctest::Approx(0.5 * 0.2 + 0.5 * 0.8));
}

TEST_CASE("input validation") {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, 1.0, 1.0, 0.0;
  Eigen::VectorXd good(2), negative(2), unbalanced(2);
  good << 0.5, 0.5;
  negative << -0.1, 1.1;
  unbalanced << 0.6, 0.6;
  CHECK_THROWS_AS(solve_transport(c, negative, good), InvalidArgumentError);
  CHECK_THROWS_AS(solve_transport(c, good, unbalanced), InvalidArgumentError);
  CHECK_THROWS_AS(solve_transport(Eigen::MatrixXd(2, 1), good, good),
                  InvalidArgumentError);
}

TEST_CASE("matches brute-force vertex enumeration on random instances") {
  Rng rng(31337);
  for (int t = 0; t < 200; ++t) {
    const int m = 2 + static_cast<int>(rng.below(2));  // 2 or 3
    const int n = 2 + static_cast<int>(rng.below(2));
    Eigen::MatrixXd c(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) c(i, j) = rng.uniform();
    }
    const Eigen::VectorXd a = random_weights(m, rng);
    const Eigen::VectorXd b = random_weights(n, rng);
    const TransportPlan plan = solve_transport(c, a, b);
    const double expected = oracles::transport_bruteforce(c, a, b);
    CHECK(plan.cost == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("marginals are met and the dual certificate holds") {
  Rng rng(55);
  for (int t = 0; t < 50; ++t) {
    const int m = 2 + static_cast<int>(rng.below(7));
    const int n = 2 + static_cast<int>(rng.below(7));
    Eigen::MatrixXd c(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) c(i, j) = rng.uniform() * 2.0;
    }
    const Eigen::VectorXd a = random_weights(m, rng);
    const Eigen::VectorXd b = random_weights(n, rng);
    const TransportPlan plan = solve_transport(c, a, b);
    CHECK((plan.plan.rowwise().sum() - a).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((plan.plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(plan.plan.minCoeff() >= 0.0);
    CHECK(transport_certificate_gap(plan, c) < 1e-8);
  }
}

TEST_CASE("zero-weight support points are pruned but kept in the plan shape") {
  Eigen::MatrixXd c(3, 2);
  c << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  Eigen::VectorXd a(3), b(2);
  a << 0.5, 0.0, 0.5;
  b << 0.5, 0.5;
  const TransportPlan plan = solve_transport(c, a, b);
  CHECK(plan.plan.rows() == 3);
  CHECK(plan.plan.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(transport_certificate_gap(plan, c) < 1e-8);
}

TEST_CASE("degenerate ties terminate and stay optimal") {
  // Equal weights and a flat cost block force heavy degeneracy.
  const int n = 6;
  Eigen::MatrixXd c = Eigen::MatrixXd::Ones(n, n);
  c.diagonal().setZero();
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
  const TransportPlan plan = solve_transport(c, w, w);
  CHECK(plan.cost == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(transport_certificate_gap(plan, c) < 1e-8);
}
