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

#ifndef ODFKIT_TRANSPORT_HPP
#define ODFKIT_TRANSPORT_HPP

#include <Eigen/Dense>

#include "odfkit/errors.hpp"

namespace odf {

// Optimal mass movement between two weight vectors under a pairwise cost.
struct TransportPlan {
  Eigen::MatrixXd plan;  // entry (i, j): mass moved from source i to sink j
  double cost = 0.0;     // total transported work
  Eigen::VectorXd u;     // source potentials
  Eigen::VectorXd v;     // sink potentials (u_i + v_j <= c_ij everywhere)
};

// Transportation simplex over the bipartite transport polytope.
//
// Both weight vectors must be nonnegative and sum to 1 within 1e-6; they are
// rescaled to exact balance internally. Degenerate pivots fall back to
// Bland's rule after a stall, so the solve always terminates.
TransportPlan solve_transport(const Eigen::MatrixXd& costs,
                              const Eigen::VectorXd& w1,
                              const Eigen::VectorXd& w2);

// Largest violation of dual feasibility / complementary slackness of `plan`
// against its own potentials; a correct solve keeps this below 1e-8.
double transport_certificate_gap(const TransportPlan& plan,
                                 const Eigen::MatrixXd& costs);

}  // namespace odf

#endif  // ODFKIT_TRANSPORT_HPP
