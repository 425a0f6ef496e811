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

#ifndef ODFKIT_SIMPLEX_HPP
#define ODFKIT_SIMPLEX_HPP

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

namespace odf {

// Equality-form linear program: min c.x subject to A x = b, x >= 0,
// with A stored column-wise as sparse entries and b >= 0.
struct LpProblem {
  int rows = 0;
  std::vector<std::vector<std::pair<int, double>>> cols;
  std::vector<double> costs;
  Eigen::VectorXd rhs;
};

struct LpSolution {
  bool feasible = false;
  bool optimal = false;
  double objective = 0.0;
  Eigen::VectorXd x;      // one value per column of the problem
  Eigen::VectorXd duals;  // row potentials; c_j - duals.a_j >= -1e-9 at optimum
};

// Two-phase revised simplex with an explicit basis inverse, Dantzig pricing
// and a Bland fallback on degenerate plateaus. Sized for the small structured
// programs produced by the barycenter solver (hundreds of rows).
//
// The solver supports incremental growth for exchange algorithms: new rows
// may only be referenced by columns added after them, which keeps the
// extended basis block-diagonal and the current solution feasible.
class SimplexSolver {
 public:
  explicit SimplexSolver(LpProblem prob);
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  // Full two-phase solve from the artificial basis.
  LpSolution solve();

  // Appends empty rows (rhs 0) and additional columns, then reoptimizes from
  // the current basis without a fresh phase 1.
  LpSolution extend_and_reoptimize(
      int new_rows, const std::vector<std::vector<std::pair<int, double>>>& cols,
      const std::vector<double>& costs);

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper.
LpSolution solve_lp(const LpProblem& prob);

}  // namespace odf

#endif  // ODFKIT_SIMPLEX_HPP
