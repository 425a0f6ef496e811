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

#include "odfkit/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odfkit/errors.hpp"

namespace odf {

namespace {
constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;
}  // namespace

class SimplexSolver::Impl {
 public:
  explicit Impl(LpProblem prob) : prob_(std::move(prob)) {
    if (prob_.rows <= 0 || prob_.cols.empty()) {
      throw InvalidArgumentError("solve_lp: empty problem");
    }
    if (prob_.costs.size() != prob_.cols.size() ||
        prob_.rhs.size() != static_cast<Eigen::Index>(prob_.rows)) {
      throw InvalidArgumentError("solve_lp: inconsistent problem dimensions");
    }
    for (Eigen::Index r = 0; r < prob_.rhs.size(); ++r) {
      if (prob_.rhs[r] < 0.0) {
        throw InvalidArgumentError("solve_lp: rhs must be nonnegative");
      }
    }
    m_ = prob_.rows;
    // Artificials live at indices >= cols.size() and map to their row.
    basis_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      basis_[r] = -(r + 1);  // negative code: artificial for row r
    }
    is_basic_.assign(prob_.cols.size(), 0);
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    xb_ = prob_.rhs;
  }

  LpSolution solve() {
    const bool phase1_ok = run_phase(true);
    if (!phase1_ok || artificial_mass() > kPhase1Tol) {
      LpSolution sol;
      sol.feasible = false;
      return sol;
    }
    return finish();
  }

  LpSolution extend_and_reoptimize(
      int new_rows, const std::vector<std::vector<std::pair<int, double>>>& cols,
      const std::vector<double>& costs) {
    // New rows carry rhs 0 and start with an artificial basic at level 0;
    // the current solution stays feasible, so phase 1 is not repeated.
    const int old_m = m_;
    m_ += new_rows;
    {
      Eigen::VectorXd rhs(m_);
      rhs.head(old_m) = prob_.rhs;
      rhs.tail(new_rows).setZero();
      prob_.rhs = std::move(rhs);
      prob_.rows = m_;
      Eigen::MatrixXd binv = Eigen::MatrixXd::Identity(m_, m_);
      binv.topLeftCorner(old_m, old_m) = binv_;
      binv_ = std::move(binv);
      Eigen::VectorXd xb(m_);
      xb.head(old_m) = xb_;
      xb.tail(new_rows).setZero();
      xb_ = std::move(xb);
    }
    for (int r = old_m; r < m_; ++r) basis_.push_back(-(r + 1));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (const auto& [row, val] : cols[c]) {
        if (row < 0 || row >= m_) {
          throw InvalidArgumentError("extend: column references a missing row");
        }
        (void)val;
      }
      prob_.cols.push_back(cols[c]);
      prob_.costs.push_back(costs[c]);
      is_basic_.push_back(0);
    }
    return finish();
  }

 private:
  LpSolution finish() {
    LpSolution sol;
    sol.feasible = true;
    sol.optimal = run_phase(false);
    sol.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(prob_.cols.size()));
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] >= 0) sol.x[basis_[r]] = std::max(0.0, xb_[r]);
    }
    sol.duals = btran(false);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < prob_.cols.size(); ++j) {
      sol.objective += prob_.costs[j] * sol.x[static_cast<Eigen::Index>(j)];
    }
    return sol;
  }

  double cost_of(int col, bool phase1) const {
    if (col < 0) return phase1 ? 1.0 : 0.0;
    return phase1 ? 0.0 : prob_.costs[static_cast<std::size_t>(col)];
  }

  bool run_phase(bool phase1) {
    const long max_iters =
        20000L + 60L * (static_cast<long>(m_) +
                        static_cast<long>(prob_.cols.size()));
    bool bland = false;
    long stall = 0;
    double last_obj = std::numeric_limits<double>::infinity();
    for (long iter = 0; iter < max_iters; ++iter) {
      const Eigen::VectorXd y = btran(phase1);
      const int enter = price(phase1, bland, y);
      if (enter < 0) return true;
      const Eigen::VectorXd d = ftran(enter);
      const int leave = ratio_test(d, bland);
      if (leave < 0) return false;  // unbounded
      pivot(enter, leave, d);
      const double obj = phase_objective(phase1);
      if (obj < last_obj - 1e-13) {
        last_obj = obj;
        stall = 0;
      } else if (++stall > m_ + 10 && !bland) {
        // Degenerate plateau: Bland's rule cannot cycle.
        bland = true;
        stall = 0;
      }
      if (++since_refactor_ >= 300) refactorize();
    }
    return false;
  }

  double phase_objective(bool phase1) const {
    double obj = 0.0;
    for (int r = 0; r < m_; ++r) obj += cost_of(basis_[r], phase1) * xb_[r];
    return obj;
  }

  double artificial_mass() const {
    double mass = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < 0) mass += std::max(0.0, xb_[r]);
    }
    return mass;
  }

  Eigen::VectorXd btran(bool phase1) const {
    Eigen::VectorXd cb(m_);
    for (int r = 0; r < m_; ++r) cb[r] = cost_of(basis_[r], phase1);
    return binv_.transpose() * cb;
  }

  double column_dot(int col, const Eigen::VectorXd& y) const {
    double acc = 0.0;
    for (const auto& [row, val] : prob_.cols[static_cast<std::size_t>(col)]) {
      acc += y[row] * val;
    }
    return acc;
  }

  // Entering column: most negative reduced cost, or the first negative one
  // under Bland's rule. Artificials are never candidates.
  int price(bool phase1, bool bland, const Eigen::VectorXd& y) const {
    int best = -1;
    double best_rc = -kReducedCostTol;
    const int n = static_cast<int>(prob_.cols.size());
    for (int j = 0; j < n; ++j) {
      if (is_basic_[static_cast<std::size_t>(j)]) continue;
      const double rc = cost_of(j, phase1) - column_dot(j, y);
      if (rc < best_rc) {
        best_rc = rc;
        best = j;
        if (bland) return best;
      }
    }
    return best;
  }

  Eigen::VectorXd ftran(int col) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(m_);
    for (const auto& [row, val] : prob_.cols[static_cast<std::size_t>(col)]) {
      d += val * binv_.col(row);
    }
    return d;
  }

  int ratio_test(const Eigen::VectorXd& d, bool bland) const {
    // Basic artificials pinned at zero leave first (any nonzero pivot) so
    // redundant rows cannot pull an artificial back above zero.
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < 0 && xb_[r] <= kPivotTol && std::abs(d[r]) > kPivotTol) {
        return r;
      }
    }
    double best_theta = std::numeric_limits<double>::infinity();
    int best = -1;
    for (int r = 0; r < m_; ++r) {
      if (d[r] <= kPivotTol) continue;
      const double theta = std::max(0.0, xb_[r]) / d[r];
      if (best < 0 || theta < best_theta - 1e-12) {
        best_theta = theta;
        best = r;
      } else if (theta <= best_theta + 1e-12) {
        // Tie: lowest variable index under Bland, largest pivot otherwise.
        const bool take = bland ? basis_[r] < basis_[best] : d[r] > d[best];
        if (take) best = r;
      }
    }
    return best;
  }

  void pivot(int enter, int leave, const Eigen::VectorXd& d) {
    const double theta =
        d[leave] > kPivotTol ? std::max(0.0, xb_[leave]) / d[leave] : 0.0;
    xb_ -= theta * d;
    xb_[leave] = theta;
    if (basis_[leave] >= 0) is_basic_[static_cast<std::size_t>(basis_[leave])] = 0;
    basis_[leave] = enter;
    is_basic_[static_cast<std::size_t>(enter)] = 1;
    const Eigen::RowVectorXd pivot_row = binv_.row(leave) / d[leave];
    for (int r = 0; r < m_; ++r) {
      if (r == leave) continue;
      binv_.row(r) -= d[r] * pivot_row;
    }
    binv_.row(leave) = pivot_row;
    for (int r = 0; r < m_; ++r) {
      if (xb_[r] < 0.0 && xb_[r] > -1e-11) xb_[r] = 0.0;
    }
  }

  void refactorize() {
    since_refactor_ = 0;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
    for (int r = 0; r < m_; ++r) {
      const int col = basis_[r];
      if (col < 0) {
        b(-col - 1, r) = 1.0;
      } else {
        for (const auto& [row, val] : prob_.cols[static_cast<std::size_t>(col)]) {
          b(row, r) = val;
        }
      }
    }
    binv_ = b.partialPivLu().inverse();
    xb_ = binv_ * prob_.rhs;
    for (int r = 0; r < m_; ++r) {
      if (xb_[r] < 0.0 && xb_[r] > -1e-9) xb_[r] = 0.0;
    }
  }

  LpProblem prob_;
  int m_ = 0;
  std::vector<int> basis_;  // >= 0: column index; < 0: artificial for row -v-1
  std::vector<char> is_basic_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  int since_refactor_ = 0;
};

SimplexSolver::SimplexSolver(LpProblem prob)
    : impl_(std::make_unique<Impl>(std::move(prob))) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

LpSolution SimplexSolver::solve() { return impl_->solve(); }

LpSolution SimplexSolver::extend_and_reoptimize(
    int new_rows, const std::vector<std::vector<std::pair<int, double>>>& cols,
    const std::vector<double>& costs) {
  return impl_->extend_and_reoptimize(new_rows, cols, costs);
}

LpSolution solve_lp(const LpProblem& prob) { return SimplexSolver(prob).solve(); }

}  // namespace odf
