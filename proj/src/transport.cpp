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

#include "odfkit/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace odf {

namespace {

constexpr double kBalanceTol = 1e-6;
constexpr double kReducedCostTol = 1e-11;

struct Arc {
  int i;  // source index
  int j;  // sink index
  double flow;
};

// Solves the balanced problem on strictly positive weights. Nodes are
// sources 0..m-1 and sinks m..m+n-1; the basis is a spanning tree of
// m+n-1 arcs maintained explicitly.
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::MatrixXd& c, Eigen::VectorXd a, Eigen::VectorXd b)
      : c_(c),
        m_(static_cast<int>(a.size())),
        n_(static_cast<int>(b.size())),
        u_(m_),
        v_(n_) {
    northwest_corner(a, b);
    const long max_pivots = 2000L + 200L * static_cast<long>(m_ + n_) *
                                        static_cast<long>(m_ + n_);
    bool bland = false;
    long stall = 0;
    double last_objective = objective();
    for (long pivot = 0; pivot < max_pivots; ++pivot) {
      compute_duals();
      int ei = -1, ej = -1;
      if (!find_entering(bland, ei, ej)) break;
      pivot_on(ei, ej);
      const double obj = objective();
      if (obj < last_objective - 1e-15) {
        last_objective = obj;
        stall = 0;
      } else if (++stall > static_cast<long>(m_ + n_) && !bland) {
        // Degenerate plateau: switch to Bland's rule, which cannot cycle.
        bland = true;
        stall = 0;
      }
    }
  }

  Eigen::MatrixXd plan() const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m_, n_);
    for (const Arc& a : arcs_) x(a.i, a.j) = std::max(0.0, a.flow);
    return x;
  }

  Eigen::VectorXd duals_u() const { return u_; }
  Eigen::VectorXd duals_v() const { return v_; }

 private:
  void northwest_corner(Eigen::VectorXd a, Eigen::VectorXd b) {
    arcs_.reserve(m_ + n_ - 1);
    int i = 0, j = 0;
    for (int k = 0; k < m_ + n_ - 1; ++k) {
      const double t = std::min(a[i], b[j]);
      arcs_.push_back({i, j, t});
      a[i] -= t;
      b[j] -= t;
      if (k == m_ + n_ - 2) break;
      // Advance exactly one index per step; the bounds clamp absorbs the
      // one-ulp imbalance left by the normalization.
      if ((a[i] == 0.0 || j + 1 >= n_) && i + 1 < m_) {
        ++i;
      } else {
        ++j;
      }
    }
    rebuild_adjacency();
  }

  void rebuild_adjacency() {
    adj_.assign(m_ + n_, {});
    for (int k = 0; k < static_cast<int>(arcs_.size()); ++k) {
      adj_[arcs_[k].i].push_back(k);
      adj_[m_ + arcs_[k].j].push_back(k);
    }
  }

  void compute_duals() {
    // The tree fixes potentials up to one constant; pin u[0] = 0 and sweep.
    std::vector<char> seen(m_ + n_, 0);
    std::vector<int> stack = {0};
    u_[0] = 0.0;
    seen[0] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (const int k : adj_[node]) {
        const Arc& a = arcs_[k];
        const int other = (node == a.i) ? m_ + a.j : a.i;
        if (seen[other]) continue;
        seen[other] = 1;
        if (other >= m_) {
          v_[other - m_] = c_(a.i, a.j) - u_[a.i];
        } else {
          u_[other] = c_(a.i, a.j) - v_[a.j];
        }
        stack.push_back(other);
      }
    }
  }

  bool find_entering(bool bland, int& ei, int& ej) const {
    double best = -kReducedCostTol;
    ei = -1;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const double rc = c_(i, j) - u_[i] - v_[j];
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          if (bland) return true;  // first (lowest-index) improving arc
        }
      }
    }
    return ei >= 0;
  }

  // Unique tree path between the entering arc's endpoints.
  std::vector<int> tree_path(int from, int to) const {
    std::vector<int> parent_arc(m_ + n_, -1);
    std::vector<int> parent_node(m_ + n_, -1);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<int> stack = {from};
    seen[from] = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node == to) break;
      for (const int k : adj_[node]) {
        const Arc& a = arcs_[k];
        const int other = (node == a.i) ? m_ + a.j : a.i;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_arc[other] = k;
        parent_node[other] = node;
        stack.push_back(other);
      }
    }
    std::vector<int> path;
    for (int node = to; node != from; node = parent_node[node]) {
      path.push_back(parent_arc[node]);
    }
    return path;  // ordered from `to` back to `from`
  }

  void pivot_on(int ei, int ej) {
    // Cycle: entering arc (+theta), then alternating -/+ along the tree path
    // from sink ej back to source ei.
    const std::vector<int> path = tree_path(m_ + ej, ei);
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    long leave_cell = -1;
    int sign = -1;
    for (const int k : path) {
      if (sign < 0) {
        const long cell = static_cast<long>(arcs_[k].i) * n_ + arcs_[k].j;
        // Ties resolved to the lowest cell index, matching Bland's rule.
        if (arcs_[k].flow < theta ||
            (arcs_[k].flow == theta && cell < leave_cell)) {
          theta = arcs_[k].flow;
          leave = k;
          leave_cell = cell;
        }
      }
      sign = -sign;
    }
    sign = -1;
    for (const int k : path) {
      arcs_[k].flow += sign * theta;
      sign = -sign;
    }
    arcs_[leave] = {ei, ej, theta};
    rebuild_adjacency();
  }

  double objective() const {
    double total = 0.0;
    for (const Arc& a : arcs_) total += a.flow * c_(a.i, a.j);
    return total;
  }

  const Eigen::MatrixXd& c_;
  int m_, n_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  Eigen::VectorXd u_, v_;
};

}  // namespace

TransportPlan solve_transport(const Eigen::MatrixXd& costs,
                              const Eigen::VectorXd& w1,
                              const Eigen::VectorXd& w2) {
  if (costs.rows() != w1.size() || costs.cols() != w2.size()) {
    throw InvalidArgumentError("solve_transport: cost matrix shape mismatch");
  }
  if (w1.size() == 0 || w2.size() == 0) {
    throw InvalidArgumentError("solve_transport: empty weight vector");
  }
  for (Eigen::Index i = 0; i < w1.size(); ++i) {
    if (w1[i] < 0.0) throw InvalidArgumentError("solve_transport: negative weight");
  }
  for (Eigen::Index j = 0; j < w2.size(); ++j) {
    if (w2[j] < 0.0) throw InvalidArgumentError("solve_transport: negative weight");
  }
  const double s1 = w1.sum();
  const double s2 = w2.sum();
  if (std::abs(s1 - 1.0) > kBalanceTol || std::abs(s2 - 1.0) > kBalanceTol) {
    throw InvalidArgumentError(
        "solve_transport: weights must sum to 1 within 1e-6");
  }

  // Rescale to exact balance and drop zero-mass points.
  std::vector<int> rows, cols;
  for (Eigen::Index i = 0; i < w1.size(); ++i) {
    if (w1[i] > 0.0) rows.push_back(static_cast<int>(i));
  }
  for (Eigen::Index j = 0; j < w2.size(); ++j) {
    if (w2[j] > 0.0) cols.push_back(static_cast<int>(j));
  }
  Eigen::VectorXd a(rows.size()), b(cols.size());
  Eigen::MatrixXd c(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a[static_cast<Eigen::Index>(i)] = w1[rows[i]] / s1;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          costs(rows[i], cols[j]);
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    b[static_cast<Eigen::Index>(j)] = w2[cols[j]] / s2;
  }

  TransportSimplex simplex(c, a, b);
  const Eigen::MatrixXd x = simplex.plan();
  const Eigen::VectorXd u = simplex.duals_u();
  const Eigen::VectorXd v = simplex.duals_v();

  TransportPlan result;
  result.plan = Eigen::MatrixXd::Zero(w1.size(), w2.size());
  result.u = Eigen::VectorXd::Zero(w1.size());
  result.v = Eigen::VectorXd::Zero(w2.size());
  double cost = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    result.u[rows[i]] = u[static_cast<Eigen::Index>(i)];
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double f = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      result.plan(rows[i], cols[j]) = f;
      cost += f * costs(rows[i], cols[j]);
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    result.v[cols[j]] = v[static_cast<Eigen::Index>(j)];
  }
  // Feasible potentials for pruned points so the certificate covers the
  // full matrix.
  for (Eigen::Index i = 0; i < w1.size(); ++i) {
    if (w1[i] == 0.0) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cols.size(); ++j) {
        best = std::min(best, costs(i, cols[j]) - result.v[cols[j]]);
      }
      result.u[i] = best;
    }
  }
  for (Eigen::Index j = 0; j < w2.size(); ++j) {
    if (w2[j] == 0.0) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        best = std::min(best, costs(rows[i], j) - result.u[rows[i]]);
      }
      result.v[j] = best;
    }
  }
  result.cost = cost;
  return result;
}

double transport_certificate_gap(const TransportPlan& plan,
                                 const Eigen::MatrixXd& costs) {
  double gap = 0.0;
  for (Eigen::Index i = 0; i < costs.rows(); ++i) {
    for (Eigen::Index j = 0; j < costs.cols(); ++j) {
      const double slack = costs(i, j) - plan.u[i] - plan.v[j];
      gap = std::max(gap, -slack);  // dual feasibility
      if (plan.plan(i, j) > 1e-12) {
        gap = std::max(gap, std::abs(slack));  // complementary slackness
      }
    }
  }
  return gap;
}

}  // namespace odf
