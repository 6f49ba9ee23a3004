#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace graspqd::test {

/// Phase-one simplex (dense tableau, Bland's rule) for {x >= 0 : A x = b}.
/// Returns the minimal total artificial slack, which is zero exactly when
/// the system is feasible. Independent of the active-set solver it checks.
inline double phase_one_infeasibility(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index m = a.rows(), n = a.cols();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  Eigen::VectorXi basis(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * a.row(i);
    t(i, n + i) = 1.0;
    t(i, n + m) = sign * b[i];
    basis[i] = static_cast<int>(n + i);
  }
  // Reduced costs of the artificial-sum objective.
  for (Eigen::Index i = 0; i < m; ++i) {
    t.row(m).head(n) -= t.row(i).head(n);
    t(m, n + m) -= t(i, n + m);
  }
  const double eps = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        const double ratio = t(i, n + m) / t(i, enter);
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) break;  // unbounded cannot happen for a bounded-below objective
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[leave] = static_cast<int>(enter);
  }
  return std::max(0.0, -t(m, n + m));
}

}  // namespace graspqd::test
