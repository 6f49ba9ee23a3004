#include "graspqd/wrench.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace graspqd {

Eigen::Matrix<double, 6, Eigen::Dynamic> contact_wrench_generators(
    std::span<const Contact> contacts, double mu, int edge_count, const WrenchOptions& options) {
  const bool torsion = options.torsional_friction > 0.0;
  const int per_contact = edge_count * (torsion ? 2 : 1);
  Eigen::Matrix<double, 6, Eigen::Dynamic> g(6, per_contact * contacts.size());
  int col = 0;
  for (const auto& c : contacts) {
    const Vec3 n = c.normal.normalized();
    const Vec3 t1 = any_orthogonal(n);
    const Vec3 t2 = n.cross(t1);
    const Vec3 arm = c.point - options.reference;
    for (int e = 0; e < edge_count; ++e) {
      const double a = 2.0 * M_PI * e / edge_count;
      const Vec3 f = -n + mu * (std::cos(a) * t1 + std::sin(a) * t2);
      const Vec3 tau = arm.cross(f);
      if (!torsion) {
        g.col(col++) << f, tau;
        continue;
      }
      for (double sign : {1.0, -1.0}) {
        g.col(col++) << f, tau + sign * options.torsional_friction * n;
      }
    }
  }
  return g;
}

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations) {
  const Eigen::Index n = a.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max(1.0, b.norm());

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[j]) idx.push_back(j);
    }
    Eigen::MatrixXd ap(a.rows(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(k) = a.col(idx[k]);
    const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
    z.setZero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[k];
  };

  int iterations = 0;
  Eigen::VectorXd w = a.transpose() * (b - a * x);
  while (true) {
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;

    Eigen::VectorXd z;
    while (true) {
      if (++iterations > max_iterations) {
        return {x, (a * x - b).norm(), false};
      }
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) feasible = false;
      }
      if (feasible) break;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x[j] <= 1e-15) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
    x = z;
    w = a.transpose() * (b - a * x);
  }
  return {x, (a * x - b).norm(), true};
}

bool wrench_resists(std::span<const Contact> contacts, const Wrench& disturbance, double mu,
                    int edge_count, const WrenchOptions& options) {
  if (contacts.empty()) return disturbance.norm() <= options.tolerance;
  Eigen::MatrixXd g = contact_wrench_generators(contacts, mu, edge_count, options);
  // Torque rows are rescaled by a contact length so both halves of the
  // wrench are commensurate; a positive row scaling preserves the cone test.
  double length = 0.0;
  for (const auto& c : contacts) length = std::max(length, (c.point - options.reference).norm());
  length = std::max(length, 1e-3);
  Wrench target = -disturbance;
  g.bottomRows(3) /= length;
  target.tail<3>() /= length;
  const double scale = std::max(1.0, target.norm());
  const NnlsResult r = nnls(g, target);
  if (!r.converged || !r.x.allFinite()) return false;
  return r.residual <= options.tolerance * scale;
}

}  // namespace graspqd
