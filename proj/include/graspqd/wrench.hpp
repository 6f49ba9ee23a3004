#pragma once

#include "graspqd/geometry.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace graspqd {

/// A point contact on the object. `normal` is the outward object normal, so
/// the finger pushes along -normal.
struct Contact {
  Vec3 point;
  Vec3 normal;
  int finger = -1;
};

struct WrenchOptions {
  Vec3 reference = Vec3::Zero();  // torques are taken about this point
  /// Soft-finger torsional coefficient (m): |moment about normal| <= k * f_n.
  double torsional_friction = 0.0;
  double tolerance = 1e-8;
};

/// Columns are the edge wrenches of every linearized friction cone.
Eigen::Matrix<double, 6, Eigen::Dynamic> contact_wrench_generators(
    std::span<const Contact> contacts, double mu, int edge_count, const WrenchOptions& options);

struct NnlsResult {
  Eigen::VectorXd x;
  double residual;
  bool converged;
};

/// Lawson-Hanson active-set solver for min ||A x - b||, x >= 0.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 0);

/// True iff the contacts can balance `disturbance` (an external wrench on
/// the object) with nonnegative edge forces, i.e. -disturbance lies in the
/// contact wrench cone. Solver failure counts as not resisting.
bool wrench_resists(std::span<const Contact> contacts, const Wrench& disturbance, double mu,
                    int edge_count, const WrenchOptions& options = {});

}  // namespace graspqd
