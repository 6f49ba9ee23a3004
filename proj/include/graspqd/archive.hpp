#pragma once

#include "graspqd/projection.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace graspqd {

struct Elite {
  Genome genome;
  double fitness = 0.0;
  Vec3 behavior = Vec3::Zero();
  std::int64_t eval_index = -1;
};

enum class InsertOutcome { kInserted, kReplaced, kRejected };

/// Axis-aligned grid over the behavior space holding one elite per cell.
/// Cells are closed at their upper face: a behavior exactly on a boundary
/// belongs to the lower-index cell.
class BehaviorGrid {
 public:
  BehaviorGrid(const Aabb& bounds, double cell_size);
  /// Object bounding box inflated by the gripper's maximum approach distance.
  static BehaviorGrid for_object(const TriangleMesh& mesh, const GripperSpec& spec,
                                 double cell_size = 0.01);

  std::optional<std::int64_t> cell_of(const Vec3& behavior) const;
  Aabb cell_bounds(std::int64_t cell) const;
  InsertOutcome insert(const Elite& candidate);

  /// Elites keyed by cell, iterated in cell order.
  const std::map<std::int64_t, Elite>& elites() const { return elites_; }
  std::size_t size() const { return elites_.size(); }
  const Aabb& bounds() const { return bounds_; }
  double cell_size() const { return cell_; }
  const Eigen::Matrix<std::int64_t, 3, 1>& dims() const { return dims_; }

 private:
  Aabb bounds_;
  double cell_;
  Eigen::Matrix<std::int64_t, 3, 1> dims_;
  std::map<std::int64_t, Elite> elites_;
};

/// Annealed per-cell acceptance thresholds (CMA-MAE). A cell starts at
/// `f_min`; an offer f above the threshold t moves it to (1 - alpha) t + alpha f.
class ThresholdMap {
 public:
  ThresholdMap(double f_min, double learning_rate) : f_min_(f_min), alpha_(learning_rate) {}

  double threshold(std::int64_t cell) const {
    const auto it = thresholds_.find(cell);
    return it == thresholds_.end() ? f_min_ : it->second;
  }
  /// Returns f - t measured before the update.
  double offer(std::int64_t cell, double fitness) {
    auto [it, fresh] = thresholds_.try_emplace(cell, f_min_);
    const double delta = fitness - it->second;
    if (delta > 0.0) it->second = (1.0 - alpha_) * it->second + alpha_ * fitness;
    return delta;
  }

 private:
  double f_min_;
  double alpha_;
  std::map<std::int64_t, double> thresholds_;
};

struct OutcomeRecord {
  std::int64_t eval_index = 0;
  GraspPose pose;
  double fitness = 0.0;
  Vec3 behavior = Vec3::Zero();
  Genome genome;
  std::optional<double> nu;
};

/// Grow-only record of every successful grasp, in evaluation order.
struct OutcomeArchive {
  Prior prior = Prior::kContact;
  std::int64_t total_evaluations = 0;
  std::vector<OutcomeRecord> records;
};

}  // namespace graspqd
