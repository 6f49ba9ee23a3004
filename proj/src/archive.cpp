#include "graspqd/archive.hpp"

#include <cmath>
#include <stdexcept>

namespace graspqd {

BehaviorGrid::BehaviorGrid(const Aabb& bounds, double cell_size)
    : bounds_(bounds), cell_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  if (bounds.empty()) throw std::invalid_argument("behavior bounds are empty");
  for (int i = 0; i < 3; ++i) {
    dims_[i] = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(bounds.extent()[i] / cell_size - 1e-9)));
  }
}

BehaviorGrid BehaviorGrid::for_object(const TriangleMesh& mesh, const GripperSpec& spec,
                                      double cell_size) {
  return BehaviorGrid(mesh.bounding_box().inflated(spec.max_approach_distance()), cell_size);
}

std::optional<std::int64_t> BehaviorGrid::cell_of(const Vec3& b) const {
  if (!b.allFinite() || !bounds_.contains(b)) return std::nullopt;
  std::int64_t idx[3];
  for (int i = 0; i < 3; ++i) {
    const double u = (b[i] - bounds_.lo[i]) / cell_;
    idx[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(u)) - 1, 0,
                                      dims_[i] - 1);
  }
  return (idx[2] * dims_[1] + idx[1]) * dims_[0] + idx[0];
}

Aabb BehaviorGrid::cell_bounds(std::int64_t cell) const {
  const std::int64_t ix = cell % dims_[0];
  const std::int64_t iy = (cell / dims_[0]) % dims_[1];
  const std::int64_t iz = cell / (dims_[0] * dims_[1]);
  const Vec3 lo = bounds_.lo + cell_ * Vec3(ix, iy, iz);
  return {lo, lo + Vec3::Constant(cell_)};
}

InsertOutcome BehaviorGrid::insert(const Elite& candidate) {
  const auto cell = cell_of(candidate.behavior);
  if (!cell) return InsertOutcome::kRejected;
  auto [it, inserted] = elites_.try_emplace(*cell, candidate);
  if (inserted) return InsertOutcome::kInserted;
  if (candidate.fitness > it->second.fitness) {
    it->second = candidate;
    return InsertOutcome::kReplaced;
  }
  return InsertOutcome::kRejected;
}

}  // namespace graspqd
