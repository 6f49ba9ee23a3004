#pragma once

#include "graspqd/mesh.hpp"

#include <cstdint>
#include <vector>

namespace graspqd {

struct ContactSample {
  Vec3 position;
  Vec3 normal;
  int triangle_id;
};

/// The precomputed contact set: area-uniform surface samples with a uniform
/// grid index (cell size = bounding-box diagonal / 32) for nearest queries.
class SurfaceSampleSet {
 public:
  explicit SurfaceSampleSet(std::vector<ContactSample> samples);

  const std::vector<ContactSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const ContactSample& operator[](std::size_t i) const { return samples_[i]; }

  /// Index of the sample closest to `query`; ties go to the lowest index.
  std::size_t nearest_index(const Vec3& query) const;
  const ContactSample& nearest(const Vec3& query) const {
    return samples_[nearest_index(query)];
  }

 private:
  std::vector<ContactSample> samples_;
  Vec3 origin_;
  double cell_ = 1.0;
  Eigen::Vector3i dims_;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> cell_items_;
};

inline constexpr int kDefaultSurfaceSamples = 4096;

SurfaceSampleSet sample_surface(const TriangleMesh& mesh, int n_samples, std::uint64_t seed);

inline const ContactSample& nearest_contact(const SurfaceSampleSet& sset, const Vec3& query) {
  return sset.nearest(query);
}

}  // namespace graspqd
