#include "graspqd/surface_samples.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace graspqd {

SurfaceSampleSet::SurfaceSampleSet(std::vector<ContactSample> samples)
    : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("surface sample set must be nonempty");
  Aabb box;
  for (const auto& s : samples_) box.extend(s.position);
  const double diag = box.diagonal();
  cell_ = diag > 0.0 ? diag / 32.0 : 1.0;
  origin_ = box.lo;
  for (int i = 0; i < 3; ++i) {
    dims_[i] = std::max(1, static_cast<int>(std::floor(box.extent()[i] / cell_)) + 1);
  }
  const std::size_t ncells = static_cast<std::size_t>(dims_.x()) * dims_.y() * dims_.z();
  std::vector<std::uint32_t> cell_of(samples_.size());
  std::vector<std::uint32_t> counts(ncells + 1, 0);
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    Eigen::Vector3i c;
    for (int k = 0; k < 3; ++k) {
      c[k] = std::clamp(static_cast<int>(std::floor((samples_[i].position[k] - origin_[k]) / cell_)),
                        0, dims_[k] - 1);
    }
    cell_of[i] = static_cast<std::uint32_t>((c.z() * dims_.y() + c.y()) * dims_.x() + c.x());
    ++counts[cell_of[i] + 1];
  }
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  cell_start_ = counts;
  cell_items_.resize(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    cell_items_[counts[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }
}

std::size_t SurfaceSampleSet::nearest_index(const Vec3& query) const {
  Eigen::Vector3i c0;
  for (int k = 0; k < 3; ++k) {
    const double f = std::floor((query[k] - origin_[k]) / cell_);
    c0[k] = static_cast<int>(std::clamp(f, 0.0, static_cast<double>(dims_[k] - 1)));
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  const int max_ring = dims_.maxCoeff();
  auto visit = [&](int x, int y, int z) {
    const std::size_t cell = (static_cast<std::size_t>(z) * dims_.y() + y) * dims_.x() + x;
    for (std::uint32_t j = cell_start_[cell]; j < cell_start_[cell + 1]; ++j) {
      const std::uint32_t idx = cell_items_[j];
      const double d = (samples_[idx].position - query).squaredNorm();
      if (d < best || (d == best && idx < best_idx)) {
        best = d;
        best_idx = idx;
      }
    }
  };
  for (int r = 0; r <= max_ring; ++r) {
    const int x0 = std::max(0, c0.x() - r), x1 = std::min(dims_.x() - 1, c0.x() + r);
    const int y0 = std::max(0, c0.y() - r), y1 = std::min(dims_.y() - 1, c0.y() + r);
    const int z0 = std::max(0, c0.z() - r), z1 = std::min(dims_.z() - 1, c0.z() + r);
    for (int z = z0; z <= z1; ++z) {
      for (int y = y0; y <= y1; ++y) {
        const bool face = std::abs(z - c0.z()) == r || std::abs(y - c0.y()) == r;
        if (face) {
          for (int x = x0; x <= x1; ++x) visit(x, y, z);
        } else {
          if (c0.x() - r >= 0) visit(c0.x() - r, y, z);
          if (r > 0 && c0.x() + r < dims_.x()) visit(c0.x() + r, y, z);
        }
      }
    }
    // Cells beyond ring r are at least r * cell away along some axis.
    const double reach = r * cell_;
    if (best < reach * reach) break;
  }
  return best_idx;
}

SurfaceSampleSet sample_surface(const TriangleMesh& mesh, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  std::vector<double> cdf(mesh.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    acc += mesh.triangle_areas()[i];
    cdf[i] = acc;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ContactSample> samples;
  samples.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double u = unit(rng) * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int tri = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const Triangle t = mesh.triangle(tri);
    const Vec3 p = (1.0 - r1) * t.a + r1 * (1.0 - r2) * t.b + r1 * r2 * t.c;
    samples.push_back({p, mesh.normals()[tri], tri});
  }
  return SurfaceSampleSet(std::move(samples));
}

}  // namespace graspqd
