#pragma once

#include "graspqd/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace graspqd {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RayHit {
  Vec3 point;
  int triangle_id;
  Vec3 normal;
  double t;
};

struct Box {
  Vec3 center = Vec3::Zero();
  Mat3 axes = Mat3::Identity();  // columns are the box axes
  Vec3 half_extents = Vec3::Zero();
};

struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.0;
};

using ConvexShape = std::variant<Box, Capsule>;

struct MassProperties {
  double mass;
  Vec3 center_of_mass;
  Mat3 inertia;  // about the center of mass
};

struct ClosestHit {
  double distance = std::numeric_limits<double>::infinity();
  Vec3 on_mesh = Vec3::Zero();
  Vec3 on_query = Vec3::Zero();
  int triangle_id = -1;
};

class Bvh;

/// Watertight triangle mesh with outward normals and an acceleration tree.
/// Immutable once built; all queries are const and thread-safe.
class TriangleMesh {
 public:
  /// Validates the input, drops triangles of area <= 1e-12 and flips every
  /// winding when the signed volume is negative.
  static TriangleMesh from_triangles(std::vector<Vec3> vertices,
                                     std::vector<std::array<int, 3>> triangles);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<double>& triangle_areas() const { return areas_; }
  const Aabb& bounding_box() const { return bbox_; }
  double area() const { return area_; }
  double volume() const { return volume_; }
  std::size_t size() const { return triangles_.size(); }
  Triangle triangle(int i) const;
  std::uint64_t content_hash() const { return hash_; }

  /// Every intersection with t > 1e-9, sorted by distance. Coincident hits
  /// on a shared edge are reported once.
  std::vector<RayHit> ray_cast(const Vec3& origin, const Vec3& direction) const;
  bool contains(const Vec3& p) const;
  bool intersects(const ConvexShape& shape) const;
  ClosestHit closest_to_segment(const Vec3& a, const Vec3& b,
                                double max_distance = std::numeric_limits<double>::infinity()) const;
  ClosestHit closest_to_point(const Vec3& p) const { return closest_to_segment(p, p); }
  MassProperties mass_properties(double density) const;

 private:
  TriangleMesh() = default;

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Vec3> normals_;
  std::vector<double> areas_;
  Aabb bbox_;
  double area_ = 0.0;
  double volume_ = 0.0;
  std::uint64_t hash_ = 0;
  std::shared_ptr<const Bvh> bvh_;
};

/// Reads OBJ or ASCII/binary STL; vertices are multiplied by `scale`.
TriangleMesh load_mesh(const std::filesystem::path& path, double scale = 1.0);

/// Resolves "builtin:<name>" or a file path.
TriangleMesh load_mesh_source(const std::string& source, double scale = 1.0);

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

inline std::vector<RayHit> ray_cast(const TriangleMesh& mesh, const Vec3& origin,
                                    const Vec3& direction) {
  return mesh.ray_cast(origin, direction);
}

inline bool intersects_convex(const TriangleMesh& mesh, const ConvexShape& shape) {
  return mesh.intersects(shape);
}

// Procedural test objects.
TriangleMesh make_icosphere(double radius, int subdivisions);
TriangleMesh make_box(const Vec3& size);
/// Closed surface of revolution from an (r, z) profile running from the axis
/// back to the axis.
TriangleMesh make_revolved(const std::vector<Eigen::Vector2d>& profile, int segments);
TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments,
                        int minor_segments);
/// Open-top cup with a ring handle detached from the wall by a small gap.
TriangleMesh make_mug();
/// Shallow thin-walled bowl.
TriangleMesh make_bowl();
TriangleMesh merge(const std::vector<TriangleMesh>& parts,
                   const std::vector<Eigen::Isometry3d>& poses);

}  // namespace graspqd
