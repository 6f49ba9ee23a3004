#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <limits>

namespace graspqd {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using Wrench = Eigen::Matrix<double, 6, 1>;

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool empty() const { return (hi.array() < lo.array()).any(); }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return extent().norm(); }
  Aabb inflated(double r) const { return {lo.array() - r, hi.array() + r}; }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= lo.array() - tol).all() &&
           (p.array() <= hi.array() + tol).all();
  }
  bool overlaps(const Aabb& b) const {
    return (lo.array() <= b.hi.array()).all() &&
           (b.lo.array() <= hi.array()).all();
  }
  // Lower bound of the distance between any two points of the boxes.
  double distance_to(const Aabb& b) const {
    Vec3 gap = (b.lo - hi).cwiseMax(lo - b.hi).cwiseMax(Vec3::Zero());
    return gap.norm();
  }
};

struct Triangle {
  Vec3 a, b, c;
};

// Closest point on a triangle to p (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& p, const Triangle& t);

struct SegmentTriangleResult {
  double distance;
  Vec3 on_segment;
  Vec3 on_triangle;
};

SegmentTriangleResult segment_triangle_closest(const Vec3& p0, const Vec3& p1,
                                               const Triangle& t);

// Closest points between segments [p1,q1] and [p2,q2]; returns squared distance.
double closest_segment_segment(const Vec3& p1, const Vec3& q1, const Vec3& p2,
                               const Vec3& q2, Vec3& c1, Vec3& c2);

// Möller-Trumbore. Returns ray parameter or NaN when the ray misses.
double ray_triangle(const Vec3& origin, const Vec3& dir, const Triangle& t);

// Separating-axis test between a triangle and an oriented box.
bool triangle_intersects_box(const Triangle& t, const Vec3& center,
                             const Mat3& axes, const Vec3& half_extents);

// Any unit vector orthogonal to v, chosen deterministically.
Vec3 any_orthogonal(const Vec3& v);

double angle_between(const Vec3& a, const Vec3& b);

}  // namespace graspqd
