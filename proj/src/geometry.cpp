#include "graspqd/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace graspqd {

Vec3 closest_point_on_triangle(const Vec3& p, const Triangle& t) {
  const Vec3 ab = t.b - t.a;
  const Vec3 ac = t.c - t.a;
  const Vec3 ap = p - t.a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return t.a;

  const Vec3 bp = p - t.b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return t.b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return t.a + v * ab;
  }

  const Vec3 cp = p - t.c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return t.c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return t.a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return t.b + w * (t.c - t.b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return t.a + ab * v + ac * w;
}

double closest_segment_segment(const Vec3& p1, const Vec3& q1, const Vec3& p2,
                               const Vec3& q2, Vec3& c1, Vec3& c2) {
  constexpr double kEps = 1e-18;
  const Vec3 d1 = q1 - p1;
  const Vec3 d2 = q2 - p2;
  const Vec3 r = p1 - p2;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  if (a <= kEps && e <= kEps) {
    c1 = p1;
    c2 = p2;
    return (c1 - c2).squaredNorm();
  }
  if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom != 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  c1 = p1 + d1 * s;
  c2 = p2 + d2 * t;
  return (c1 - c2).squaredNorm();
}

double ray_triangle(const Vec3& origin, const Vec3& dir, const Triangle& t) {
  const Vec3 e1 = t.b - t.a;
  const Vec3 e2 = t.c - t.a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-300) return std::nan("");
  const double inv = 1.0 / det;
  const Vec3 tvec = origin - t.a;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return std::nan("");
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nan("");
  return e2.dot(qvec) * inv;
}

SegmentTriangleResult segment_triangle_closest(const Vec3& p0, const Vec3& p1,
                                               const Triangle& t) {
  const Vec3 d = p1 - p0;
  const double hit = ray_triangle(p0, d, t);
  if (!std::isnan(hit) && hit >= 0.0 && hit <= 1.0) {
    const Vec3 p = p0 + hit * d;
    return {0.0, p, p};
  }

  SegmentTriangleResult best;
  Vec3 q = closest_point_on_triangle(p0, t);
  best = {(q - p0).norm(), p0, q};
  q = closest_point_on_triangle(p1, t);
  double dist = (q - p1).norm();
  if (dist < best.distance) best = {dist, p1, q};

  const std::array<std::pair<const Vec3*, const Vec3*>, 3> edges = {
      {{&t.a, &t.b}, {&t.b, &t.c}, {&t.c, &t.a}}};
  for (const auto& [ea, eb] : edges) {
    Vec3 cs, ct;
    dist = std::sqrt(closest_segment_segment(p0, p1, *ea, *eb, cs, ct));
    if (dist < best.distance) best = {dist, cs, ct};
  }
  return best;
}

namespace {

bool separated_on_axis(const Vec3& axis, const Vec3& v0, const Vec3& v1,
                       const Vec3& v2, const Vec3& h) {
  if (axis.squaredNorm() < 1e-24) return false;
  const double p0 = axis.dot(v0);
  const double p1 = axis.dot(v1);
  const double p2 = axis.dot(v2);
  const double r = h.x() * std::abs(axis.x()) + h.y() * std::abs(axis.y()) +
                   h.z() * std::abs(axis.z());
  return std::max({p0, p1, p2}) < -r || std::min({p0, p1, p2}) > r;
}

}  // namespace

bool triangle_intersects_box(const Triangle& t, const Vec3& center,
                             const Mat3& axes, const Vec3& h) {
  const Vec3 v0 = axes.transpose() * (t.a - center);
  const Vec3 v1 = axes.transpose() * (t.b - center);
  const Vec3 v2 = axes.transpose() * (t.c - center);

  for (int i = 0; i < 3; ++i) {
    if (std::max({v0[i], v1[i], v2[i]}) < -h[i] ||
        std::min({v0[i], v1[i], v2[i]}) > h[i]) {
      return false;
    }
  }
  const Vec3 f0 = v1 - v0;
  const Vec3 f1 = v2 - v1;
  const Vec3 f2 = v0 - v2;
  if (separated_on_axis(f0.cross(f1), v0, v1, v2, h)) return false;
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i);
    if (separated_on_axis(e.cross(f0), v0, v1, v2, h)) return false;
    if (separated_on_axis(e.cross(f1), v0, v1, v2, h)) return false;
    if (separated_on_axis(e.cross(f2), v0, v1, v2, h)) return false;
  }
  return true;
}

Vec3 any_orthogonal(const Vec3& v) {
  Eigen::Index axis;
  v.cwiseAbs().minCoeff(&axis);
  return v.cross(Vec3::Unit(axis)).normalized();
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace graspqd
