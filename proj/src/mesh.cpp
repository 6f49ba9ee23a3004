#include "graspqd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace graspqd {

class Bvh {
 public:
  struct Node {
    Aabb box;
    int left = -1;
    int right = -1;
    int start = 0;
    int count = 0;
    bool leaf() const { return left < 0; }
  };

  explicit Bvh(const std::vector<Triangle>& tris) : tris_(tris) {
    order_.resize(tris.size());
    std::iota(order_.begin(), order_.end(), 0);
    centroids_.reserve(tris.size());
    for (const auto& t : tris) centroids_.push_back((t.a + t.b + t.c) / 3.0);
    nodes_.reserve(2 * tris.size() / kLeafSize + 2);
    build(0, static_cast<int>(tris.size()));
    centroids_.clear();
  }

  template <typename Prune, typename Leaf>
  void traverse(Prune&& prune, Leaf&& leaf) const {
    if (nodes_.empty()) return;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& n = nodes_[stack[--top]];
      if (prune(n.box)) continue;
      if (n.leaf()) {
        for (int i = n.start; i < n.start + n.count; ++i) {
          if (leaf(order_[i], tris_[order_[i]])) return;
        }
      } else {
        stack[top++] = n.right;
        stack[top++] = n.left;
      }
    }
  }

  // Best-first variant for distance queries: visits the nearer child first.
  template <typename Bound, typename Leaf>
  void traverse_nearest(Bound&& bound, double& best, Leaf&& leaf) const {
    if (nodes_.empty()) return;
    std::pair<double, int> stack[128];
    int top = 0;
    stack[top++] = {bound(nodes_[0].box), 0};
    while (top > 0) {
      const auto [lb, idx] = stack[--top];
      if (lb >= best) continue;
      const Node& n = nodes_[idx];
      if (n.leaf()) {
        for (int i = n.start; i < n.start + n.count; ++i) {
          leaf(order_[i], tris_[order_[i]]);
        }
        continue;
      }
      double bl = bound(nodes_[n.left].box);
      double br = bound(nodes_[n.right].box);
      if (bl <= br) {
        if (br < best) stack[top++] = {br, n.right};
        if (bl < best) stack[top++] = {bl, n.left};
      } else {
        if (bl < best) stack[top++] = {bl, n.left};
        if (br < best) stack[top++] = {br, n.right};
      }
    }
  }

 private:
  static constexpr int kLeafSize = 4;

  int build(int start, int end) {
    const int idx = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, cbox;
    for (int i = start; i < end; ++i) {
      const Triangle& t = tris_[order_[i]];
      box.extend(t.a);
      box.extend(t.b);
      box.extend(t.c);
      cbox.extend(centroids_[order_[i]]);
    }
    nodes_[idx].box = box;
    if (end - start <= kLeafSize) {
      nodes_[idx].start = start;
      nodes_[idx].count = end - start;
      return idx;
    }
    Eigen::Index axis;
    cbox.extent().maxCoeff(&axis);
    const int mid = (start + end) / 2;
    std::nth_element(order_.begin() + start, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                       const double ca = centroids_[a][axis];
                       const double cb = centroids_[b][axis];
                       return ca < cb || (ca == cb && a < b);
                     });
    const int left = build(start, mid);
    const int right = build(mid, end);
    nodes_[idx].left = left;
    nodes_[idx].right = right;
    return idx;
  }

  std::vector<Triangle> tris_;
  std::vector<int> order_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

bool ray_hits_box(const Vec3& origin, const Vec3& inv_dir, const Aabb& box) {
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    double t1 = (box.lo[i] - origin[i]) * inv_dir[i];
    double t2 = (box.hi[i] - origin[i]) * inv_dir[i];
    if (std::isnan(t1) || std::isnan(t2)) {
      // Ray parallel to the slab and lying on its boundary.
      if (origin[i] < box.lo[i] || origin[i] > box.hi[i]) return false;
      continue;
    }
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return false;
  }
  return true;
}

}  // namespace

TriangleMesh TriangleMesh::from_triangles(std::vector<Vec3> vertices,
                                          std::vector<std::array<int, 3>> triangles) {
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw MeshError("mesh has non-finite vertex coordinates");
  }
  const int nv = static_cast<int>(vertices.size());
  std::vector<std::array<int, 3>> kept;
  kept.reserve(triangles.size());
  for (const auto& t : triangles) {
    for (int i : t) {
      if (i < 0 || i >= nv) throw MeshError("triangle index out of range");
    }
    const double a = 0.5 * (vertices[t[1]] - vertices[t[0]])
                               .cross(vertices[t[2]] - vertices[t[0]])
                               .norm();
    if (a > 1e-12) kept.push_back(t);
  }
  if (kept.empty()) throw MeshError("degenerate mesh: no triangle with nonzero area");

  double signed_volume = 0.0;
  for (const auto& t : kept) {
    signed_volume += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]])) / 6.0;
  }
  if (signed_volume < 0.0) {
    for (auto& t : kept) std::swap(t[1], t[2]);
    signed_volume = -signed_volume;
  }

  TriangleMesh m;
  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(kept);
  m.volume_ = signed_volume;
  std::vector<Triangle> tris;
  tris.reserve(m.triangles_.size());
  m.hash_ = 14695981039346656037ULL;
  for (const auto& t : m.triangles_) {
    const Triangle tri{m.vertices_[t[0]], m.vertices_[t[1]], m.vertices_[t[2]]};
    const Vec3 c = (tri.b - tri.a).cross(tri.c - tri.a);
    const double area = 0.5 * c.norm();
    m.normals_.push_back(c.normalized());
    m.areas_.push_back(area);
    m.area_ += area;
    m.bbox_.extend(tri.a);
    m.bbox_.extend(tri.b);
    m.bbox_.extend(tri.c);
    for (const Vec3* v : {&tri.a, &tri.b, &tri.c}) {
      m.hash_ = fnv1a(m.hash_, v->data(), 3 * sizeof(double));
    }
    tris.push_back(tri);
  }
  m.bvh_ = std::make_shared<const Bvh>(tris);
  return m;
}

Triangle TriangleMesh::triangle(int i) const {
  const auto& t = triangles_[i];
  return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
}

std::vector<RayHit> TriangleMesh::ray_cast(const Vec3& origin, const Vec3& direction) const {
  std::vector<RayHit> hits;
  const Vec3 inv = direction.cwiseInverse();
  bvh_->traverse([&](const Aabb& box) { return !ray_hits_box(origin, inv, box); },
                 [&](int id, const Triangle& tri) {
                   const double t = ray_triangle(origin, direction, tri);
                   if (!std::isnan(t) && t > 1e-9) {
                     hits.push_back({origin + t * direction, id, normals_[id], t});
                   }
                   return false;
                 });
  std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) {
    return a.t < b.t || (a.t == b.t && a.triangle_id < b.triangle_id);
  });
  std::vector<RayHit> out;
  out.reserve(hits.size());
  for (const auto& h : hits) {
    if (!out.empty()) {
      const RayHit& prev = out.back();
      const bool same_side =
          (prev.normal.dot(direction) > 0.0) == (h.normal.dot(direction) > 0.0);
      if (same_side && std::abs(h.t - prev.t) <= 1e-10 * (1.0 + h.t)) continue;
    }
    out.push_back(h);
  }
  return out;
}

bool TriangleMesh::contains(const Vec3& p) const {
  if (!bbox_.contains(p)) return false;
  static const std::array<Vec3, 3> dirs = {
      Vec3(0.5377, 0.6711, 0.5102).normalized(),
      Vec3(-0.7213, 0.2417, 0.6491).normalized(),
      Vec3(0.1931, -0.8829, -0.4280).normalized()};
  int inside = 0;
  for (const auto& d : dirs) {
    if (ray_cast(p, d).size() % 2 == 1) ++inside;
  }
  return inside >= 2;
}

bool TriangleMesh::intersects(const ConvexShape& shape) const {
  if (const auto* box = std::get_if<Box>(&shape)) {
    const Vec3 r = box->axes.cwiseAbs() * box->half_extents;
    const Aabb query{box->center - r, box->center + r};
    bool hit = false;
    bvh_->traverse([&](const Aabb& b) { return !b.overlaps(query); },
                   [&](int, const Triangle& tri) {
                     hit = triangle_intersects_box(tri, box->center, box->axes,
                                                   box->half_extents);
                     return hit;
                   });
    return hit || contains(box->center);
  }
  const auto& cap = std::get<Capsule>(shape);
  const ClosestHit c = closest_to_segment(cap.a, cap.b, cap.radius);
  if (c.distance <= cap.radius) return true;
  return contains(0.5 * (cap.a + cap.b));
}

ClosestHit TriangleMesh::closest_to_segment(const Vec3& a, const Vec3& b,
                                            double max_distance) const {
  Aabb seg;
  seg.extend(a);
  seg.extend(b);
  ClosestHit best;
  double bound = max_distance == std::numeric_limits<double>::infinity()
                     ? max_distance
                     : std::nextafter(max_distance, max_distance + 1.0);
  const Vec3 ab = b - a;
  const double ab2 = ab.squaredNorm();
  // Lower bound on the box-segment distance: the larger of the AABB gap and
  // the center-to-segment distance minus the box's circumradius.
  auto lower_bound = [&](const Aabb& box) {
    const Vec3 c = box.center();
    const double t = ab2 > 0.0 ? std::clamp((c - a).dot(ab) / ab2, 0.0, 1.0) : 0.0;
    const double sphere = (a + t * ab - c).norm() - 0.5 * box.diagonal();
    return std::max(box.distance_to(seg), sphere);
  };
  bvh_->traverse_nearest(
      lower_bound, bound,
      [&](int id, const Triangle& tri) {
        const auto r = segment_triangle_closest(a, b, tri);
        if (r.distance < bound) {
          best = {r.distance, r.on_triangle, r.on_segment, id};
          bound = r.distance;
        }
      });
  return best;
}

MassProperties TriangleMesh::mass_properties(double density) const {
  Mat3 canonical;
  canonical << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  canonical /= 120.0;
  Mat3 cov = Mat3::Zero();
  Vec3 first = Vec3::Zero();
  double vol = 0.0;
  for (const auto& t : triangles_) {
    Mat3 a;
    a.col(0) = vertices_[t[0]];
    a.col(1) = vertices_[t[1]];
    a.col(2) = vertices_[t[2]];
    const double det = a.determinant();
    vol += det / 6.0;
    first += det / 24.0 * (a.col(0) + a.col(1) + a.col(2));
    cov += det * a * canonical * a.transpose();
  }
  const Vec3 com = first / vol;
  const Mat3 cov_com = cov - vol * com * com.transpose();
  const Mat3 inertia = (cov_com.trace() * Mat3::Identity() - cov_com) * density;
  return {vol * density, com, inertia};
}

// ---------------------------------------------------------------------------
// File IO

namespace {

struct VertexKey {
  double x, y, z;
  bool operator<(const VertexKey& o) const {
    return std::tie(x, y, z) < std::tie(o.x, o.y, o.z);
  }
};

class Welder {
 public:
  int add(const Vec3& v) {
    auto [it, inserted] = index_.try_emplace(VertexKey{v.x(), v.y(), v.z()},
                                             static_cast<int>(vertices.size()));
    if (inserted) vertices.push_back(v);
    return it->second;
  }
  std::vector<Vec3> vertices;

 private:
  std::map<VertexKey, int> index_;
};

TriangleMesh parse_obj(std::istream& in, double scale) {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> tris;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        throw MeshError("OBJ parse error at line " + std::to_string(line_no));
      }
      vertices.emplace_back(scale * x, scale * y, scale * z);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string tok;
      while (ls >> tok) {
        int idx = 0;
        try {
          idx = std::stoi(tok.substr(0, tok.find('/')));
        } catch (const std::exception&) {
          throw MeshError("OBJ parse error at line " + std::to_string(line_no));
        }
        idx = idx < 0 ? static_cast<int>(vertices.size()) + idx : idx - 1;
        face.push_back(idx);
      }
      if (face.size() < 3) {
        throw MeshError("OBJ face with fewer than 3 vertices at line " +
                        std::to_string(line_no));
      }
      for (std::size_t i = 1; i + 1 < face.size(); ++i) {
        tris.push_back({face[0], face[i], face[i + 1]});
      }
    }
  }
  return TriangleMesh::from_triangles(std::move(vertices), std::move(tris));
}

TriangleMesh parse_stl(const std::string& bytes, double scale) {
  Welder welder;
  std::vector<std::array<int, 3>> tris;
  const bool ascii = bytes.rfind("solid", 0) == 0 &&
                     bytes.find("facet") != std::string::npos;
  if (ascii) {
    std::istringstream in(bytes);
    std::string tok;
    std::array<int, 3> tri{};
    int corner = 0;
    while (in >> tok) {
      if (tok == "vertex") {
        double x, y, z;
        if (!(in >> x >> y >> z)) throw MeshError("STL parse error: bad vertex");
        if (corner > 2) throw MeshError("STL parse error: facet with more than 3 vertices");
        tri[corner++] = welder.add(Vec3(x, y, z) * scale);
      } else if (tok == "endloop") {
        if (corner != 3) throw MeshError("STL parse error: facet without 3 vertices");
        tris.push_back(tri);
        corner = 0;
      }
    }
  } else {
    if (bytes.size() < 84) throw MeshError("STL parse error: truncated header");
    std::uint32_t n = 0;
    std::memcpy(&n, bytes.data() + 80, 4);
    if (bytes.size() < 84 + 50ULL * n) throw MeshError("STL parse error: truncated body");
    for (std::uint32_t i = 0; i < n; ++i) {
      const char* rec = bytes.data() + 84 + 50ULL * i;
      std::array<int, 3> tri{};
      for (int c = 0; c < 3; ++c) {
        float xyz[3];
        std::memcpy(xyz, rec + 12 + 12 * c, 12);
        tri[c] = welder.add(Vec3(xyz[0], xyz[1], xyz[2]) * scale);
      }
      tris.push_back(tri);
    }
  }
  return TriangleMesh::from_triangles(std::move(welder.vertices), std::move(tris));
}

}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw MeshError("mesh scale must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError("cannot open mesh file: " + path.string());
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
  if (ext == ".obj") return parse_obj(in, scale);
  if (ext == ".stl") {
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_stl(bytes, scale);
  }
  throw MeshError("unsupported mesh format: " + ext);
}

namespace {

TriangleMesh scaled(const TriangleMesh& m, double scale) {
  if (scale == 1.0) return m;
  auto v = m.vertices();
  for (auto& p : v) p *= scale;
  return TriangleMesh::from_triangles(std::move(v), m.triangles());
}

}  // namespace

TriangleMesh load_mesh_source(const std::string& source, double scale) {
  constexpr std::string_view kPrefix = "builtin:";
  if (source.rfind(kPrefix, 0) != 0) return load_mesh(source, scale);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw MeshError("mesh scale must be positive");
  const std::string name = source.substr(kPrefix.size());
  if (name == "sphere") return scaled(make_icosphere(0.0365, 3), scale);
  if (name == "box") return scaled(make_box(Vec3(0.038, 0.089, 0.175)), scale);
  if (name == "mug") return scaled(make_mug(), scale);
  if (name == "bowl") return scaled(make_bowl(), scale);
  if (name == "cube") return scaled(make_box(Vec3(1.0, 1.0, 1.0)), scale);
  throw MeshError("unknown builtin mesh: " + name);
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file: " + path.string());
  out.precision(17);
  for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles()) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
}

// ---------------------------------------------------------------------------
// Procedural shapes

TriangleMesh make_icosphere(double radius, int subdivisions) {
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0},
                         {0, -1, p}, {0, 1, p}, {0, -1, -p}, {0, 1, -p},
                         {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& x : v) x.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((0.5 * (v[a] + v[b])).normalized());
      const int idx = static_cast<int>(v.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& t : f) {
      const int a = midpoint(t[0], t[1]);
      const int b = midpoint(t[1], t[2]);
      const int c = midpoint(t[2], t[0]);
      next.push_back({t[0], a, c});
      next.push_back({t[1], b, a});
      next.push_back({t[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (auto& x : v) x *= radius;
  return TriangleMesh::from_triangles(std::move(v), std::move(f));
}

TriangleMesh make_box(const Vec3& size) {
  const Vec3 h = 0.5 * size;
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) {
    v.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  }
  std::vector<std::array<int, 3>> f = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6},
                                       {0, 1, 4}, {1, 5, 4}, {2, 6, 3}, {3, 6, 7},
                                       {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return TriangleMesh::from_triangles(std::move(v), std::move(f));
}

TriangleMesh make_revolved(const std::vector<Eigen::Vector2d>& profile, int segments) {
  std::vector<Vec3> v;
  std::vector<std::vector<int>> ring(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double r = profile[i].x();
    const double z = profile[i].y();
    if (r <= 0.0) {
      v.emplace_back(0.0, 0.0, z);
      ring[i].assign(segments, static_cast<int>(v.size()) - 1);
      continue;
    }
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * M_PI * s / segments;
      v.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
      ring[i].push_back(static_cast<int>(v.size()) - 1);
    }
  }
  std::vector<std::array<int, 3>> f;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    for (int s = 0; s < segments; ++s) {
      const int s2 = (s + 1) % segments;
      const int a = ring[i][s], b = ring[i][s2];
      const int c = ring[i + 1][s], d = ring[i + 1][s2];
      if (a != b) f.push_back({a, b, d});
      if (c != d) f.push_back({a, d, c});
    }
  }
  return TriangleMesh::from_triangles(std::move(v), std::move(f));
}

TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments,
                        int minor_segments) {
  std::vector<Vec3> v;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * M_PI * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double w = 2.0 * M_PI * j / minor_segments;
      const double r = major_radius + minor_radius * std::cos(w);
      v.emplace_back(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(w));
    }
  }
  std::vector<std::array<int, 3>> f;
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      const int i2 = (i + 1) % major_segments, j2 = (j + 1) % minor_segments;
      const int a = i * minor_segments + j, b = i2 * minor_segments + j;
      const int c = i2 * minor_segments + j2, d = i * minor_segments + j2;
      f.push_back({a, b, c});
      f.push_back({a, c, d});
    }
  }
  return TriangleMesh::from_triangles(std::move(v), std::move(f));
}

TriangleMesh merge(const std::vector<TriangleMesh>& parts,
                   const std::vector<Eigen::Isometry3d>& poses) {
  std::vector<Vec3> v;
  std::vector<std::array<int, 3>> f;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const int offset = static_cast<int>(v.size());
    for (const auto& p : parts[i].vertices()) v.push_back(poses[i] * p);
    for (auto t : parts[i].triangles()) {
      // Proper rigid poses keep orientation; windings stay outward.
      f.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
    }
  }
  return TriangleMesh::from_triangles(std::move(v), std::move(f));
}

TriangleMesh make_mug() {
  constexpr double kRadius = 0.041;
  constexpr double kHeight = 0.105;
  constexpr double kWall = 0.006;
  constexpr double kBottom = 0.009;
  const std::vector<Eigen::Vector2d> profile = {
      {0.0, -kHeight / 2},
      {kRadius, -kHeight / 2},
      {kRadius, kHeight / 2},
      {kRadius - kWall, kHeight / 2},
      {kRadius - kWall, -kHeight / 2 + kBottom},
      {0.0, -kHeight / 2 + kBottom}};
  // The profile runs counter-clockwise in (r, z), which yields inward normals
  // on revolution; from_triangles repairs the orientation.
  TriangleMesh cup = make_revolved(profile, 32);
  constexpr double kMajor = 0.026;
  constexpr double kMinor = 0.007;
  constexpr double kGap = 0.002;
  TriangleMesh ring = make_torus(kMajor, kMinor, 24, 10);
  Eigen::Isometry3d ring_pose = Eigen::Isometry3d::Identity();
  ring_pose.translate(Vec3(kRadius + kGap + kMajor + kMinor, 0.0, 0.0));
  ring_pose.rotate(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitX()));
  return merge({cup, ring}, {Eigen::Isometry3d::Identity(), ring_pose});
}

TriangleMesh make_bowl() {
  constexpr double kRadius = 0.035;
  constexpr double kHeight = 0.035;
  constexpr double kWall = 0.003;
  std::vector<Eigen::Vector2d> profile = {{0.0, 0.0}};
  constexpr int kArc = 8;
  // Outer wall: quarter ellipse from the bottom center to the rim.
  for (int i = 1; i <= kArc; ++i) {
    const double a = 0.5 * M_PI * i / kArc;
    profile.emplace_back(kRadius * std::sin(a), kHeight * (1.0 - std::cos(a)));
  }
  for (int i = kArc; i >= 1; --i) {
    const double a = 0.5 * M_PI * i / kArc;
    profile.emplace_back((kRadius - kWall) * std::sin(a),
                         kWall + (kHeight - kWall) * (1.0 - std::cos(a)));
  }
  profile.emplace_back(0.0, kWall);
  return make_revolved(profile, 32);
}

}  // namespace graspqd
