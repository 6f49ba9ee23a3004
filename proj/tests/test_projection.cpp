#include <random>

#include "doctest.h"
#include "graspqd/projection.hpp"
#include "test_support.hpp"

using namespace graspqd;

namespace {

Genome random_genome_for(Prior prior, const GripperSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Genome g{std::vector<double>(genome_length(prior, spec)), prior};
  for (auto& x : g.values) x = u(rng);
  return g;
}

std::size_t scan_nearest(const SurfaceSampleSet& s, const Vec3& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if ((s[i].position - p).squaredNorm() < (s[best].position - p).squaredNorm()) best = i;
  }
  return best;
}

// Triangular prism with a 60 degree apex edge along z.
TriangleMesh make_wedge() {
  const double h = 0.06, w = h * std::tan(M_PI / 6), l = 0.05;
  std::vector<Vec3> v = {Vec3(-w, 0, -l), Vec3(w, 0, -l), Vec3(0, h, -l),
                         Vec3(-w, 0, l),  Vec3(w, 0, l),  Vec3(0, h, l)};
  return TriangleMesh::from_triangles(
      v, {{0, 2, 1}, {3, 4, 5}, {0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}, {2, 0, 3}, {2, 3, 5}});
}

}  // namespace

TEST_CASE("genome lengths follow prior and gripper") {
  const GripperSpec panda = gripper_preset("panda");
  const GripperSpec allegro = gripper_preset("allegro4");
  const GripperSpec barrett = gripper_preset("barrett3");
  CHECK(genome_length(Prior::kContact, panda) == 7);
  CHECK(genome_length(Prior::kApproach, panda) == 7);
  CHECK(genome_length(Prior::kAntipodal, panda) == 4);
  CHECK(genome_length(Prior::kDirect, panda) == 6);
  CHECK(genome_length(Prior::kContact, allegro) == 8);
  CHECK(genome_length(Prior::kDirect, barrett) == 8);
}

TEST_CASE("synergy gene uses half-open uniform bins") {
  CHECK(decode_synergy(-1.0, 4) == 0);
  CHECK(decode_synergy(1.0, 4) == 3);
  CHECK(decode_synergy(-0.5, 4) == 1);
  CHECK(decode_synergy(std::nextafter(-0.5, -1.0), 4) == 0);
  CHECK(decode_synergy(0.0, 4) == 2);
  CHECK(decode_synergy(0.3, 1) == 0);
}

TEST_CASE("all-zero approach genome decodes to interval midpoints") {
  const TriangleMesh m = make_icosphere(1.0, 3);
  const SurfaceSampleSet s = sample_surface(m, 4096, 1);
  const GripperSpec spec = gripper_preset("panda");
  const Genome g{std::vector<double>(7, 0.0), Prior::kApproach};
  const Projection p = project(g, m, s, spec);
  REQUIRE(p.pose);
  CHECK(p.reference_point == s[scan_nearest(s, m.bounding_box().center())].position);
  CHECK(*p.nu == doctest::Approx(M_PI / 8));
  CHECK((p.pose->position - p.reference_point).norm() ==
        doctest::Approx(0.5 * spec.max_approach_distance()));

  const Projection c = project(Genome{g.values, Prior::kContact}, m, s, spec);
  CHECK(*c.nu == doctest::Approx(M_PI / 2));
}

TEST_CASE("nu gene at -1 gives the cone apex") {
  const TriangleMesh m = load_mesh_source("builtin:mug");
  const SurfaceSampleSet s = sample_surface(m, 2048, 2);
  const GripperSpec spec = gripper_preset("panda");
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Genome g = random_genome_for(Prior::kApproach, spec, rng);
    g.values[4] = -1.0;
    const Projection p = project(g, m, s, spec);
    CHECK((p.pose->frame().y + p.reference_normal).norm() < 1e-9);
  }
}

TEST_CASE("approach genomes never exceed the pi/4 cone") {
  const TriangleMesh m = load_mesh_source("builtin:box");
  const SurfaceSampleSet s = sample_surface(m, 4096, 4);
  const GripperSpec spec = gripper_preset("allegro4");
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Projection p = project(random_genome_for(Prior::kApproach, spec, rng), m, s, spec);
    REQUIRE(p.pose);
    CHECK(*p.nu <= M_PI / 4 + 1e-12);
    CHECK(angle_between(p.reference_normal, -p.pose->frame().y) <= M_PI / 4 + 1e-9);
    CHECK(std::abs(p.pose->orientation.norm() - 1.0) < 1e-9);
    CHECK(p.pose->synergy_id < spec.synergy_count());
  }
}

TEST_CASE("nearby finder points give nearby reference points") {
  const TriangleMesh m = load_mesh_source("builtin:mug");
  const SurfaceSampleSet s = sample_surface(m, 4096, 5);
  const GripperSpec spec = gripper_preset("panda");
  const Vec3 extent = m.bounding_box().extent();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    Genome a = random_genome_for(Prior::kContact, spec, rng);
    Genome b = a;
    for (int k = 0; k < 3; ++k) b.values[k] = std::clamp(a.values[k] + 0.01 * u(rng), -1.0, 1.0);
    const Projection pa = project(a, m, s, spec);
    const Projection pb = project(b, m, s, spec);
    const Vec3 fa = m.bounding_box().lo + 0.5 * (Vec3(a.values[0], a.values[1], a.values[2]) + Vec3::Ones()).cwiseProduct(extent);
    const Vec3 fb = m.bounding_box().lo + 0.5 * (Vec3(b.values[0], b.values[1], b.values[2]) + Vec3::Ones()).cwiseProduct(extent);
    // |Pg' - Pg| <= |Pg' - Pf'| + |Pf' - Pf| + |Pf - Pg| <= 2 (|Pf - Pg| + |Pf' - Pf|)
    const double bound = 2.0 * ((fa - pa.reference_point).norm() + (fb - fa).norm());
    CHECK((pb.reference_point - pa.reference_point).norm() <= bound + 1e-12);
  }
}

TEST_CASE("antipodal on a sphere accepts every contact") {
  const TriangleMesh m = load_mesh_source("builtin:sphere");
  const SurfaceSampleSet s = sample_surface(m, 4096, 7);
  const GripperSpec spec = gripper_preset("panda");
  // Facet tilt: worst angle between a face normal and the radial direction
  // through any of its vertices.
  double tilt = 0.0;
  for (std::size_t t = 0; t < m.size(); ++t) {
    const Triangle tri = m.triangle(int(t));
    for (const Vec3& v : {tri.a, tri.b, tri.c}) tilt = std::max(tilt, angle_between(m.normals()[t], v));
  }
  const double radius = 0.5 * m.bounding_box().extent().x();
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    const Projection p = project(random_genome_for(Prior::kAntipodal, spec, rng), m, s, spec);
    REQUIRE(p.pose);
    CHECK(*p.antipodal_angle <= 2 * tilt + 1e-9);
    const GripperFrame f = p.pose->frame();
    CHECK((f.x + p.reference_normal).norm() < 1e-9);
    // The contact midpoint sits grasp_depth in front of the palm, near the center.
    const Vec3 mid = f.origin + spec.grasp_depth() * f.y;
    CHECK(mid.norm() <= radius * std::sin(tilt) + 1e-9);
  }
}

TEST_CASE("antipodal rejects the faces of a sharp wedge") {
  const TriangleMesh wedge = make_wedge();
  // Contact candidates restricted to the left slanted face near z = 0.
  std::vector<ContactSample> samples;
  const Vec3 n = wedge.normals()[6];
  REQUIRE(n.x() < 0.0);
  const double h = 0.06, w = h * std::tan(M_PI / 6);
  for (int i = 1; i < 10; ++i) {
    const double t = i / 10.0;
    samples.push_back({Vec3(-w * (1 - t), h * t, 0.01 * (i % 3 - 1)), n, 6});
  }
  const SurfaceSampleSet s(samples);
  const GripperSpec spec = gripper_preset("panda");
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Projection p = project(random_genome_for(Prior::kAntipodal, spec, rng), wedge, s, spec);
    CHECK_FALSE(p.pose);
    REQUIRE(p.antipodal_angle);
    CHECK(*p.antipodal_angle > M_PI / 6);
  }
}

TEST_CASE("accepted antipodal grasps satisfy the tolerance when recomputed") {
  const GripperSpec spec = gripper_preset("panda");
  std::mt19937_64 rng(10);
  int accepted = 0, rejected = 0;
  for (const char* name : {"builtin:box", "builtin:mug"}) {
    const TriangleMesh m = load_mesh_source(name);
    const SurfaceSampleSet s = sample_surface(m, 4096, 11);
    for (int i = 0; i < 500; ++i) {
      const Genome g = random_genome_for(Prior::kAntipodal, spec, rng);
      const Projection p = project(g, m, s, spec);
      if (!p.pose) {
        ++rejected;
        continue;
      }
      ++accepted;
      const ContactSample& c = s[scan_nearest(s, m.bounding_box().lo + 0.5 * (Vec3(g.values[0], g.values[1], g.values[2]) + Vec3::Ones()).cwiseProduct(m.bounding_box().extent()))];
      const auto hits = m.ray_cast(c.position + 1e-6 * c.normal, -c.normal);
      REQUIRE(hits.size() >= 2);
      CHECK(angle_between(c.normal, -hits.back().normal) <= M_PI / 6 + 1e-12);
    }
  }
  CHECK(accepted > 0);
  CHECK(rejected > 0);  // the mug has inner wall and handle contacts
}

TEST_CASE("antipodal roll is periodic") {
  const TriangleMesh m = load_mesh_source("builtin:box");
  const SurfaceSampleSet s = sample_surface(m, 4096, 12);
  const GripperSpec spec = gripper_preset("panda");
  std::mt19937_64 rng(13);
  int checked = 0;
  for (int i = 0; i < 50; ++i) {
    Genome a = random_genome_for(Prior::kAntipodal, spec, rng);
    a.values[3] = -1.0;  // roll 0
    Genome b = a;
    b.values[3] = 1.0 - 1e-9;  // roll just below 2 pi
    const Projection pa = project(a, m, s, spec);
    const Projection pb = project(b, m, s, spec);
    if (!pa.pose) continue;
    REQUIRE(pb.pose);
    ++checked;
    const GripperFrame fa = pa.pose->frame(), fb = pb.pose->frame();
    CHECK((fa.x - fb.x).norm() < 1e-9);
    CHECK((fa.y - fb.y).norm() < 1e-6);
    const Vec3 ma = fa.origin + spec.grasp_depth() * fa.y;
    const Vec3 mb = fb.origin + spec.grasp_depth() * fb.y;
    CHECK((ma - mb).norm() < 1e-12);
  }
  CHECK(checked > 10);
}

TEST_CASE("direct encoding") {
  const TriangleMesh m = load_mesh_source("builtin:mug");
  const GripperSpec spec = gripper_preset("barrett3");
  const int n = genome_length(Prior::kDirect, spec);

  const Genome low{std::vector<double>(n, -1.0), Prior::kDirect};
  const Projection p = project_direct(low, m, spec);
  CHECK((p.pose->position - m.bounding_box().center()).norm() < 1e-15);
  CHECK(p.pose->init_joints[0] == doctest::Approx(-M_PI / 2));

  std::mt19937_64 rng(14);
  const double rho_max = 1.5 * (0.5 * m.bounding_box().diagonal() + spec.max_approach_distance());
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  for (int i = 0; i < 1000; ++i) {
    const Projection q = project_direct(random_genome_for(Prior::kDirect, spec, rng), m, spec);
    CHECK((q.pose->position - m.bounding_box().center()).norm() <= rho_max + 1e-12);
    for (double j : q.pose->init_joints) CHECK(std::abs(j) <= M_PI / 2 + 1e-12);

    // Euler round trip through an independent Z-Y-X extraction.
    const double yaw = angle(rng), pitch = angle(rng), roll = angle(rng);
    const Mat3 r = euler_zyx(yaw, pitch, roll);
    const Vec3 e = r.eulerAngles(2, 1, 0);
    const Mat3 back = (Eigen::AngleAxisd(e[0], Vec3::UnitZ()) * Eigen::AngleAxisd(e[1], Vec3::UnitY()) *
                       Eigen::AngleAxisd(e[2], Vec3::UnitX())).toRotationMatrix();
    CHECK((back - r).norm() < 1e-9);
    const Mat3 manual = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix() *
                        Eigen::AngleAxisd(pitch, Vec3::UnitY()).toRotationMatrix() *
                        Eigen::AngleAxisd(roll, Vec3::UnitX()).toRotationMatrix();
    CHECK((manual - r).norm() < 1e-12);
  }
}

TEST_CASE("projection is deterministic and checks genome length") {
  const TriangleMesh m = load_mesh_source("builtin:box");
  const SurfaceSampleSet s = sample_surface(m, 1024, 15);
  const GripperSpec spec = gripper_preset("allegro4");
  std::mt19937_64 rng(16);
  for (Prior prior : {Prior::kContact, Prior::kApproach, Prior::kDirect}) {
    const Genome g = random_genome_for(prior, spec, rng);
    const Projection a = project(g, m, s, spec);
    const Projection b = project(g, m, s, spec);
    CHECK(a.pose->position == b.pose->position);
    CHECK(a.pose->orientation.coeffs() == b.pose->orientation.coeffs());
    CHECK(a.pose->synergy_id == b.pose->synergy_id);
  }
  Genome wrong{std::vector<double>(3, 0.0), Prior::kContact};
  CHECK_THROWS_AS(project(wrong, m, s, spec), std::invalid_argument);
}
