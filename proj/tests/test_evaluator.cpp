#include <random>

#include "doctest.h"
#include "graspqd/evaluator.hpp"
#include "test_support.hpp"

using namespace graspqd;

namespace {

// Side pinch through the center of the sphere, fingertips pointing down.
GraspPose sphere_pinch(const GripperSpec& spec) {
  return test::jaw_pose(spec, Vec3::Zero(), Vec3::UnitX(), -Vec3::UnitZ());
}

// Leading run of resisted shakes, recomputed from the contacts.
int count_leading_shakes(const Evaluator& ev, const std::vector<Contact>& contacts) {
  WrenchOptions options;
  options.reference = ev.mass().center_of_mass;
  options.torsional_friction = ev.params().torsional_friction;
  int n = 0;
  for (int i = 1; i <= kShakeCount; ++i) {
    if (!wrench_resists(contacts, ev.shake_wrench(i), ev.params().friction,
                        ev.params().cone_edges, options)) {
      break;
    }
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("a diametric pinch on the sphere survives both shakes") {
  const TriangleMesh m = load_mesh_source("builtin:sphere");
  const GripperSpec spec = gripper_preset("panda");
  const Evaluator ev(m, spec, {});
  const EvaluationResult r = ev.evaluate(sphere_pinch(spec));
  CHECK(r.valid);
  CHECK(r.contacts.size() == 2);
  CHECK(r.fitness == 2.0);
  CHECK(r.shakes_resisted == 2);
  CHECK((r.behavior - sphere_pinch(spec).position).norm() == 0.0);

  // Every positive multiple of each shake is balanced too.
  WrenchOptions options;
  options.reference = ev.mass().center_of_mass;
  options.torsional_friction = ev.params().torsional_friction;
  for (double scale : {0.1, 1.0, 10.0, 1000.0}) {
    for (int i = 0; i <= kShakeCount; ++i) {
      CHECK(wrench_resists(r.contacts, scale * ev.shake_wrench(i), 0.5, 8, options));
    }
  }
}

TEST_CASE("a nearly frictionless pinch on vertical faces is valid but holds nothing") {
  // Sphere facets can cradle the object without friction; the box sides cannot.
  const TriangleMesh m = load_mesh_source("builtin:box");
  const GripperSpec spec = gripper_preset("panda");
  PhysicsParams params;
  params.friction = 1e-4;
  const GraspPose pose = test::jaw_pose(spec, Vec3(0.0, 0.0, 0.0675), Vec3::UnitX(), -Vec3::UnitZ());
  CHECK(evaluate(pose, m, spec, {}).fitness == 2.0);
  const EvaluationResult r = evaluate(pose, m, spec, params);
  CHECK(r.valid);
  CHECK(r.fitness == 0.0);
}

TEST_CASE("a palm inside the object is invalid") {
  const TriangleMesh box = load_mesh_source("builtin:box");
  const GripperSpec spec = gripper_preset("panda");
  GraspPose pose;
  pose.position = Vec3::Zero();
  const EvaluationResult r = evaluate(pose, box, spec, {});
  CHECK_FALSE(r.valid);
  CHECK(r.fitness == 0.0);
}

TEST_CASE("a single-finger contact is invalid") {
  const GripperSpec spec = gripper_preset("panda");
  // A thin plate entirely on the +x side of the closing midpoint.
  const TriangleMesh plate = [] {
    TriangleMesh b = make_box(Vec3(0.01, 0.02, 0.02));
    auto v = b.vertices();
    for (auto& p : v) p += Vec3(0.015, 0.0, 0.0);
    return TriangleMesh::from_triangles(v, b.triangles());
  }();
  const GraspPose pose = test::jaw_pose(spec, Vec3::Zero(), Vec3::UnitX(), -Vec3::UnitZ());
  const Evaluator ev(plate, spec, {});
  REQUIRE_FALSE(gripper_overlaps(spec, pose.frame(), {}, plate));
  const EvaluationResult r = ev.evaluate(pose);
  CHECK_FALSE(r.valid);
  CHECK(r.fitness == 0.0);
  CHECK(close_fingers(spec, pose.frame(), 0, {}, plate).contact_count() == 1);
}

TEST_CASE("a grasp that misses the object is invalid") {
  const TriangleMesh m = load_mesh_source("builtin:sphere");
  const GripperSpec spec = gripper_preset("allegro4");
  GraspPose pose;
  pose.position = Vec3(1.0, 1.0, 1.0);
  const EvaluationResult r = evaluate(pose, m, spec, {});
  CHECK_FALSE(r.valid);
  CHECK(r.behavior == pose.position);
}

TEST_CASE("fitness counts the leading resisted shakes") {
  std::mt19937_64 rng(1);
  int valid = 0;
  std::array<int, 3> histogram{};
  for (const char* name : {"builtin:sphere", "builtin:box", "builtin:mug"}) {
    const TriangleMesh m = load_mesh_source(name);
    for (const char* gripper : {"panda", "barrett3", "allegro4"}) {
      const GripperSpec spec = gripper_preset(gripper);
      const Evaluator ev(m, spec, {});
      const double reach = 0.5 * m.bounding_box().diagonal();
      for (int i = 0; i < 150; ++i) {
        GraspPose pose = test::jaw_pose(spec, m.bounding_box().center() + 0.4 * reach * test::random_unit(rng),
                                        test::random_unit(rng), test::random_unit(rng));
        pose.synergy_id = i % spec.synergy_count();
        pose.init_joints.assign(spec.free_joint_count(), 0.2);
        const EvaluationResult r = ev.evaluate(pose);
        CHECK((r.behavior - pose.position).norm() < 1e-15);
        CHECK((r.fitness == 0.0 || r.fitness == 1.0 || r.fitness == 2.0));
        if (!r.valid) {
          CHECK(r.fitness == 0.0);
          continue;
        }
        ++valid;
        CHECK(r.contacts.size() >= 2);
        CHECK(r.fitness == count_leading_shakes(ev, r.contacts));
        ++histogram[static_cast<int>(r.fitness)];
      }
    }
  }
  MESSAGE("valid ", valid, " fitness histogram ", histogram[0], " ", histogram[1], " ", histogram[2]);
  CHECK(valid > 50);
  CHECK(histogram[2] > 0);
}

TEST_CASE("shake wrenches follow the object rotation") {
  const TriangleMesh m = load_mesh_source("builtin:box");
  const Evaluator ev(m, gripper_preset("panda"), {});
  const double mass = ev.mass().mass;
  CHECK(mass == doctest::Approx(500.0 * m.volume()));
  const Wrench w0 = ev.shake_wrench(0);
  CHECK((w0.head<3>() - Vec3(0, 0, -mass * 9.81)).norm() < 1e-12);
  const Wrench w1 = ev.shake_wrench(1);
  CHECK((w1.head<3>() - Vec3(-mass * 2.0, 0, -mass * 9.81)).norm() < 1e-12);
  const Wrench w2 = ev.shake_wrench(2);
  CHECK((w2.tail<3>() + ev.mass().inertia * Vec3(0, 0, 3.0)).norm() < 1e-12);
  // Turning the object by a half turn about z flips the world x push.
  const Mat3 half = Eigen::AngleAxisd(M_PI, Vec3::UnitZ()).toRotationMatrix();
  CHECK((ev.shake_wrench(1, half).head<3>() - Vec3(mass * 2.0, 0, -mass * 9.81)).norm() < 1e-9);
}

TEST_CASE("domain randomization") {
  const TriangleMesh sphere = load_mesh_source("builtin:sphere");
  const GripperSpec spec = gripper_preset("panda");
  const Evaluator ev(sphere, spec, {});
  const GraspPose pinch = sphere_pinch(spec);

  MdrParams still;
  still.trials = 20;
  still.sigma_position = still.sigma_orientation = still.sigma_friction = 0.0;
  CHECK(ev.evaluate_mdr(pinch, still, 7).fitness == 20 * ev.evaluate(pinch).fitness);

  MdrParams mdr;
  const EvaluationResult a = ev.evaluate_mdr(pinch, mdr, 11);
  const EvaluationResult b = ev.evaluate_mdr(pinch, mdr, 11);
  CHECK(a.fitness == b.fitness);
  CHECK(a.fitness <= mdr_max_fitness(mdr));
  CHECK(mdr_max_fitness(mdr) == 200.0);
  const double robust = sim2real_estimate(a.fitness, mdr);
  CHECK(robust >= 0.0);
  CHECK(robust <= 1.0);

  // Jaws straddling the thin bowl rim are far more fragile than a pinch
  // through the center of a sphere.
  const TriangleMesh bowl = load_mesh_source("builtin:bowl");
  const Evaluator bowl_ev(bowl, spec, {});
  const Aabb box = bowl.bounding_box();
  const double wall_x = box.hi.x() - 0.0015;
  const GraspPose rim = test::jaw_pose(spec, Vec3(wall_x, 0.0, box.hi.z() - 0.004), Vec3::UnitX(),
                                       -Vec3::UnitZ());
  const EvaluationResult nominal_rim = bowl_ev.evaluate(rim);
  REQUIRE(nominal_rim.valid);
  const double fragile = sim2real_estimate(bowl_ev.evaluate_mdr(rim, mdr, 11).fitness, mdr);
  MESSAGE("sphere pinch ", robust, " bowl rim ", fragile);
  CHECK(fragile < robust);

  const GraspPose miss = test::jaw_pose(spec, Vec3(1, 1, 1), Vec3::UnitX(), -Vec3::UnitZ());
  const EvaluationResult invalid = ev.evaluate_mdr(miss, mdr, 3);
  CHECK_FALSE(invalid.valid);
  CHECK(invalid.fitness == 0.0);

  MdrParams none;
  none.trials = 0;
  CHECK_THROWS_AS(ev.evaluate_mdr(pinch, none, 1), std::invalid_argument);
}

TEST_CASE("per-genome seeds are stable and distinct") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("physics parameters are validated") {
  PhysicsParams p;
  p.friction = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.cone_edges = 3;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
