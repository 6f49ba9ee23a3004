#include "graspqd/evaluator.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace graspqd {

void PhysicsParams::validate() const {
  if (!(friction > 0.0)) throw std::invalid_argument("physics.friction must be > 0");
  if (!(density > 0.0)) throw std::invalid_argument("physics.density must be > 0");
  if (!(gravity >= 0.0)) throw std::invalid_argument("physics.gravity must be >= 0");
  if (cone_edges < 4) throw std::invalid_argument("physics.cone_edges must be >= 4");
  if (!(torsional_friction >= 0.0)) {
    throw std::invalid_argument("physics.torsional_friction must be >= 0");
  }
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index) {
  // splitmix64 over the pair
  std::uint64_t z = global_seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Evaluator::Evaluator(const TriangleMesh& mesh, const GripperSpec& spec,
                     const PhysicsParams& params)
    : mesh_(&mesh), spec_(&spec), params_(params), mass_(mesh.mass_properties(params.density)) {
  params_.validate();
}

Wrench Evaluator::shake_wrench(int i, const Mat3& object_rotation) const {
  // World directions expressed in the object frame.
  const Mat3 to_object = object_rotation.transpose();
  Wrench w = Wrench::Zero();
  w.head<3>() = mass_.mass * params_.gravity * (to_object * -Vec3::UnitZ());
  if (i == 1) {
    w.head<3>() += -mass_.mass * params_.shake_translation * (to_object * Vec3::UnitX());
  } else if (i == 2) {
    w.tail<3>() = -mass_.inertia * (params_.shake_rotation * (to_object * Vec3::UnitZ()));
  }
  return w;
}

EvaluationResult Evaluator::evaluate(const GraspPose& pose,
                                     const ObjectPerturbation& perturbation) const {
  EvaluationResult result;
  const GripperFrame world = pose.frame();
  result.behavior = world.origin;

  // The gripper seen from the (possibly displaced) object frame.
  const Mat3 rt = perturbation.rotation.transpose();
  GripperFrame frame;
  frame.origin = rt * (world.origin - perturbation.translation);
  frame.x = rt * world.x;
  frame.y = rt * world.y;
  frame.z = rt * world.z;

  if (gripper_overlaps(*spec_, frame, pose.init_joints, *mesh_)) return result;
  const ClosureResult closure =
      close_fingers(*spec_, frame, pose.synergy_id, pose.init_joints, *mesh_);
  if (closure.initial_penetration || closure.contact_count() < 2) return result;

  result.valid = true;
  for (int f = 0; f < spec_->n_fingers; ++f) {
    const FingerState& s = closure.fingers[f];
    if (s.in_contact) result.contacts.push_back({s.contact_point, s.contact_normal, f});
  }

  WrenchOptions options;
  options.reference = mass_.center_of_mass;
  options.torsional_friction = params_.torsional_friction;
  const double mu = perturbation.friction.value_or(params_.friction);
  for (int i = 1; i <= kShakeCount; ++i) {
    if (!wrench_resists(result.contacts, shake_wrench(i, perturbation.rotation), mu,
                        params_.cone_edges, options)) {
      break;
    }
    ++result.shakes_resisted;
  }
  result.fitness = result.shakes_resisted;
  return result;
}

EvaluationResult Evaluator::evaluate_mdr(const GraspPose& pose, const MdrParams& mdr,
                                         std::uint64_t seed) const {
  if (mdr.trials < 1) throw std::invalid_argument("mdr.trials must be >= 1");
  EvaluationResult nominal = evaluate(pose);
  if (!nominal.valid) return nominal;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  int total = 0;
  for (int t = 0; t < mdr.trials; ++t) {
    ObjectPerturbation p;
    p.translation = Vec3(normal(rng), normal(rng), normal(rng)) * mdr.sigma_position;
    Vec3 axis(normal(rng), normal(rng), normal(rng));
    const double angle = normal(rng) * mdr.sigma_orientation;
    axis = axis.norm() > 1e-12 ? axis.normalized() : Vec3::UnitZ();
    p.rotation = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    p.friction = std::max(params_.friction + normal(rng) * mdr.sigma_friction, 1e-6);
    total += evaluate(pose, p).shakes_resisted;
  }
  nominal.fitness = total;
  return nominal;
}

}  // namespace graspqd
