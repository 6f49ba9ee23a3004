#pragma once

#include "graspqd/gripper.hpp"
#include "graspqd/projection.hpp"
#include "graspqd/wrench.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace graspqd {

/// Number of shakes in the robustness test; also the best shake fitness.
inline constexpr int kShakeCount = 2;

struct PhysicsParams {
  double friction = 0.5;
  double density = 500.0;             // kg/m^3
  double gravity = 9.81;              // m/s^2 along -z
  double shake_translation = 2.0;     // m/s^2 along world x
  double shake_rotation = 3.0;        // rad/s^2 about world z
  int cone_edges = 8;
  double torsional_friction = 0.005;  // m, soft-finger patch coefficient

  void validate() const;
};

struct MdrParams {
  int trials = 100;
  double sigma_position = 0.005;                 // m, per axis
  double sigma_orientation = 30.0 * M_PI / 180;  // rad
  double sigma_friction = 0.1;
};

struct EvaluationResult {
  bool valid = false;
  bool rejected = false;  // the prior produced no pose
  double fitness = 0.0;
  int shakes_resisted = 0;
  Vec3 behavior = Vec3::Zero();
  std::optional<double> nu;
  std::vector<Contact> contacts;
};

/// Rigid transform of the object in the world (applied before the shakes).
struct ObjectPerturbation {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  std::optional<double> friction;
};

/// Quasi-static grasp evaluation: overlap rejection, synergy closure, then
/// the shake test. Caches the object's mass properties.
class Evaluator {
 public:
  Evaluator(const TriangleMesh& mesh, const GripperSpec& spec, const PhysicsParams& params);

  EvaluationResult evaluate(const GraspPose& pose,
                            const ObjectPerturbation& perturbation = {}) const;

  /// Sums shake counts over `mdr.trials` domain-randomized evaluations;
  /// behavior and validity come from the unperturbed evaluation.
  EvaluationResult evaluate_mdr(const GraspPose& pose, const MdrParams& mdr,
                                std::uint64_t seed) const;

  /// The disturbance wrench of shake `i` (1-based; 0 is gravity alone) in
  /// the object frame, taken about the center of mass.
  Wrench shake_wrench(int i, const Mat3& object_rotation = Mat3::Identity()) const;

  const MassProperties& mass() const { return mass_; }
  const TriangleMesh& mesh() const { return *mesh_; }
  const GripperSpec& spec() const { return *spec_; }
  const PhysicsParams& params() const { return params_; }

 private:
  const TriangleMesh* mesh_;
  const GripperSpec* spec_;
  PhysicsParams params_;
  MassProperties mass_;
};

inline EvaluationResult evaluate(const GraspPose& pose, const TriangleMesh& mesh,
                                 const GripperSpec& spec, const PhysicsParams& params) {
  return Evaluator(mesh, spec, params).evaluate(pose);
}

inline double mdr_max_fitness(const MdrParams& mdr) { return kShakeCount * mdr.trials; }
inline double sim2real_estimate(double fitness, const MdrParams& mdr) {
  return fitness / mdr_max_fitness(mdr);
}

/// Deterministic per-genome seed.
std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index);

}  // namespace graspqd
