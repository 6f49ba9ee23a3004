#pragma once

#include "graspqd/mesh.hpp"

#include <string>
#include <vector>

namespace graspqd {

/// Gripper frame: (z, x) span the palm plane, y points along the gripping
/// direction, origin is the center of the palm's front face.
struct GripperFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 x = Vec3::UnitX();
  Vec3 y = Vec3::UnitY();
  Vec3 z = Vec3::UnitZ();

  Mat3 rotation() const {
    Mat3 r;
    r << x, y, z;
    return r;
  }
  Quat quaternion() const { return Quat(rotation()).normalized(); }
  static GripperFrame from_pose(const Vec3& origin, const Quat& q);
};

enum class GripperFamily { kParallelJaw, kRadialNFinger };

struct JointRange {
  double lo;
  double hi;
};

struct GripperSpec {
  std::string name = "custom";
  GripperFamily family = GripperFamily::kParallelJaw;
  int n_fingers = 2;
  double max_aperture = 0.08;
  double finger_length = 0.054;
  double finger_radius = 0.008;
  Vec3 palm_half_extents = Vec3(0.076, 0.03, 0.025);

  // Radial hands: finger bases sit on a circle in the palm plane; finger 0 is
  // the thumb. Each finger is a planar proximal/distal chain.
  double palm_radius = 0.0;
  std::vector<double> finger_azimuths;
  double proximal_length = 0.0;
  double distal_length = 0.0;
  double open_angle = -0.2;
  double close_angle = 1.5;
  double distal_max = 1.2;

  std::vector<std::vector<int>> synergies = {{0, 1}};
  /// Finger whose mounting-plane yaw each free joint sets.
  std::vector<int> free_joint_fingers;
  std::vector<JointRange> joint_ranges;

  int synergy_count() const { return static_cast<int>(synergies.size()); }
  int free_joint_count() const { return static_cast<int>(free_joint_fingers.size()); }
  /// Upper bound of the approach distance gene.
  double max_approach_distance() const { return 0.5 * max_aperture + 0.5 * finger_length; }
  /// Depth of the antipodal contact midpoint in front of the palm.
  double grasp_depth() const { return finger_length - 1.5 * finger_radius; }
  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

GripperSpec gripper_preset(const std::string& name);
std::vector<std::string> gripper_preset_names();

struct FingerState {
  double closure = 0.0;  // 1 is fully closed
  bool in_contact = false;
  Vec3 contact_point = Vec3::Zero();
  Vec3 contact_normal = Vec3::Zero();  // outward object normal at the contact
};

struct ClosureResult {
  bool initial_penetration = false;
  std::vector<FingerState> fingers;
  int contact_count() const;
};

GripperFrame palm_frame_from_approach(const Vec3& ref_point, const Vec3& surface_normal,
                                      double distance, double nu, double xi, double omega);

/// Capsules of every link of `finger` at closure `c`.
std::vector<Capsule> finger_links(const GripperSpec& spec, const GripperFrame& frame,
                                  int finger, double closure,
                                  const std::vector<double>& init_joints);

Box palm_box(const GripperSpec& spec, const GripperFrame& frame);

/// Palm box and every finger at the open pose.
bool gripper_overlaps(const GripperSpec& spec, const GripperFrame& frame,
                      const std::vector<double>& init_joints, const TriangleMesh& mesh);

/// Closes the fingers of one synergy until first contact or joint limit:
/// fixed steps of 1e-3 m (jaws) or 0.5 deg (radial), refined by bisection to
/// 1e-5 m. Steps that provably stay clear of the mesh are skipped.
ClosureResult close_fingers(const GripperSpec& spec, const GripperFrame& frame, int synergy_id,
                            const std::vector<double>& init_joints, const TriangleMesh& mesh);

}  // namespace graspqd
