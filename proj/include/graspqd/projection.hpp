#pragma once

#include "graspqd/gripper.hpp"
#include "graspqd/surface_samples.hpp"

#include <optional>
#include <string>
#include <vector>

namespace graspqd {

enum class Prior { kContact, kApproach, kAntipodal, kDirect };

std::string to_string(Prior prior);
Prior prior_from_string(const std::string& name);

inline constexpr double kApproachConeHalfAperture = M_PI / 4;
inline constexpr double kContactConeHalfAperture = M_PI;
inline constexpr double kAntipodalTolerance = M_PI / 6;

/// Search-space individual; every component lies in [-1, 1].
struct Genome {
  std::vector<double> values;
  Prior prior = Prior::kContact;
};

/// Genes before the synergy/joint tail: approach and contact 7, antipodal 4,
/// direct 6.
int base_genome_length(Prior prior);
int genome_length(Prior prior, const GripperSpec& spec);

struct GraspPose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  int synergy_id = 0;
  std::vector<double> init_joints;

  GripperFrame frame() const { return GripperFrame::from_pose(position, orientation); }
};

struct Projection {
  std::optional<GraspPose> pose;  // empty when the prior rejects the genome
  std::optional<double> nu;       // approach/contact: angle(n, -y_g)
  std::optional<double> antipodal_angle;
  Vec3 reference_point = Vec3::Zero();
  Vec3 reference_normal = Vec3::Zero();
};

/// Maps x in [-1, 1] affinely onto [lo, hi].
inline double denormalize(double x, double lo, double hi) {
  return lo + 0.5 * (x + 1.0) * (hi - lo);
}

/// Uniform binning of [-1, 1] into m half-open bins, last bin closed.
int decode_synergy(double gene, int m);

Projection project_approach(const Genome& genome, const TriangleMesh& mesh,
                            const SurfaceSampleSet& sset, const GripperSpec& spec,
                            double half_aperture);
Projection project_antipodal(const Genome& genome, const TriangleMesh& mesh,
                             const SurfaceSampleSet& sset, const GripperSpec& spec,
                             double tolerance = kAntipodalTolerance);
Projection project_direct(const Genome& genome, const TriangleMesh& mesh,
                          const GripperSpec& spec);

/// Dispatches on genome.prior with the standard cone apertures.
Projection project(const Genome& genome, const TriangleMesh& mesh, const SurfaceSampleSet& sset,
                   const GripperSpec& spec);

/// Largest origin radius reachable by the direct encoding.
double direct_max_radius(const TriangleMesh& mesh, const GripperSpec& spec);

/// Intrinsic Z-Y-X Euler angles.
Mat3 euler_zyx(double yaw, double pitch, double roll);

}  // namespace graspqd
