#include "graspqd/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graspqd {

std::string to_string(Prior prior) {
  switch (prior) {
    case Prior::kContact: return "contact";
    case Prior::kApproach: return "approach";
    case Prior::kAntipodal: return "antipodal";
    case Prior::kDirect: return "direct";
  }
  return "unknown";
}

Prior prior_from_string(const std::string& name) {
  if (name == "contact") return Prior::kContact;
  if (name == "approach") return Prior::kApproach;
  if (name == "antipodal") return Prior::kAntipodal;
  if (name == "direct") return Prior::kDirect;
  throw std::invalid_argument("unknown prior: " + name);
}

int base_genome_length(Prior prior) {
  switch (prior) {
    case Prior::kContact:
    case Prior::kApproach: return 7;
    case Prior::kAntipodal: return 4;
    case Prior::kDirect: return 6;
  }
  return 0;
}

int genome_length(Prior prior, const GripperSpec& spec) {
  return base_genome_length(prior) + (spec.synergy_count() > 1 ? 1 : 0) +
         spec.free_joint_count();
}

int decode_synergy(double gene, int m) {
  const int bin = static_cast<int>(std::floor(0.5 * (gene + 1.0) * m));
  return std::clamp(bin, 0, m - 1);
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

void check_length(const Genome& g, const GripperSpec& spec) {
  if (static_cast<int>(g.values.size()) != genome_length(g.prior, spec)) {
    throw std::invalid_argument("genome length does not match prior and gripper");
  }
}

Vec3 finder_point(const Genome& g, const TriangleMesh& mesh) {
  const Aabb& box = mesh.bounding_box();
  return {denormalize(g.values[0], box.lo.x(), box.hi.x()),
          denormalize(g.values[1], box.lo.y(), box.hi.y()),
          denormalize(g.values[2], box.lo.z(), box.hi.z())};
}

void decode_tail(const Genome& g, const GripperSpec& spec, GraspPose& pose) {
  std::size_t i = base_genome_length(g.prior);
  const int m = spec.synergy_count();
  pose.synergy_id = m > 1 ? decode_synergy(g.values[i++], m) : 0;
  pose.init_joints.clear();
  for (const auto& range : spec.joint_ranges) {
    pose.init_joints.push_back(denormalize(g.values[i++], range.lo, range.hi));
  }
}

GraspPose pose_from_frame(const GripperFrame& f) {
  GraspPose p;
  p.position = f.origin;
  p.orientation = f.quaternion();
  return p;
}

}  // namespace

Projection project_approach(const Genome& genome, const TriangleMesh& mesh,
                            const SurfaceSampleSet& sset, const GripperSpec& spec,
                            double half_aperture) {
  check_length(genome, spec);
  const auto& v = genome.values;
  const ContactSample& ref = sset.nearest(finder_point(genome, mesh));
  const double d = denormalize(v[3], 0.0, spec.max_approach_distance());
  const double nu = denormalize(v[4], 0.0, half_aperture);
  const double xi = denormalize(v[5], 0.0, kTwoPi);
  const double omega = denormalize(v[6], 0.0, kTwoPi);
  const GripperFrame frame = palm_frame_from_approach(ref.position, ref.normal, d, nu, xi, omega);

  Projection out;
  out.pose = pose_from_frame(frame);
  decode_tail(genome, spec, *out.pose);
  out.nu = nu;
  out.reference_point = ref.position;
  out.reference_normal = ref.normal;
  return out;
}

Projection project_antipodal(const Genome& genome, const TriangleMesh& mesh,
                             const SurfaceSampleSet& sset, const GripperSpec& spec,
                             double tolerance) {
  check_length(genome, spec);
  Projection out;
  const ContactSample& first = sset.nearest(finder_point(genome, mesh));
  out.reference_point = first.position;
  out.reference_normal = first.normal;
  const Vec3 u = -first.normal;
  const auto hits = mesh.ray_cast(first.position + 1e-6 * first.normal, u);
  if (hits.size() < 2) return out;
  const RayHit& second = hits.back();
  const double angle = angle_between(first.normal, -second.normal);
  out.antipodal_angle = angle;
  if (angle > tolerance) return out;

  const double roll = denormalize(genome.values[3], 0.0, kTwoPi);
  const Vec3 e = any_orthogonal(u);
  GripperFrame frame;
  frame.x = u;
  frame.y = (std::cos(roll) * e + std::sin(roll) * u.cross(e)).normalized();
  frame.z = frame.x.cross(frame.y);
  frame.origin = 0.5 * (first.position + second.point) - spec.grasp_depth() * frame.y;
  out.pose = pose_from_frame(frame);
  decode_tail(genome, spec, *out.pose);
  return out;
}

Mat3 euler_zyx(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

double direct_max_radius(const TriangleMesh& mesh, const GripperSpec& spec) {
  return 1.5 * (0.5 * mesh.bounding_box().diagonal() + spec.max_approach_distance());
}

Projection project_direct(const Genome& genome, const TriangleMesh& mesh,
                          const GripperSpec& spec) {
  check_length(genome, spec);
  const auto& v = genome.values;
  const double rho = denormalize(v[0], 0.0, direct_max_radius(mesh, spec));
  const double polar = denormalize(v[1], 0.0, M_PI);
  const double azimuth = denormalize(v[2], 0.0, kTwoPi);
  const Vec3 dir(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                 std::cos(polar));
  const Mat3 r = euler_zyx(denormalize(v[3], 0.0, kTwoPi), denormalize(v[4], 0.0, kTwoPi),
                           denormalize(v[5], 0.0, kTwoPi));
  Projection out;
  GraspPose pose;
  pose.position = mesh.bounding_box().center() + rho * dir;
  pose.orientation = Quat(r).normalized();
  decode_tail(genome, spec, pose);
  out.pose = pose;
  return out;
}

Projection project(const Genome& genome, const TriangleMesh& mesh, const SurfaceSampleSet& sset,
                   const GripperSpec& spec) {
  switch (genome.prior) {
    case Prior::kApproach:
      return project_approach(genome, mesh, sset, spec, kApproachConeHalfAperture);
    case Prior::kContact:
      return project_approach(genome, mesh, sset, spec, kContactConeHalfAperture);
    case Prior::kAntipodal: return project_antipodal(genome, mesh, sset, spec);
    case Prior::kDirect: return project_direct(genome, mesh, spec);
  }
  throw std::invalid_argument("unknown prior");
}

}  // namespace graspqd
