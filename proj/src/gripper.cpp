#include "graspqd/gripper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graspqd {

namespace {

constexpr double kTranslationStep = 1e-3;
constexpr double kRotationStep = 0.5 * M_PI / 180.0;
constexpr double kRefineTolerance = 1e-5;

}  // namespace

GripperFrame GripperFrame::from_pose(const Vec3& origin, const Quat& q) {
  const Mat3 r = q.normalized().toRotationMatrix();
  return {origin, r.col(0), r.col(1), r.col(2)};
}

void GripperSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("gripper: " + what); };
  if (n_fingers < 2) fail("n_fingers must be >= 2");
  if (!(max_aperture > 0.0)) fail("max_aperture must be positive");
  if (!(finger_length > 0.0)) fail("finger_length must be positive");
  if (!(finger_radius > 0.0)) fail("finger_radius must be positive");
  if ((palm_half_extents.array() <= 0.0).any()) fail("palm dimensions must be positive");
  if (synergies.empty()) fail("synergy table must be nonempty");
  for (const auto& s : synergies) {
    if (s.empty()) fail("synergy subsets must be nonempty");
    for (int f : s) {
      if (f < 0 || f >= n_fingers) fail("synergy finger index out of range");
    }
  }
  if (joint_ranges.size() != free_joint_fingers.size()) {
    fail("joint_ranges must match free_joint_fingers");
  }
  for (std::size_t i = 0; i < joint_ranges.size(); ++i) {
    if (!(joint_ranges[i].lo <= joint_ranges[i].hi)) fail("joint range lo > hi");
    if (free_joint_fingers[i] < 0 || free_joint_fingers[i] >= n_fingers) {
      fail("free joint finger index out of range");
    }
  }
  if (family == GripperFamily::kParallelJaw) {
    if (n_fingers != 2) fail("parallel_jaw requires n_fingers = 2");
    if (synergies.size() != 1 || synergies[0].size() != 2) {
      fail("parallel_jaw requires a single synergy closing both fingers");
    }
    if (!free_joint_fingers.empty()) fail("parallel_jaw has no free joints");
  } else {
    if (static_cast<int>(finger_azimuths.size()) != n_fingers) {
      fail("finger_azimuths must have n_fingers entries");
    }
    if (!(palm_radius > 0.0) || !(proximal_length > 0.0) || !(distal_length > 0.0)) {
      fail("radial finger dimensions must be positive");
    }
    if (!(open_angle < close_angle)) fail("open_angle must be below close_angle");
  }
}

GripperSpec gripper_preset(const std::string& name) {
  GripperSpec s;
  s.name = name;
  if (name == "panda") return s;

  s.family = GripperFamily::kRadialNFinger;
  const std::vector<std::vector<int>> hand_synergies = {{0, 1}, {0, 2}, {0, 1, 2}};
  if (name == "barrett3") {
    s.n_fingers = 3;
    s.palm_radius = 0.025;
    s.finger_azimuths = {M_PI, -0.45, 0.45};
    s.proximal_length = 0.07;
    s.distal_length = 0.056;
    s.finger_radius = 0.01;
    s.palm_half_extents = Vec3(0.045, 0.025, 0.045);
    s.synergies = {{0, 1, 2}};
    s.free_joint_fingers = {1, 2};
    s.joint_ranges = {{-M_PI / 2, M_PI / 2}, {-M_PI / 2, M_PI / 2}};
  } else if (name == "allegro4") {
    s.n_fingers = 4;
    s.palm_radius = 0.03;
    s.finger_azimuths = {M_PI, -0.5, 0.0, 0.5};
    s.proximal_length = 0.055;
    s.distal_length = 0.045;
    s.finger_radius = 0.0095;
    s.palm_half_extents = Vec3(0.05, 0.025, 0.05);
    s.synergies = hand_synergies;
    s.synergies.push_back({0, 1, 2, 3});
  } else if (name == "shadow5") {
    s.n_fingers = 5;
    s.palm_radius = 0.032;
    s.finger_azimuths = {M_PI, -0.6, -0.2, 0.2, 0.6};
    s.proximal_length = 0.045;
    s.distal_length = 0.04;
    s.finger_radius = 0.009;
    s.palm_half_extents = Vec3(0.05, 0.02, 0.05);
    s.synergies = hand_synergies;
    s.synergies.push_back({0, 1, 2, 3, 4});
  } else {
    throw std::invalid_argument("unknown gripper preset: " + name);
  }
  s.finger_length = s.proximal_length + s.distal_length;
  s.max_aperture = 2.0 * (s.palm_radius + s.finger_length * std::sin(-s.open_angle));
  s.max_aperture = std::max(s.max_aperture, 2.0 * s.palm_radius);
  return s;
}

std::vector<std::string> gripper_preset_names() {
  return {"panda", "barrett3", "allegro4", "shadow5"};
}

int ClosureResult::contact_count() const {
  return static_cast<int>(std::count_if(fingers.begin(), fingers.end(),
                                        [](const FingerState& f) { return f.in_contact; }));
}

GripperFrame palm_frame_from_approach(const Vec3& ref_point, const Vec3& surface_normal,
                                      double distance, double nu, double xi, double omega) {
  const Vec3 n = surface_normal.normalized();
  const Vec3 t1 = any_orthogonal(n);
  const Vec3 t2 = n.cross(t1);
  const Vec3 tilt = std::cos(xi) * t1 + std::sin(xi) * t2;
  const Vec3 approach = (std::cos(nu) * n + std::sin(nu) * tilt).normalized();
  const Vec3 side = n.cross(tilt);  // orthogonal to both n and approach

  GripperFrame f;
  f.y = -approach;
  f.x = (std::cos(omega) * side + std::sin(omega) * f.y.cross(side)).normalized();
  f.z = f.x.cross(f.y);
  f.origin = ref_point + distance * approach;
  return f;
}

Box palm_box(const GripperSpec& spec, const GripperFrame& frame) {
  return {frame.origin - spec.palm_half_extents.y() * frame.y, frame.rotation(),
          spec.palm_half_extents};
}

namespace {

double free_joint_yaw(const GripperSpec& spec, int finger, const std::vector<double>& joints) {
  for (std::size_t j = 0; j < spec.free_joint_fingers.size(); ++j) {
    if (spec.free_joint_fingers[j] == finger && j < joints.size()) return joints[j];
  }
  return 0.0;
}

// Largest displacement of any finger surface point per unit of closure.
double closure_speed(const GripperSpec& spec) {
  if (spec.family == GripperFamily::kParallelJaw) return 0.5 * spec.max_aperture;
  const double reach = spec.proximal_length + spec.distal_length + spec.finger_radius;
  return (spec.close_angle - spec.open_angle) * reach +
         spec.distal_max * (spec.distal_length + spec.finger_radius);
}

double closure_step(const GripperSpec& spec) {
  if (spec.family == GripperFamily::kParallelJaw) return kTranslationStep / (0.5 * spec.max_aperture);
  return kRotationStep / (spec.close_angle - spec.open_angle);
}

double links_distance(const std::vector<Capsule>& links, const TriangleMesh& mesh,
                      ClosestHit* hit) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& l : links) {
    const ClosestHit h = mesh.closest_to_segment(l.a, l.b);
    const double d = h.distance - l.radius;
    if (d < best) {
      best = d;
      if (hit) *hit = h;
    }
  }
  return best;
}

}  // namespace

std::vector<Capsule> finger_links(const GripperSpec& spec, const GripperFrame& frame, int finger,
                                  double closure, const std::vector<double>& init_joints) {
  const double r = spec.finger_radius;
  if (spec.family == GripperFamily::kParallelJaw) {
    const double side = finger == 0 ? 1.0 : -1.0;
    const double offset = 0.5 * spec.max_aperture * (1.0 - closure) + r;
    const Vec3 base = frame.origin + side * offset * frame.x;
    return {{base + r * frame.y, base + (spec.finger_length - r) * frame.y, r}};
  }
  const double az = spec.finger_azimuths[finger];
  const Vec3 radial0 = std::cos(az) * frame.x + std::sin(az) * frame.z;
  const Vec3 base = frame.origin + spec.palm_radius * radial0;
  const double yaw = free_joint_yaw(spec, finger, init_joints);
  const Vec3 radial = std::cos(yaw) * radial0 + std::sin(yaw) * frame.y.cross(radial0);
  const double q1 = spec.open_angle + closure * (spec.close_angle - spec.open_angle);
  const double q2 = q1 + closure * spec.distal_max;
  const Vec3 d1 = std::cos(q1) * frame.y - std::sin(q1) * radial;
  const Vec3 d2 = std::cos(q2) * frame.y - std::sin(q2) * radial;
  const Vec3 joint = base + spec.proximal_length * d1;
  return {{base, joint, r}, {joint, joint + spec.distal_length * d2, r}};
}

bool gripper_overlaps(const GripperSpec& spec, const GripperFrame& frame,
                      const std::vector<double>& init_joints, const TriangleMesh& mesh) {
  if (mesh.intersects(palm_box(spec, frame))) return true;
  for (int f = 0; f < spec.n_fingers; ++f) {
    for (const auto& link : finger_links(spec, frame, f, 0.0, init_joints)) {
      if (mesh.intersects(link)) return true;
    }
  }
  return false;
}

ClosureResult close_fingers(const GripperSpec& spec, const GripperFrame& frame, int synergy_id,
                            const std::vector<double>& init_joints, const TriangleMesh& mesh) {
  ClosureResult result;
  result.fingers.resize(spec.n_fingers);
  // Intersection rather than distance, so fingers buried inside count too.
  for (int f = 0; f < spec.n_fingers; ++f) {
    for (const auto& link : finger_links(spec, frame, f, 0.0, init_joints)) {
      if (mesh.intersects(link)) {
        result.initial_penetration = true;
        return result;
      }
    }
  }

  const double speed = closure_speed(spec);
  const double step = closure_step(spec);
  const int n_steps = static_cast<int>(std::ceil(1.0 / step - 1e-9));
  auto config = [&](int k) { return std::min(1.0, k * step); };

  for (int f : spec.synergies.at(synergy_id)) {
    FingerState& state = result.fingers[f];
    int k = 0;
    double clear = links_distance(finger_links(spec, frame, f, 0.0, init_joints), mesh, nullptr);
    int hit_step = -1;
    while (k < n_steps) {
      // Grid configurations closer than the clearance allows are skipped;
      // the first one not provably clear is tested.
      const double safe = config(k) + clear / speed;
      int next = k + 1;
      while (next < n_steps && config(next) < safe) ++next;
      clear = links_distance(finger_links(spec, frame, f, config(next), init_joints), mesh,
                             nullptr);
      if (clear <= 0.0) {
        hit_step = next;
        break;
      }
      k = next;
    }
    if (hit_step < 0) {
      state.closure = 1.0;
      continue;
    }
    double lo = config(hit_step - 1);
    double hi = config(hit_step);
    while ((hi - lo) * speed > kRefineTolerance) {
      const double mid = 0.5 * (lo + hi);
      if (links_distance(finger_links(spec, frame, f, mid, init_joints), mesh, nullptr) <= 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    ClosestHit hit;
    links_distance(finger_links(spec, frame, f, lo, init_joints), mesh, &hit);
    state.closure = lo;
    state.in_contact = true;
    state.contact_point = hit.on_mesh;
    const Vec3 dir = hit.on_query - hit.on_mesh;
    state.contact_normal = dir.norm() > 1e-12 ? dir.normalized()
                                              : mesh.normals()[hit.triangle_id];
  }
  return result;
}

}  // namespace graspqd
