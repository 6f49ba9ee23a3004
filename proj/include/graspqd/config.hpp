#pragma once

#include "graspqd/qd.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspqd {

/// Invalid configuration. `key()` is the offending "section.key" (may be
/// empty for syntax errors that are not tied to a key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  std::string mesh = "builtin:sphere";
  double mesh_scale = 1.0;

  std::string gripper = "panda";
  std::optional<double> max_aperture;
  std::optional<double> finger_length;
  std::optional<double> finger_radius;

  Prior prior = Prior::kContact;
  Algorithm algorithm = Algorithm::kMeScs;
  FitnessMode fitness = FitnessMode::kShake;

  QDConfig qd;
  PhysicsParams physics;
  MdrParams mdr;

  int surface_samples = 4096;
  std::uint64_t sample_seed = 0;

  std::string output_dir;  // empty: GRASPQD_OUTPUT_ROOT, then "runs"
  std::string name;        // empty: derived from prior, algorithm and mesh
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};

  /// Throws ConfigError naming the first offending key.
  void validate() const;
  /// Gripper preset with the configured overrides applied.
  GripperSpec gripper_spec() const;
  /// `name` or "<prior>_<algorithm>_<mesh stem>".
  std::string run_name() const;
};

/// Sets "section.key" from its textual value; throws ConfigError.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);
/// Every recognised "section.key", in serialization order.
std::vector<std::string> config_keys();

/// INI-like text: "[section]" headers, "key = value" lines, '#' or ';'
/// comments. Unknown sections or keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Fully resolved config; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

}  // namespace graspqd
