#include "graspqd/config.hpp"
#include "graspqd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace graspqd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Shortest decimal text that parses back to the same double.
std::string format_double(double x) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || end != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "not a valid number: '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& key, const std::string& text) {
  const double v = parse_number<double>(key, text);
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    seeds.push_back(parse_number<std::uint64_t>(key, item));
  }
  return seeds;
}

std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(seeds[i]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <typename T>
Field number_field(std::string key, T RunConfig::*member) {
  return {key, [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
            else return std::to_string(c.*member);
          },
          [member](RunConfig& c, const std::string& k, const std::string& v) {
            if constexpr (std::is_floating_point_v<T>) c.*member = parse_real(k, v);
            else c.*member = parse_number<T>(k, v);
          }};
}

template <typename S, typename T>
Field nested_field(std::string key, S RunConfig::*outer, T S::*member) {
  return {key, [outer, member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) return format_double(c.*outer.*member);
            else return std::to_string(c.*outer.*member);
          },
          [outer, member](RunConfig& c, const std::string& k, const std::string& v) {
            if constexpr (std::is_floating_point_v<T>) c.*outer.*member = parse_real(k, v);
            else c.*outer.*member = parse_number<T>(k, v);
          }};
}

Field optional_field(std::string key, std::optional<double> RunConfig::*member) {
  return {key, [member](const RunConfig& c) {
            return (c.*member) ? format_double(*(c.*member)) : std::string();
          },
          [member](RunConfig& c, const std::string& k, const std::string& v) {
            if (trim(v).empty()) {
              c.*member = std::nullopt;
            } else {
              c.*member = parse_real(k, v);
            }
          }};
}

Field string_field(std::string key, std::string RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return c.*member; },
          [member](RunConfig& c, const std::string&, const std::string& v) { c.*member = trim(v); }};
}

// Parses an enum through its from_string function, reporting the key.
template <typename E>
Field enum_field(std::string key, E RunConfig::*member, E (*from)(const std::string&),
                 std::string (*to)(E)) {
  return {key, [member, to](const RunConfig& c) { return to(c.*member); },
          [member, from](RunConfig& c, const std::string& k, const std::string& v) {
            try {
              c.*member = from(trim(v));
            } catch (const std::invalid_argument& e) {
              throw ConfigError(k, e.what());
            }
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(string_field("mesh.path", &RunConfig::mesh));
    f.push_back(number_field("mesh.scale", &RunConfig::mesh_scale));
    f.push_back(string_field("gripper.preset", &RunConfig::gripper));
    f.push_back(optional_field("gripper.max_aperture", &RunConfig::max_aperture));
    f.push_back(optional_field("gripper.finger_length", &RunConfig::finger_length));
    f.push_back(optional_field("gripper.finger_radius", &RunConfig::finger_radius));
    f.push_back(enum_field<Prior>("search.prior", &RunConfig::prior, prior_from_string, to_string));
    f.push_back(enum_field<Algorithm>("search.algorithm", &RunConfig::algorithm,
                                      algorithm_from_string, to_string));
    f.push_back(enum_field<FitnessMode>("search.fitness", &RunConfig::fitness,
                                        fitness_mode_from_string, to_string));
    f.push_back(nested_field("qd.population", &RunConfig::qd, &QDConfig::population));
    f.push_back(nested_field("qd.offspring", &RunConfig::qd, &QDConfig::offspring));
    f.push_back(nested_field("qd.novelty_neighbors", &RunConfig::qd, &QDConfig::novelty_neighbors));
    f.push_back(nested_field("qd.budget", &RunConfig::qd, &QDConfig::budget));
    f.push_back(nested_field("qd.gene_mutation_probability", &RunConfig::qd,
                             &QDConfig::gene_mutation_probability));
    f.push_back(nested_field("qd.mutation_sigma", &RunConfig::qd, &QDConfig::mutation_sigma));
    f.push_back(nested_field("qd.emitter_batch", &RunConfig::qd, &QDConfig::emitter_batch));
    f.push_back(nested_field("qd.emitters", &RunConfig::qd, &QDConfig::emitters));
    f.push_back(nested_field("qd.threshold_min", &RunConfig::qd, &QDConfig::threshold_min));
    f.push_back(nested_field("qd.archive_learning_rate", &RunConfig::qd,
                             &QDConfig::archive_learning_rate));
    f.push_back(nested_field("qd.cma_sigma0", &RunConfig::qd, &QDConfig::cma_sigma0));
    f.push_back(nested_field("qd.cell_size", &RunConfig::qd, &QDConfig::cell_size));
    f.push_back(nested_field("qd.workers", &RunConfig::qd, &QDConfig::workers));
    f.push_back(nested_field("physics.friction", &RunConfig::physics, &PhysicsParams::friction));
    f.push_back(nested_field("physics.density", &RunConfig::physics, &PhysicsParams::density));
    f.push_back(nested_field("physics.gravity", &RunConfig::physics, &PhysicsParams::gravity));
    f.push_back(nested_field("physics.shake_translation", &RunConfig::physics,
                             &PhysicsParams::shake_translation));
    f.push_back(nested_field("physics.shake_rotation", &RunConfig::physics,
                             &PhysicsParams::shake_rotation));
    f.push_back(nested_field("physics.cone_edges", &RunConfig::physics, &PhysicsParams::cone_edges));
    f.push_back(nested_field("physics.torsional_friction", &RunConfig::physics,
                             &PhysicsParams::torsional_friction));
    f.push_back(nested_field("mdr.trials", &RunConfig::mdr, &MdrParams::trials));
    f.push_back(nested_field("mdr.sigma_position", &RunConfig::mdr, &MdrParams::sigma_position));
    f.push_back(nested_field("mdr.sigma_orientation", &RunConfig::mdr,
                             &MdrParams::sigma_orientation));
    f.push_back(nested_field("mdr.sigma_friction", &RunConfig::mdr, &MdrParams::sigma_friction));
    f.push_back(number_field("sampling.surface_samples", &RunConfig::surface_samples));
    f.push_back(number_field("sampling.seed", &RunConfig::sample_seed));
    f.push_back(string_field("output.dir", &RunConfig::output_dir));
    f.push_back(string_field("output.name", &RunConfig::name));
    f.push_back({"run.seeds", [](const RunConfig& c) { return join_seeds(c.seeds); },
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                   c.seeds = parse_seeds(k, v);
                 }});
    return f;
  }();
  return table;
}

const Field& find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError(key, "unknown configuration key");
}

// Sub-validators report "section.key must ..."; recover the key.
[[noreturn]] void rethrow_keyed(const std::invalid_argument& e) {
  const std::string msg = e.what();
  const auto space = msg.find(' ');
  const std::string key = msg.substr(0, space);
  if (space != std::string::npos && key.find('.') != std::string::npos) {
    throw ConfigError(key, msg.substr(space + 1));
  }
  throw ConfigError("", msg);
}

}  // namespace

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  find_field(key).set(config, key, value);
}

std::string get_config_value(const RunConfig& config, const std::string& key) {
  return find_field(key).get(config);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

GripperSpec RunConfig::gripper_spec() const {
  GripperSpec spec;
  try {
    spec = gripper_preset(gripper);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gripper.preset", e.what());
  }
  if (max_aperture) spec.max_aperture = *max_aperture;
  if (finger_length) spec.finger_length = *finger_length;
  if (finger_radius) spec.finger_radius = *finger_radius;
  return spec;
}

std::string RunConfig::run_name() const {
  if (!name.empty()) return name;
  std::string stem = mesh;
  if (stem.rfind("builtin:", 0) == 0) {
    stem = stem.substr(8);
  } else {
    stem = std::filesystem::path(stem).stem().string();
  }
  return to_string(prior) + "_" + to_string(algorithm) + "_" + stem;
}

void RunConfig::validate() const {
  if (mesh.empty()) throw ConfigError("mesh.path", "must not be empty");
  if (!(mesh_scale > 0.0)) throw ConfigError("mesh.scale", "must be > 0");
  const GripperSpec spec = gripper_spec();
  if (max_aperture && !(*max_aperture > 0.0)) {
    throw ConfigError("gripper.max_aperture", "must be > 0");
  }
  if (finger_length && !(*finger_length > 0.0)) {
    throw ConfigError("gripper.finger_length", "must be > 0");
  }
  if (finger_radius && !(*finger_radius > 0.0)) {
    throw ConfigError("gripper.finger_radius", "must be > 0");
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gripper.preset", e.what());
  }
  if (prior == Prior::kAntipodal && spec.family != GripperFamily::kParallelJaw) {
    throw ConfigError("search.prior",
                      "antipodal prior requires a parallel_jaw gripper, got '" + spec.name + "'");
  }
  try {
    qd.validate();
    physics.validate();
  } catch (const std::invalid_argument& e) {
    rethrow_keyed(e);
  }
  if (mdr.trials < 1) throw ConfigError("mdr.trials", "must be >= 1");
  if (!(mdr.sigma_position >= 0.0)) throw ConfigError("mdr.sigma_position", "must be >= 0");
  if (!(mdr.sigma_orientation >= 0.0)) throw ConfigError("mdr.sigma_orientation", "must be >= 0");
  if (!(mdr.sigma_friction >= 0.0)) throw ConfigError("mdr.sigma_friction", "must be >= 0");
  if (surface_samples < 1) throw ConfigError("sampling.surface_samples", "must be >= 1");
  if (seeds.empty()) throw ConfigError("run.seeds", "must list at least one seed");
  const std::string n = run_name();
  if (n.find('/') != std::string::npos || n == "." || n == "..") {
    throw ConfigError("output.name", "must be a plain directory name");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("", "line " + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    if (section.empty()) {
      throw ConfigError(trim(t.substr(0, eq)),
                        "line " + std::to_string(line_no) + ": key outside of a section");
    }
    set_config_value(config, section + "." + trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string s = f.key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << "\n";
      out << "[" << s << "]\n";
      section = s;
    }
    const std::string value = f.get(config);
    // Unset optional overrides are written as comments so that the text
    // still documents them.
    if (value.empty() && f.key.rfind("gripper.", 0) == 0) {
      out << "# " << f.key.substr(dot + 1) << " =\n";
    } else {
      out << f.key.substr(dot + 1) << " = " << value << "\n";
    }
  }
  return out.str();
}

}  // namespace graspqd
