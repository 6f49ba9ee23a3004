#include "graspqd/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace graspqd {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json header(const char* schema) { return {{"schema", schema}, {"version", kSchemaVersion}}; }

void check_header(const json& h, const char* schema, const fs::path& path) {
  if (!h.is_object() || h.value("schema", "") != schema) {
    throw IoError(path.string() + ": not a " + schema + " file");
  }
  if (h.value("version", -1) != kSchemaVersion) {
    throw IoError(path.string() + ": unsupported " + schema + " version " +
                  std::to_string(h.value("version", -1)));
  }
}

// Reads newline-delimited JSON, checking the header line.
std::vector<json> read_ndjson(const fs::path& path, const char* schema, json* head) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<json> rows;
  bool first = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (first) {
      check_header(j, schema, path);
      if (head) *head = j;
      first = false;
    } else {
      rows.push_back(std::move(j));
    }
  }
  if (first) throw IoError(path.string() + ": empty file");
  return rows;
}

std::string ndjson_text(const json& head, const std::vector<json>& rows) {
  std::string out = head.dump() + "\n";
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

Genome genome_from(const json& j, Prior prior) {
  return {j.get<std::vector<double>>(), prior};
}

// JSON type errors from malformed rows are reported as IoError.
template <typename F>
auto guarded(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": malformed record: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("error writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_outcome_archive(const fs::path& path, const OutcomeArchive& archive) {
  json head = header(kOutcomeSchema);
  head["prior"] = to_string(archive.prior);
  head["total_evaluations"] = archive.total_evaluations;
  std::vector<json> rows;
  rows.reserve(archive.records.size());
  for (const auto& r : archive.records) {
    const Quat& q = r.pose.orientation;
    rows.push_back({{"eval_index", r.eval_index},
                    {"position", vec3_json(r.pose.position)},
                    {"quaternion", {q.x(), q.y(), q.z(), q.w()}},
                    {"synergy_id", r.pose.synergy_id},
                    {"init_joints", r.pose.init_joints},
                    {"fitness", r.fitness},
                    {"nu", r.nu ? json(*r.nu) : json(nullptr)},
                    {"genome", r.genome.values}});
  }
  write_text_file(path, ndjson_text(head, rows));
}

OutcomeArchive read_outcome_archive(const fs::path& path) {
  json head;
  const auto rows = read_ndjson(path, kOutcomeSchema, &head);
  return guarded(path, [&] {
    OutcomeArchive archive;
    archive.prior = prior_from_string(head.at("prior").get<std::string>());
    archive.total_evaluations = head.at("total_evaluations").get<std::int64_t>();
    for (const auto& j : rows) {
      OutcomeRecord r;
      r.eval_index = j.at("eval_index").get<std::int64_t>();
      r.pose.position = vec3_from(j.at("position"));
      const auto& q = j.at("quaternion");
      if (q.size() != 4) throw IoError(path.string() + ": quaternion needs 4 values");
      r.pose.orientation = Quat(q[3].get<double>(), q[0].get<double>(), q[1].get<double>(),
                                q[2].get<double>());
      r.pose.synergy_id = j.at("synergy_id").get<int>();
      r.pose.init_joints = j.at("init_joints").get<std::vector<double>>();
      r.fitness = j.at("fitness").get<double>();
      if (!j.at("nu").is_null()) r.nu = j.at("nu").get<double>();
      r.genome = genome_from(j.at("genome"), archive.prior);
      // The behavior descriptor is the gripper position.
      r.behavior = r.pose.position;
      archive.records.push_back(std::move(r));
    }
    return archive;
  });
}

void write_eval_log(const fs::path& path, const std::vector<EvalRecord>& log, Prior prior) {
  json head = header(kEvalLogSchema);
  head["prior"] = to_string(prior);
  std::vector<json> rows;
  rows.reserve(log.size());
  for (const auto& e : log) {
    rows.push_back({{"eval_index", e.eval_index},
                    {"valid", e.valid},
                    {"rejected", e.rejected},
                    {"fitness", e.fitness},
                    {"behavior", vec3_json(e.behavior)},
                    {"genome", e.genome.values}});
  }
  write_text_file(path, ndjson_text(head, rows));
}

std::vector<EvalRecord> read_eval_log(const fs::path& path) {
  json head;
  const auto rows = read_ndjson(path, kEvalLogSchema, &head);
  return guarded(path, [&] {
    const Prior prior = prior_from_string(head.at("prior").get<std::string>());
    std::vector<EvalRecord> log;
    log.reserve(rows.size());
    for (const auto& j : rows) {
      EvalRecord e;
      e.eval_index = j.at("eval_index").get<std::int64_t>();
      e.valid = j.at("valid").get<bool>();
      e.rejected = j.at("rejected").get<bool>();
      e.fitness = j.at("fitness").get<double>();
      e.behavior = vec3_from(j.at("behavior"));
      e.genome = genome_from(j.at("genome"), prior);
      log.push_back(std::move(e));
    }
    return log;
  });
}

void write_behavior_grid(const fs::path& path, const BehaviorGrid& grid, Prior prior) {
  json head = header(kGridSchema);
  head["prior"] = to_string(prior);
  head["bounds_min"] = vec3_json(grid.bounds().lo);
  head["bounds_max"] = vec3_json(grid.bounds().hi);
  head["cell_size"] = grid.cell_size();
  head["dims"] = {grid.dims().x(), grid.dims().y(), grid.dims().z()};
  std::vector<json> rows;
  for (const auto& [cell, e] : grid.elites()) {
    rows.push_back({{"cell", cell},
                    {"eval_index", e.eval_index},
                    {"fitness", e.fitness},
                    {"behavior", vec3_json(e.behavior)},
                    {"genome", e.genome.values}});
  }
  write_text_file(path, ndjson_text(head, rows));
}

BehaviorGrid read_behavior_grid(const fs::path& path) {
  json head;
  const auto rows = read_ndjson(path, kGridSchema, &head);
  return guarded(path, [&] {
    const Prior prior = prior_from_string(head.at("prior").get<std::string>());
    Aabb bounds;
    bounds.lo = vec3_from(head.at("bounds_min"));
    bounds.hi = vec3_from(head.at("bounds_max"));
    BehaviorGrid grid(bounds, head.at("cell_size").get<double>());
    for (const auto& j : rows) {
      Elite e;
      e.eval_index = j.at("eval_index").get<std::int64_t>();
      e.fitness = j.at("fitness").get<double>();
      e.behavior = vec3_from(j.at("behavior"));
      e.genome = genome_from(j.at("genome"), prior);
      if (grid.cell_of(e.behavior) != j.at("cell").get<std::int64_t>()) {
        throw IoError(path.string() + ": elite behavior does not match its cell");
      }
      grid.insert(e);
    }
    return grid;
  });
}

void write_coverage_csv(const fs::path& path, const CoverageCurve& curve) {
  std::string out = "# schema=graspqd.coverage version=" + std::to_string(kSchemaVersion) + "\n";
  out += "eval_index,coverage\n";
  char buf[64];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const bool changed = i == 0 || curve[i].coverage != curve[i - 1].coverage;
    if (!changed && i + 1 != curve.size()) continue;
    std::snprintf(buf, sizeof(buf), "%lld,%.17g\n", static_cast<long long>(curve[i].eval_index),
                  curve[i].coverage);
    out += buf;
  }
  write_text_file(path, out);
}

CoverageCurve read_coverage_csv(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  const std::string expected =
      "# schema=graspqd.coverage version=" + std::to_string(kSchemaVersion);
  if (!std::getline(in, line) || line != expected) {
    throw IoError(path.string() + ": not a graspqd.coverage version " +
                  std::to_string(kSchemaVersion) + " file");
  }
  if (!std::getline(in, line) || line != "eval_index,coverage") {
    throw IoError(path.string() + ": missing coverage column header");
  }
  CoverageCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument(line);
      curve.push_back({std::stoll(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      throw IoError(path.string() + ": malformed coverage row '" + line + "'");
    }
  }
  return curve;
}

void write_histogram_csv(const fs::path& path, const Histogram& histogram) {
  std::string out = "# schema=graspqd.nu_histogram version=" + std::to_string(kSchemaVersion) + "\n";
  out += "bin_lo,bin_hi,mass\n";
  const double width = (histogram.hi - histogram.lo) / histogram.mass.size();
  char buf[96];
  for (std::size_t b = 0; b < histogram.mass.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", histogram.lo + b * width,
                  histogram.lo + (b + 1) * width, histogram.mass[b]);
    out += buf;
  }
  write_text_file(path, out);
}

void write_voxels_json(const fs::path& path, const std::map<Voxel, double>& heatmap,
                       double step) {
  json j = header(kVoxelSchema);
  j["step"] = step;
  json voxels = json::array();
  for (const auto& [v, fitness] : heatmap) {
    voxels.push_back({{"voxel", {v[0], v[1], v[2]}}, {"max_fitness", fitness}});
  }
  j["voxels"] = std::move(voxels);
  write_text_file(path, j.dump(1) + "\n");
}

}  // namespace graspqd
