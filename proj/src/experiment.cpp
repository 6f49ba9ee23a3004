#include "graspqd/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace graspqd {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string hash_hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::uint64_t parse_hash(const std::string& text) {
  try {
    std::size_t used = 0;
    const std::uint64_t h = std::stoull(text, &used, 16);
    if (used == text.size()) return h;
  } catch (const std::exception&) {
  }
  throw IoError("malformed mesh hash '" + text + "'");
}

fs::path seed_dir(const fs::path& run_dir, std::uint64_t seed) {
  return run_dir / ("seed_" + std::to_string(seed));
}

bool records_nu(const OutcomeArchive& archive) {
  return std::any_of(archive.records.begin(), archive.records.end(),
                     [](const OutcomeRecord& r) { return r.fitness > 0.0 && r.nu.has_value(); });
}

json gripper_json(const GripperSpec& s) {
  return {{"name", s.name},
          {"family", s.family == GripperFamily::kParallelJaw ? "parallel_jaw" : "radial_n_finger"},
          {"n_fingers", s.n_fingers},
          {"max_aperture", s.max_aperture},
          {"finger_length", s.finger_length},
          {"finger_radius", s.finger_radius},
          {"synergies", s.synergies}};
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

const char* version() { return GRASPQD_VERSION; }

Scene load_scene(const RunConfig& config) {
  config.validate();
  TriangleMesh mesh = [&] {
    try {
      return load_mesh_source(config.mesh, config.mesh_scale);
    } catch (const MeshError& e) {
      // Unknown builtins are configuration mistakes; unreadable files are IO.
      if (config.mesh.rfind("builtin:", 0) == 0) throw ConfigError("mesh.path", e.what());
      throw IoError(e.what());
    }
  }();
  SurfaceSampleSet samples = sample_surface(mesh, config.surface_samples, config.sample_seed);
  return {std::move(mesh), std::move(samples), config.gripper_spec()};
}

RunResult run_seed(const RunConfig& config, const Scene& scene, std::uint64_t seed) {
  SearchProblem problem{scene.mesh, scene.samples, scene.spec, config.physics,
                        config.prior, config.fitness, config.mdr};
  QDConfig qd = config.qd;
  qd.seed = seed;
  return run_search(config.algorithm, problem, qd);
}

fs::path output_root(const RunConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("GRASPQD_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

fs::path run_experiment(const RunConfig& config, std::ostream* progress) {
  config.validate();
  const fs::path dir = output_root(config) / config.run_name();
  if (fs::exists(dir / "metadata.json")) {
    throw IoError(dir.string() + " already holds a run; choose another output.name");
  }
  const Scene scene = load_scene(config);
  make_dirs(dir);
  write_text_file(dir / "config.ini", serialize_config(config));

  const double step = config.qd.cell_size;
  std::vector<OutcomeArchive> archives;
  json per_seed = json::array();
  for (std::uint64_t seed : config.seeds) {
    if (progress) *progress << "[" << config.run_name() << "] seed " << seed << " ..." << std::flush;
    RunResult result = run_seed(config, scene, seed);
    const fs::path sdir = seed_dir(dir, seed);
    make_dirs(sdir);
    write_outcome_archive(sdir / "outcomes.ndjson", result.outcome);
    write_eval_log(sdir / "eval_log.ndjson", result.log, config.prior);
    write_behavior_grid(sdir / "grid.ndjson", result.grid, config.prior);
    write_voxels_json(sdir / "voxels.json", voxel_heatmap(result.outcome, step), step);
    if (records_nu(result.outcome)) {
      write_histogram_csv(sdir / "nu_histogram.csv", nu_histogram(result.outcome, 36));
    }
    std::int64_t valid = 0;
    for (const auto& e : result.log) valid += e.valid;
    const auto successes = std::count_if(result.outcome.records.begin(), result.outcome.records.end(),
                                         [](const OutcomeRecord& r) { return r.fitness > 0.0; });
    per_seed.push_back({{"seed", seed},
                        {"evaluations", result.outcome.total_evaluations},
                        {"valid", valid},
                        {"successes", successes},
                        {"grid_elites", result.grid.size()},
                        {"voxels", build_reference_set({&result.outcome}, step).size()},
                        {"restarts", result.restarts}});
    if (progress) *progress << " " << successes << " successful grasps\n";
    archives.push_back(std::move(result.outcome));
  }

  // Coverage of each seed against the union of this run's seeds.
  std::vector<const OutcomeArchive*> pointers;
  for (const auto& a : archives) pointers.push_back(&a);
  const ReferenceGraspSet ref = build_reference_set(pointers, step);
  for (std::size_t i = 0; i < archives.size(); ++i) {
    const fs::path path = seed_dir(dir, config.seeds[i]) / "coverage.csv";
    if (ref.size() == 0) {
      CoverageCurve zero;
      for (std::int64_t k = 0; k < archives[i].total_evaluations; ++k) zero.push_back({k, 0.0});
      write_coverage_csv(path, zero);
      per_seed[i]["self_coverage"] = 0.0;
    } else {
      write_coverage_csv(path, coverage_curve(archives[i], ref, step));
      per_seed[i]["self_coverage"] = final_coverage(archives[i], ref, step);
    }
  }

  json meta = {{"schema", kRunSchema},
               {"version", kSchemaVersion},
               {"code_version", version()},
               {"name", config.run_name()},
               {"config", serialize_config(config)},
               {"mesh", {{"source", config.mesh},
                         {"scale", config.mesh_scale},
                         {"hash", hash_hex(scene.mesh.content_hash())},
                         {"triangles", scene.mesh.triangles().size()}}},
               {"gripper", gripper_json(scene.spec)},
               {"seeds", config.seeds},
               {"reference_voxels", ref.size()},
               {"per_seed", per_seed}};
  // Written last: its presence marks a complete run.
  write_text_file(dir / "metadata.json", meta.dump(2) + "\n");
  return dir;
}

LoadedRun load_run(const fs::path& dir) {
  const fs::path meta_path = dir / "metadata.json";
  json meta;
  try {
    meta = json::parse(read_text_file(meta_path));
  } catch (const json::parse_error& e) {
    throw IoError(meta_path.string() + ": " + e.what());
  }
  if (meta.value("schema", "") != kRunSchema || meta.value("version", -1) != kSchemaVersion) {
    throw IoError(meta_path.string() + ": not a graspqd.run version " +
                  std::to_string(kSchemaVersion) + " file");
  }
  LoadedRun run;
  run.dir = dir;
  try {
    run.name = meta.at("name").get<std::string>();
    run.config = parse_config(meta.at("config").get<std::string>());
    run.mesh_hash = parse_hash(meta.at("mesh").at("hash").get<std::string>());
    run.gripper = meta.at("gripper").at("name").get<std::string>();
    run.seeds = meta.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw IoError(meta_path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw IoError(meta_path.string() + ": embedded config: " + e.what());
  }
  for (std::uint64_t seed : run.seeds) {
    run.archives.push_back(read_outcome_archive(seed_dir(dir, seed) / "outcomes.ndjson"));
  }
  return run;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ComparisonReport compare_archives(const std::vector<std::string>& names,
                                  const std::vector<std::vector<const OutcomeArchive*>>& groups,
                                  double step) {
  if (names.size() != groups.size()) {
    throw std::invalid_argument("compare_archives: one name per group");
  }
  std::vector<const OutcomeArchive*> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  ComparisonReport report;
  report.step = step;
  const ReferenceGraspSet ref = build_reference_set(all, step);
  report.reference_size = ref.size();
  if (ref.size() == 0) throw std::invalid_argument("no successful grasp in any compared run");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    RunCoverage row;
    row.name = names[i];
    for (const OutcomeArchive* a : groups[i]) {
      row.curves.push_back(coverage_curve(*a, ref, step));
      row.final_coverage.push_back(final_coverage(*a, ref, step));
    }
    if (!row.final_coverage.empty()) row.median = median(row.final_coverage);
    report.runs.push_back(std::move(row));
  }
  return report;
}

ComparisonReport compare_runs(const std::vector<fs::path>& run_dirs, double step) {
  if (run_dirs.size() < 2) throw std::invalid_argument("compare needs at least two run directories");
  std::vector<LoadedRun> runs;
  for (const auto& d : run_dirs) runs.push_back(load_run(d));
  for (const auto& r : runs) {
    if (r.mesh_hash != runs[0].mesh_hash) {
      throw std::invalid_argument("runs " + runs[0].name + " and " + r.name +
                                  " were produced on different meshes");
    }
    if (r.gripper != runs[0].gripper) {
      throw std::invalid_argument("runs " + runs[0].name + " and " + r.name +
                                  " use different grippers");
    }
  }
  std::vector<std::string> names;
  std::vector<std::vector<const OutcomeArchive*>> groups;
  for (const auto& r : runs) {
    names.push_back(r.name);
    std::vector<const OutcomeArchive*> g;
    for (const auto& a : r.archives) g.push_back(&a);
    groups.push_back(std::move(g));
  }
  ComparisonReport report = compare_archives(names, groups, step);
  for (std::size_t i = 0; i < runs.size(); ++i) report.runs[i].seeds = runs[i].seeds;
  return report;
}

void write_comparison(const ComparisonReport& report, const fs::path& out_dir) {
  make_dirs(out_dir / "curves");
  std::size_t max_seeds = 0;
  for (const auto& r : report.runs) max_seeds = std::max(max_seeds, r.final_coverage.size());
  std::ostringstream table;
  table << "# schema=graspqd.comparison version=" << kSchemaVersion
        << " step=" << report.step << " reference_voxels=" << report.reference_size << "\n";
  table << "run,median";
  for (std::size_t k = 0; k < max_seeds; ++k) table << ",seed_" << k;
  table << "\n" << std::setprecision(17);
  for (const auto& r : report.runs) {
    table << r.name << "," << r.median;
    for (std::size_t k = 0; k < max_seeds; ++k) {
      table << ",";
      if (k < r.final_coverage.size()) table << r.final_coverage[k];
    }
    table << "\n";
    for (std::size_t k = 0; k < r.curves.size(); ++k) {
      const std::string seed = k < r.seeds.size() ? std::to_string(r.seeds[k]) : std::to_string(k);
      write_coverage_csv(out_dir / "curves" / (r.name + "_seed_" + seed + ".csv"), r.curves[k]);
    }
  }
  write_text_file(out_dir / "coverage_table.csv", table.str());
}

std::string format_comparison(const ComparisonReport& report) {
  std::ostringstream out;
  out << "reference set: " << report.reference_size << " voxels at step " << report.step << "\n";
  std::size_t width = 4;
  for (const auto& r : report.runs) width = std::max(width, r.name.size());
  out << std::left << std::setw(width + 2) << "run" << "median   per-seed\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& r : report.runs) {
    out << std::setw(width + 2) << r.name << r.median << "  ";
    for (double c : r.final_coverage) out << " " << c;
    out << "\n";
  }
  return out.str();
}

}  // namespace graspqd
