#pragma once

#include "graspqd/config.hpp"
#include "graspqd/io.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace graspqd {

const char* version();

/// Mesh, surface samples and gripper shared by every seed of a run.
struct Scene {
  TriangleMesh mesh;
  SurfaceSampleSet samples;
  GripperSpec spec;
};

Scene load_scene(const RunConfig& config);
/// One search with `config.qd.seed` replaced by `seed`. No files are written.
RunResult run_seed(const RunConfig& config, const Scene& scene, std::uint64_t seed);

/// `config.output_dir`, else $GRASPQD_OUTPUT_ROOT, else "runs".
std::filesystem::path output_root(const RunConfig& config);

/// Runs every seed and writes <root>/<run name>/ with config.ini,
/// metadata.json and per-seed seed_<k>/ directories holding the outcome
/// archive, evaluation log, behavior grid, coverage curve, voxel heatmap and
/// (for priors that record nu) the nu histogram. Refuses to overwrite an
/// existing run. Throws ConfigError or IoError.
std::filesystem::path run_experiment(const RunConfig& config, std::ostream* progress = nullptr);

struct LoadedRun {
  std::filesystem::path dir;
  std::string name;
  RunConfig config;
  std::uint64_t mesh_hash = 0;
  std::string gripper;
  std::vector<std::uint64_t> seeds;
  std::vector<OutcomeArchive> archives;  // parallel to seeds
};

LoadedRun load_run(const std::filesystem::path& dir);

struct RunCoverage {
  std::string name;
  std::vector<std::uint64_t> seeds;
  std::vector<double> final_coverage;  // parallel to seeds
  std::vector<CoverageCurve> curves;   // parallel to seeds
  double median = 0.0;
};

struct ComparisonReport {
  double step = 0.01;
  std::size_t reference_size = 0;
  std::vector<RunCoverage> runs;
};

double median(std::vector<double> values);

/// Coverage of each group of archives against the union of all of them.
ComparisonReport compare_archives(const std::vector<std::string>& names,
                                  const std::vector<std::vector<const OutcomeArchive*>>& groups,
                                  double step = 0.01);
/// Needs at least two run directories built on the same mesh and gripper.
ComparisonReport compare_runs(const std::vector<std::filesystem::path>& run_dirs,
                              double step = 0.01);

/// coverage_table.csv (one row per run, one column per seed) plus
/// curves/<run>_seed_<k>.csv.
void write_comparison(const ComparisonReport& report, const std::filesystem::path& out_dir);
std::string format_comparison(const ComparisonReport& report);

}  // namespace graspqd
