#pragma once

#include "graspqd/metrics.hpp"
#include "graspqd/qd.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspqd {

/// Unreadable, unwritable or malformed artifact file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every artifact starts with {"schema": <name>, "version": <n>}; readers
// reject other schemas or versions.
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutcomeSchema = "graspqd.outcomes";
inline constexpr const char* kEvalLogSchema = "graspqd.eval_log";
inline constexpr const char* kGridSchema = "graspqd.grid";
inline constexpr const char* kVoxelSchema = "graspqd.voxels";
inline constexpr const char* kRunSchema = "graspqd.run";

/// Newline-delimited JSON: a header line, then one grasp per line with
/// eval_index, position, quaternion (x, y, z, w), synergy_id, init_joints,
/// fitness, nu (null when not recorded) and genome.
void write_outcome_archive(const std::filesystem::path& path, const OutcomeArchive& archive);
OutcomeArchive read_outcome_archive(const std::filesystem::path& path);

void write_eval_log(const std::filesystem::path& path, const std::vector<EvalRecord>& log,
                    Prior prior);
std::vector<EvalRecord> read_eval_log(const std::filesystem::path& path);

void write_behavior_grid(const std::filesystem::path& path, const BehaviorGrid& grid,
                         Prior prior);
BehaviorGrid read_behavior_grid(const std::filesystem::path& path);

/// "eval_index,coverage" rows, written only where coverage changes plus the
/// first and last evaluation.
void write_coverage_csv(const std::filesystem::path& path, const CoverageCurve& curve);
CoverageCurve read_coverage_csv(const std::filesystem::path& path);

void write_histogram_csv(const std::filesystem::path& path, const Histogram& histogram);
void write_voxels_json(const std::filesystem::path& path, const std::map<Voxel, double>& heatmap,
                       double step);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace graspqd
