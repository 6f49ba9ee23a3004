#pragma once

#include "graspqd/archive.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace graspqd {

using Voxel = std::array<std::int64_t, 3>;

/// round(x / step) per axis, ties away from zero.
Voxel quantize(const Vec3& p, double step);

/// Deduplicated quantized positions of successful grasps.
struct ReferenceGraspSet {
  double step = 0.01;
  std::set<Voxel> voxels;

  std::size_t size() const { return voxels.size(); }
  bool contains(const Voxel& v) const { return voxels.count(v) > 0; }
};

ReferenceGraspSet build_reference_set(const std::vector<const OutcomeArchive*>& archives,
                                      double step = 0.01);

struct CoveragePoint {
  std::int64_t eval_index;
  double coverage;
};

/// One point per evaluation: coverage reached once `eval_index` is done.
using CoverageCurve = std::vector<CoveragePoint>;

CoverageCurve coverage_curve(const OutcomeArchive& archive, const ReferenceGraspSet& ref,
                             double step = 0.01);
double final_coverage(const OutcomeArchive& archive, const ReferenceGraspSet& ref,
                      double step = 0.01);

struct Histogram {
  double lo = 0.0;
  double hi = M_PI;
  std::vector<double> mass;

  double mass_between(double a, double b) const;
};

Histogram nu_histogram(const OutcomeArchive& archive, int bins);
/// Fraction of successful grasps with nu <= limit.
double nu_fraction_below(const OutcomeArchive& archive, double limit);

std::map<Voxel, double> voxel_heatmap(const OutcomeArchive& archive, double step = 0.01);

}  // namespace graspqd
