#include "graspqd/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace graspqd {

Voxel quantize(const Vec3& p, double step) {
  return {std::llround(p.x() / step), std::llround(p.y() / step), std::llround(p.z() / step)};
}

ReferenceGraspSet build_reference_set(const std::vector<const OutcomeArchive*>& archives,
                                      double step) {
  if (!(step > 0.0)) throw std::invalid_argument("quantization step must be positive");
  ReferenceGraspSet ref;
  ref.step = step;
  for (const auto* a : archives) {
    for (const auto& r : a->records) {
      if (r.fitness > 0.0) ref.voxels.insert(quantize(r.behavior, step));
    }
  }
  return ref;
}

CoverageCurve coverage_curve(const OutcomeArchive& archive, const ReferenceGraspSet& ref,
                             double step) {
  if (ref.size() == 0) throw std::invalid_argument("coverage against an empty reference set");
  CoverageCurve curve;
  curve.reserve(archive.total_evaluations);
  std::set<Voxel> found;
  std::size_t next = 0;
  for (std::int64_t i = 0; i < archive.total_evaluations; ++i) {
    while (next < archive.records.size() && archive.records[next].eval_index <= i) {
      const auto& r = archive.records[next++];
      if (r.fitness <= 0.0) continue;
      const Voxel v = quantize(r.behavior, step);
      if (ref.contains(v)) found.insert(v);
    }
    curve.push_back({i, static_cast<double>(found.size()) / ref.size()});
  }
  return curve;
}

double final_coverage(const OutcomeArchive& archive, const ReferenceGraspSet& ref, double step) {
  if (ref.size() == 0) throw std::invalid_argument("coverage against an empty reference set");
  std::set<Voxel> found;
  for (const auto& r : archive.records) {
    if (r.fitness <= 0.0) continue;
    const Voxel v = quantize(r.behavior, step);
    if (ref.contains(v)) found.insert(v);
  }
  return static_cast<double>(found.size()) / ref.size();
}

double Histogram::mass_between(double a, double b) const {
  const double width = (hi - lo) / mass.size();
  double total = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double c = lo + (i + 0.5) * width;
    if (c >= a && c <= b) total += mass[i];
  }
  return total;
}

Histogram nu_histogram(const OutcomeArchive& archive, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  Histogram h;
  h.mass.assign(bins, 0.0);
  std::size_t n = 0;
  for (const auto& r : archive.records) {
    if (r.fitness <= 0.0 || !r.nu) continue;
    const int b = std::clamp(static_cast<int>(std::floor(*r.nu / M_PI * bins)), 0, bins - 1);
    h.mass[b] += 1.0;
    ++n;
  }
  if (n == 0) throw std::invalid_argument("archive has no nu data");
  for (auto& m : h.mass) m /= static_cast<double>(n);
  return h;
}

double nu_fraction_below(const OutcomeArchive& archive, double limit) {
  std::size_t n = 0, below = 0;
  for (const auto& r : archive.records) {
    if (r.fitness <= 0.0 || !r.nu) continue;
    ++n;
    if (*r.nu <= limit) ++below;
  }
  if (n == 0) throw std::invalid_argument("archive has no nu data");
  return static_cast<double>(below) / n;
}

std::map<Voxel, double> voxel_heatmap(const OutcomeArchive& archive, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("quantization step must be positive");
  std::map<Voxel, double> map;
  for (const auto& r : archive.records) {
    if (r.fitness <= 0.0) continue;
    auto [it, inserted] = map.try_emplace(quantize(r.behavior, step), r.fitness);
    if (!inserted) it->second = std::max(it->second, r.fitness);
  }
  return map;
}

}  // namespace graspqd
