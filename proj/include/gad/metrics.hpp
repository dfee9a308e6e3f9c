#pragma once

#include <span>
#include <string>
#include <vector>

#include "gad/chain.hpp"
#include "gad/geometry.hpp"
#include "gad/rwmh.hpp"
#include "gad/targets.hpp"

namespace gad {

struct SuccessCounts {
  std::size_t success_count = 0;         // accepted states with quality > tau
  std::size_t unique_success_count = 0;  // deduplicated at d_mag_lin > 1e-6
};

// Counts accepted chain states that are successful grasps. Both the raw and
// the deduplicated count are reported; dedup_c weights the translation in the
// dedup metric.
SuccessCounts count_successes(std::span<const ChainRecord> chain,
                              const TargetDensity& target, double dedup_c = 1.0,
                              double dedup_eps = 1e-6);

struct HullResult {
  double area = 0.0;
  bool degenerate = false;  // fewer than 4 points, or coplanar within 1e-12
};

// Surface area of the 3D convex hull (quickhull).
HullResult convex_hull_area(std::span<const Vec3> points);

struct RunMetrics {
  std::size_t success_count = 0;
  std::size_t unique_success_count = 0;
  double acceptance_rate = 0.0;
  double dispersion_area = 0.0;
  bool dispersion_degenerate = false;
  double c_value = 0.0;
  SketchBias bias = SketchBias::impartial;
  std::uint64_t seed = 0;
};

struct AggregateRow {
  SketchBias bias = SketchBias::impartial;
  std::size_t runs = 0;
  double mean_successes = 0.0;
  double std_successes = 0.0;  // sample (n - 1) standard deviation
  double mean_unique = 0.0;
};

// Per-bias mean and sample standard deviation of success counts across a
// c-sweep; groups never mix bias levels.
std::vector<AggregateRow> aggregate(std::span<const RunMetrics> runs);

}  // namespace gad
