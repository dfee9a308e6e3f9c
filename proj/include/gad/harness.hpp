#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gad/config.hpp"
#include "gad/gdmc.hpp"
#include "gad/kameleon.hpp"
#include "gad/metrics.hpp"
#include "gad/rwmh.hpp"
#include "gad/targets.hpp"

namespace gad {

// A shipped target plus the default seed positions its demonstrated grasps
// are optimized from.
struct ShippedTarget {
  std::shared_ptr<const TargetDensity> density;
  std::vector<Vec3> demo_seeds;
};

// Known names: trimodal, bimodal, ring, unimodal. Unknown names raise an
// error listing the available targets.
ShippedTarget make_target(const TargetSpec& spec);
std::vector<std::string> shipped_target_names();

// Self-contained per-run record; re-runnable from its config snapshot + seed.
struct RunReport {
  std::string config_snapshot;
  std::uint64_t seed = 0;
  SketchBias bias = SketchBias::weak;
  double c = 0.0;
  std::vector<ChainRecord> chain;  // burn_in + iterations records
  RunMetrics metrics;
  double z_diagnostic = 0.0;  // running sum of observed qualities
  double duration_seconds = 0.0;
};

// One deterministic run: demos -> sketch at bias -> Kameleon burn-in with
// adaptation -> freeze subsample & jump regions -> combined sampler ->
// metrics. Identical (config, bias, c, seed) yields bit-identical chains.
RunReport run_single(const ExperimentConfig& cfg, SketchBias bias, double c,
                     std::uint64_t seed);

// Random-walk MH baseline over the same iteration budget and metrics.
RunReport run_baseline(const ExperimentConfig& cfg, std::uint64_t seed);

struct MatrixResult {
  std::vector<RunMetrics> runs;
  std::vector<AggregateRow> aggregate_rows;
  std::vector<std::string> failures;
};

// Cartesian product of bias levels x c values x seeds, optionally in
// parallel workers; persists per-run reports plus the aggregate table and
// the dispersion CSV into cfg.out_dir. Individual failures are recorded and
// the matrix continues.
MatrixResult run_matrix(const ExperimentConfig& cfg);

// Persistence.
std::string run_stem(SketchBias bias, double c, std::uint64_t seed);
void write_report(const RunReport& report, const std::string& dir);
std::string chain_to_csv(const std::vector<ChainRecord>& chain);
void write_sketch_csv(const Sketch& sketch, const std::string& path);
void write_dispersion_csv(const std::vector<RunMetrics>& runs, const std::string& path);
std::vector<RunMetrics> read_dispersion_csv(const std::string& path);
void write_aggregate(const std::vector<AggregateRow>& rows, const std::string& dir);
std::string aggregate_to_text(const std::vector<AggregateRow>& rows);

}  // namespace gad
