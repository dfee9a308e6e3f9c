#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gad {

struct TargetSpec {
  std::string name = "trimodal";
  std::map<std::string, double> params;  // name-specific overrides
};

// Effective experiment configuration. Defaults: 1000 + 100 iterations, gamma = 1e-05, n = 100,
// nu = 2.38 / sqrt(6), P_check = 0.5, omega = 0.7, c swept over [0, 0.2]
// with increments 0.005 below 0.1 and 0.01 above, 5 demonstrated grasps.
struct ExperimentConfig {
  TargetSpec target;

  int demo_count = 5;
  int sketch_size = 1000;

  int iterations = 1000;
  int burn_in = 100;
  double gamma = 1e-5;
  double nu = 2.38 / std::sqrt(6.0);
  int subsample_n = 100;
  double p_check = 0.5;
  double omega = 0.7;
  std::string acceptance_mode = "standard";  // or "reciprocal"
  std::string volume_mode = "sqrt";          // or "literal"

  double kernel_sigma = 0.04;
  double kernel_ell = 0.15;
  double kernel_c = 0.08;  // c for single runs; the sweep overrides per run

  double rw_pos_sigma = 0.05;  // isotropic position std (m)
  double rw_kappa = 50.0;

  std::vector<std::string> bias_levels = {"impartial", "weak", "strong"};
  std::vector<double> c_values;  // empty = default sweep
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = "runs";
  int workers = 0;  // 0 = GAD_WORKERS env or 1

  std::vector<double> sweep() const;
};

// c grid 0:0.005:0.1 then 0.11:0.01:0.2 (31 values).
std::vector<double> default_c_sweep();

// Flat dotted key = value text, '#' comments. Unknown keys are an error that
// names the offending key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Round-trippable snapshot of the effective (default-merged) configuration.
std::string config_to_string(const ExperimentConfig& cfg);

}  // namespace gad
