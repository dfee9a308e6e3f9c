#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gad/chain.hpp"
#include "gad/geometry.hpp"
#include "gad/rng.hpp"
#include "gad/targets.hpp"
#include "gad/vmf.hpp"

namespace gad {

// Random-walk proposal parameters: Gaussian position covariance (m^2) and
// von Mises-Fisher orientation concentration. Position and orientation are
// drawn independently on purpose; the baseline's lack of position-orientation
// coupling is the behavior under study.
struct RwParams {
  Eigen::Matrix3d pos_cov = (0.05 * 0.05) * Eigen::Matrix3d::Identity();
  double kappa = 50.0;
};

struct SketchSample {
  Pose pose;
  double quality = 0.0;
  bool valid = false;  // quality > tau of the generating target
};

enum class SketchBias { impartial, weak, strong };

const char* sketch_bias_name(SketchBias b);
SketchBias sketch_bias_from_name(const std::string& name);

// Labeled set of random-walk proposals used to seed the adaptive sampler's
// chain history. Invariants by bias: impartial has zero valid samples, weak's
// only valid samples are the demonstrated grasps, strong has at least half
// valid.
struct Sketch {
  std::vector<SketchSample> samples;
  SketchBias bias = SketchBias::impartial;
};

struct RwChain {
  Pose current;
  double current_log_density = 0.0;
  std::vector<SketchSample>* recorder = nullptr;  // records every proposal when set
};

Pose rw_propose(const Pose& x, const RwParams& params, Rng& rng);

// One symmetric-proposal MH step; returns the produced chain record.
ChainRecord rw_step(RwChain& chain, const TargetDensity& target,
                    const RwParams& params, Rng& rng);

// Runs the random walk from the demonstrated grasps (restarting periodically
// at a random demo so every demonstrated basin is covered), recording all
// proposals, then enforces the bias invariant. Throws when the impartial
// backfill cannot
// find enough invalid samples within 100 * count draws, or when the strong
// bias cannot collect count / 2 valid samples in that budget.
Sketch build_sketch(const TargetDensity& target, std::span<const Pose> demos,
                    SketchBias bias, std::size_t count, const RwParams& params,
                    Rng& rng);

}  // namespace gad
