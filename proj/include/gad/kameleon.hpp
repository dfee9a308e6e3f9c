#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gad/chain.hpp"
#include "gad/geometry.hpp"
#include "gad/kernel.hpp"
#include "gad/rng.hpp"
#include "gad/targets.hpp"

namespace gad {

struct KameleonParams {
  double gamma = 1e-5;          // isotropic noise floor, > 0
  double nu = 2.38 / std::sqrt(6.0);  // covariance scaling, > 0
  int n = 100;                  // history subsample size, >= 1
  int burn_in = 100;            // adaptation iterations, >= 0
  int iterations = 1000;        // post-burn-in iterations
  KernelParams kernel;
};

// Mutable per-sampler chain state. History is initialized from a sketch's
// poses (valid and invalid alike) and grows by exactly one entry per step;
// after burn-in the subsample is frozen and adaptation stops.
struct ChainState {
  Pose current;
  double current_log_density = 0.0;
  std::vector<Pose> history;
  std::optional<std::vector<Pose>> frozen_subsample;
  long iteration = 0;

  static ChainState from_sketch(const Pose& start, const TargetDensity& target,
                                std::span<const struct SketchSample> sketch);

  void freeze(std::vector<Pose> subsample) { frozen_subsample = std::move(subsample); }
};

// n poses drawn uniformly without replacement (the whole history when it is
// shorter); returns the frozen subsample once adaptation has stopped.
std::vector<Pose> subsample_history(const ChainState& state, int n, Rng& rng);

struct KameleonProposal {
  std::optional<Pose> pose;  // empty on a degenerate projection
  Ambient7 ambient_draw;
};

// Gaussian proposal N(embed(x), gamma^2 I + nu^2 M H M^T), drawn in the
// whitened coordinates (q, sqrt(c) t) of the kernel metric and mapped back to
// a Pose. eta is fixed to 1; only the product eta * nu enters the covariance.
KameleonProposal kameleon_propose(const Pose& x, std::span<const Pose> z,
                                  const KameleonParams& params, Rng& rng);

// Log-density of the proposal N(embed(x_from), C(x_from)) at embed(x_to),
// with x_to's rotation sign chosen nearest to x_from (double-cover handling).
double log_q(const Pose& x_to, const Pose& x_from, std::span<const Pose> z,
             const KameleonParams& params);

// One adaptive MH step: subsample (fresh during burn-in, frozen after),
// propose, accept with the full asymmetric-q ratio, append the resulting
// state to history.
ChainRecord kameleon_step(ChainState& state, const TargetDensity& target,
                          const KameleonParams& params, Rng& rng);

}  // namespace gad
