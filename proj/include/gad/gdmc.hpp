#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gad/chain.hpp"
#include "gad/geometry.hpp"
#include "gad/kameleon.hpp"
#include "gad/rng.hpp"
#include "gad/targets.hpp"

namespace gad {

// Whether the darting acceptance uses the standard mode-hopping MH rule or
// the reciprocal variant (compares u against the inverse ratio and accepts on
// u > P), kept behind a switch for comparison.
enum class DartAcceptMode { standard, reciprocal };

// Ellipsoid volume form: semi-axes omega * sqrt(lambda_i) (default), or the
// product of raw eigenvalues, kept behind a switch for comparison.
enum class VolumeMode { sqrt_eigen, literal };

// Elliptical jump region around a known mode.
struct JumpRegion {
  Pose center;
  Eigen::MatrixXd basis;        // columns = eigenbasis U, orthogonal
  Eigen::VectorXd eigenvalues;  // all > 0 (floored at 1e-10)
  double omega = 0.7;
  double volume = 0.0;
};

struct DartingParams {
  double p_check = 0.5;  // in [0, 1]
  double omega = 0.7;
  DartAcceptMode acceptance_mode = DartAcceptMode::standard;
  VolumeMode volume_mode = VolumeMode::sqrt_eigen;
};

// Volume of the ellipsoid with semi-axes omega * sqrt(lambda_i); dimension is
// the number of eigenvalues.
double ellipsoid_volume(double omega, std::span<const double> eigenvalues,
                        VolumeMode mode = VolumeMode::sqrt_eigen);

// Standardized membership test ||S^-1/2 U^T delta|| <= omega, reusable at any
// dimension.
double standardized_radius(const Eigen::MatrixXd& basis,
                           const Eigen::VectorXd& eigenvalues,
                           const Eigen::VectorXd& delta);
bool ellipsoid_contains(const Eigen::MatrixXd& basis,
                        const Eigen::VectorXd& eigenvalues, double omega,
                        const Eigen::VectorXd& delta);

// One region per mode; the region covariance is the sample covariance of the
// history poses nearest to that mode (ambient embedding, quaternion signs
// aligned to the region center), scaled by the dimension d so the ellipsoid
// spans the fitted Gaussian's bulk rather than its unit-Mahalanobis core.
// Regions with fewer than 8 assigned samples fall back to the global chain
// covariance; a history shorter than 8 falls back to 1e-4 I.
std::vector<JumpRegion> build_regions(std::span<const Pose> modes,
                                      std::span<const Pose> history,
                                      double omega, double metric_c,
                                      VolumeMode volume_mode = VolumeMode::sqrt_eigen);

bool contains(const JumpRegion& region, const Pose& x);

// Categorical draw with probabilities proportional to region volumes.
std::size_t select_region(std::span<const JumpRegion> regions, Rng& rng);

// Volume-matched jump: maps the from-region standardized coordinates u to -u
// in the to-region. Empty only on a degenerate projection.
std::optional<Pose> dart(const Pose& x, const JumpRegion& from,
                         const JumpRegion& to);

bool dart_accept(const Pose& x, const Pose& x_new,
                 std::span<const JumpRegion> regions, const TargetDensity& target,
                 DartAcceptMode mode, Rng& rng);

// The combined sampler step: with probability p_check sample locally with
// Kameleon; otherwise attempt a darting move (held in place when the current
// state is outside every region).
ChainRecord combined_step(ChainState& state, const TargetDensity& target,
                          std::span<const JumpRegion> regions,
                          const KameleonParams& kparams,
                          const DartingParams& dparams, Rng& rng);

}  // namespace gad
