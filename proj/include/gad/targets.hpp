#pragma once

#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gad/geometry.hpp"
#include "gad/rng.hpp"

namespace gad {

class Rng;

// Nonnegative grasp-quality oracle defining an unnormalized target density
// pi(g). Oracles are deterministic, pure and shareable across threads; the
// normalization constant cancels in every acceptance ratio and is tracked by
// the harness as a diagnostic running sum only.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  virtual double quality(const Pose& g) const = 0;

  // ln(quality); -inf iff quality == 0, never NaN. Overridable so mixture
  // targets can stay rankable far below the floating-point floor.
  virtual double log_density(const Pose& g) const;

  // Success threshold tau >= 0; success means quality > tau.
  virtual double threshold() const = 0;

  bool is_success(const Pose& g) const {
    const double t = threshold();
    return log_density(g) > (t > 0.0 ? std::log(t)
                                     : -std::numeric_limits<double>::infinity());
  }
};

// Sum of squared-exponential bumps in the linearized pose metric:
//   quality(g) = sum_k w_k exp(-d_mag_linearized(g, mu_k, c)^2 / (2 s_k^2)).
// Stand-in for object-specific multimodal affordance densities.
class MixtureTarget : public TargetDensity {
 public:
  struct Mode {
    Pose center;
    double weight = 1.0;  // > 0
    double scale = 0.1;   // > 0
  };

  // tau < 0 selects the default 0.05 * min_k w_k.
  MixtureTarget(std::vector<Mode> modes, double c, double tau = -1.0);

  double quality(const Pose& g) const override;
  double log_density(const Pose& g) const override;  // exact log-sum-exp
  double threshold() const override { return tau_; }

  const std::vector<Mode>& modes() const { return modes_; }
  double metric_weight() const { return c_; }

 private:
  std::vector<Mode> modes_;
  double c_;
  double tau_;
};

// Continuum-mode analog of handle grasps: quality is positive only when the
// position lies in the annular shell around an axis-aligned cylinder and the
// gripper closing axis (the pose's local x-axis, by convention) points at
// the cylinder axis within theta_tol. Inside the shell the value is the
// angular alignment factor max(0, cos(miss) - cos(tol)) / (1 - cos(tol)).
class CylinderRingTarget : public TargetDensity {
 public:
  CylinderRingTarget(double radius, double height, double standoff_min,
                     double standoff_max, double theta_tol);

  double quality(const Pose& g) const override;
  double threshold() const override { return 0.0; }

  double radius() const { return radius_; }
  double height() const { return height_; }
  double standoff_min() const { return standoff_min_; }
  double standoff_max() const { return standoff_max_; }
  double theta_tol() const { return theta_tol_; }

 private:
  double radius_, height_, standoff_min_, standoff_max_, theta_tol_, cos_tol_;
};

struct DemoOptions {
  int budget = 2000;     // quality evaluations per seed, spread over restarts
  double kappa = 500.0;  // vMF concentration of the local orientation step
};

// For each seed position, hill-climb over orientation only (position fixed):
// von Mises-Fisher perturbations keep improvements; zero-quality plateaus
// restart from a uniform orientation. Returns the m best results, all with
// quality above the target threshold; throws when fewer than m seeds get
// there within budget.
std::vector<Pose> generate_demo_grasps(const TargetDensity& target,
                                       std::span<const Vec3> seed_positions,
                                       std::size_t m, Rng& rng,
                                       const DemoOptions& opts = {});

}  // namespace gad
