#include "gad/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gad/vmf.hpp"

namespace gad {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double TargetDensity::log_density(const Pose& g) const {
  const double q = quality(g);
  return q > 0.0 ? std::log(q) : kNegInf;
}

MixtureTarget::MixtureTarget(std::vector<Mode> modes, double c, double tau)
    : modes_(std::move(modes)), c_(c) {
  if (modes_.empty()) throw std::invalid_argument("MixtureTarget: need at least one mode");
  if (!(c_ >= 0.0)) throw std::invalid_argument("MixtureTarget: c must be >= 0");
  double min_w = std::numeric_limits<double>::infinity();
  for (const auto& m : modes_) {
    if (!(m.weight > 0.0) || !(m.scale > 0.0))
      throw std::invalid_argument("MixtureTarget: weights and scales must be > 0");
    min_w = std::min(min_w, m.weight);
  }
  tau_ = tau >= 0.0 ? tau : 0.05 * min_w;
}

double MixtureTarget::quality(const Pose& g) const {
  double q = 0.0;
  for (const auto& m : modes_) {
    const double d = d_mag_linearized(g, m.center, c_);
    q += m.weight * std::exp(-d * d / (2.0 * m.scale * m.scale));
  }
  return q;
}

double MixtureTarget::log_density(const Pose& g) const {
  // log-sum-exp keeps the density rankable even where every bump underflows.
  double max_term = kNegInf;
  std::vector<double> terms(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const auto& m = modes_[k];
    const double d = d_mag_linearized(g, m.center, c_);
    terms[k] = std::log(m.weight) - d * d / (2.0 * m.scale * m.scale);
    max_term = std::max(max_term, terms[k]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc);
}

CylinderRingTarget::CylinderRingTarget(double radius, double height,
                                       double standoff_min, double standoff_max,
                                       double theta_tol)
    : radius_(radius),
      height_(height),
      standoff_min_(standoff_min),
      standoff_max_(standoff_max),
      theta_tol_(theta_tol),
      cos_tol_(std::cos(theta_tol)) {
  if (!(radius > 0.0) || !(height > 0.0) || !(standoff_max > standoff_min) ||
      !(theta_tol > 0.0) || !(theta_tol < M_PI))
    throw std::invalid_argument("CylinderRingTarget: bad geometry parameters");
}

double CylinderRingTarget::quality(const Pose& g) const {
  const double rho = std::hypot(g.tra.x(), g.tra.y());
  if (rho < radius_ + standoff_min_ || rho > radius_ + standoff_max_) return 0.0;
  if (std::abs(g.tra.z()) > 0.5 * height_) return 0.0;
  if (rho < 1e-12) return 0.0;

  const Vec3 closing_axis = g.rot.rotate(Vec3::UnitX());
  const Vec3 toward_axis(-g.tra.x() / rho, -g.tra.y() / rho, 0.0);
  const double cos_miss = closing_axis.dot(toward_axis);
  return std::max(0.0, (cos_miss - cos_tol_) / (1.0 - cos_tol_));
}

std::vector<Pose> generate_demo_grasps(const TargetDensity& target,
                                       std::span<const Vec3> seed_positions,
                                       std::size_t m, Rng& rng,
                                       const DemoOptions& opts) {
  if (m > seed_positions.size())
    throw std::invalid_argument("generate_demo_grasps: m exceeds seed count");

  // Start orientations: identity plus the 24-cell vertices (12 double-cover
  // representatives). Greedy climbing from a single start gets trapped in the
  // orientation basin of a far-away mode whose local optimum sits below the
  // success threshold, so each seed position climbs from several well-spread
  // starts and keeps the best.
  std::vector<UnitQuat> starts{UnitQuat()};
  for (int i = 1; i < 4; ++i) {
    double v[4] = {0, 0, 0, 0};
    v[i] = 1.0;
    starts.push_back(UnitQuat(v[0], v[1], v[2], v[3]));
  }
  for (int mask = 0; mask < 8; ++mask)
    starts.push_back(UnitQuat(0.5, mask & 1 ? -0.5 : 0.5, mask & 2 ? -0.5 : 0.5,
                              mask & 4 ? -0.5 : 0.5));

  constexpr int kStallWindow = 30;

  struct Candidate {
    Pose pose;
    double log_q;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(seed_positions.size());

  for (const Vec3& seed : seed_positions) {
    Pose best_pose{starts.front(), seed};
    double best_log = target.log_density(best_pose);
    int evals = 1;
    for (const UnitQuat& start : starts) {
      Pose cur{start, seed};
      double cur_log = target.log_density(cur);
      ++evals;
      int since_improved = 0;
      int step = 0;
      while (evals < opts.budget && since_improved < kStallWindow) {
        // Anneal the concentration: coarse early steps cross the basin
        // quickly, fine late steps settle well inside the success threshold
        // instead of stalling at the initial step size.
        const double kappa = opts.kappa * (0.1 + 0.05 * step);
        // On a zero-quality plateau there is nothing to climb; restart from
        // a uniform orientation until the oracle gives any signal.
        const UnitQuat q = std::isinf(cur_log) ? vmf_sample(cur.rot, 0.0, rng)
                                               : vmf_sample(cur.rot, kappa, rng);
        const Pose cand{q, seed};
        const double cand_log = target.log_density(cand);
        ++evals;
        ++step;
        if (cand_log > cur_log) {
          cur = cand;
          cur_log = cand_log;
          since_improved = 0;
        } else {
          ++since_improved;
        }
      }
      if (cur_log > best_log) {
        best_pose = cur;
        best_log = cur_log;
      }
      // A converged climb above the threshold is good enough; keep the rest
      // of the budget for the remaining seeds.
      if (target.is_success(best_pose) && since_improved >= kStallWindow) break;
      if (evals >= opts.budget) break;
    }
    candidates.push_back({best_pose, best_log});
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.log_q > b.log_q; });

  std::vector<Pose> demos;
  for (const auto& c : candidates) {
    if (demos.size() == m) break;
    if (target.is_success(c.pose)) demos.push_back(c.pose);
  }
  if (demos.size() < m)
    throw std::runtime_error(
        "generate_demo_grasps: fewer than m seeds reached quality above the "
        "threshold within budget");
  return demos;
}

}  // namespace gad
