#include "gad/kameleon.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gad/rwmh.hpp"

namespace gad {

ChainState ChainState::from_sketch(const Pose& start, const TargetDensity& target,
                                   std::span<const SketchSample> sketch) {
  ChainState state;
  state.current = start;
  state.current_log_density = target.log_density(start);
  state.history.reserve(sketch.size());
  for (const auto& s : sketch) state.history.push_back(s.pose);
  return state;
}

std::vector<Pose> subsample_history(const ChainState& state, int n, Rng& rng) {
  if (state.frozen_subsample) return *state.frozen_subsample;
  if (state.history.empty())
    throw std::invalid_argument("subsample_history: empty history");
  const std::size_t h = state.history.size();
  if (h <= static_cast<std::size_t>(n)) return state.history;

  // Partial Fisher-Yates: exactly n index draws.
  std::vector<std::size_t> idx(h);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_int(h - static_cast<std::size_t>(i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    out.push_back(state.history[idx[static_cast<std::size_t>(i)]]);
  }
  return out;
}

// The kernel metric scales translations by sqrt(c), so the proposal is drawn
// in the whitened coordinates u = (q, sqrt(c) t) where that metric is
// Euclidean; otherwise the adapted covariance misstates the translation block
// by a factor c^2 relative to the rotation block. The floor keeps a
// position-blind kernel (c = 0) usable: translations then move on the gamma
// scale of the widest admitted metric.
static double translation_scale(const KameleonParams& params) {
  return 1.0 / std::sqrt(std::max(params.kernel.c, 0.01));
}

static Matrix7d covariance_at(const Pose& x, std::span<const Pose> z,
                              const KameleonParams& params) {
  GradientMatrix m = gradient_matrix(z, x, 1.0, params.kernel);
  m.bottomRows<3>() *= translation_scale(params);  // d/du = (1/sqrt(c)) d/dt
  return proposal_covariance(m, params.gamma, params.nu);
}

KameleonProposal kameleon_propose(const Pose& x, std::span<const Pose> z,
                                  const KameleonParams& params, Rng& rng) {
  const Matrix7d cov = covariance_at(x, z, params);
  const Eigen::LLT<Matrix7d> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("kameleon_propose: covariance not positive definite");
  Ambient7 delta = llt.matrixL() * Ambient7(rng.normal_vector(7));
  delta.tail<3>() *= translation_scale(params);  // whitened u back to t
  const Ambient7 draw = embed(x) + delta;
  return {project(draw), draw};
}

double log_q(const Pose& x_to, const Pose& x_from, std::span<const Pose> z,
             const KameleonParams& params) {
  const Matrix7d cov = covariance_at(x_from, z, params);
  const Eigen::LLT<Matrix7d> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("log_q: covariance not positive definite");

  Pose to = x_to;
  if (to.rot.dot(x_from.rot) < 0.0) to.rot = to.rot.negated();
  Ambient7 diff = embed(to) - embed(x_from);
  // Density in whitened coordinates; the constant Jacobian cancels in every
  // forward/backward ratio.
  diff.tail<3>() /= translation_scale(params);

  const Ambient7 y = llt.matrixL().solve(diff);
  double log_det = 0.0;
  for (int i = 0; i < 7; ++i) log_det += std::log(llt.matrixL()(i, i));
  return -0.5 * y.squaredNorm() - log_det - 3.5 * std::log(2.0 * M_PI);
}

ChainRecord kameleon_step(ChainState& state, const TargetDensity& target,
                          const KameleonParams& params, Rng& rng) {
  const std::vector<Pose> z = subsample_history(state, params.n, rng);
  const KameleonProposal proposal = kameleon_propose(state.current, z, params, rng);

  bool accepted = false;
  if (proposal.pose) {
    const double lp_new = target.log_density(*proposal.pose);
    if (!std::isinf(lp_new) || lp_new > state.current_log_density) {
      const double log_alpha = lp_new + log_q(state.current, *proposal.pose, z, params) -
                               state.current_log_density -
                               log_q(*proposal.pose, state.current, z, params);
      accepted = log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha;
      if (accepted) {
        state.current = *proposal.pose;
        state.current_log_density = lp_new;
      }
    }
  }

  state.history.push_back(state.current);
  ++state.iteration;
  return {state.current, state.current_log_density, accepted, Branch::kameleon};
}

}  // namespace gad
