#include "gad/rwmh.hpp"

#include <cmath>
#include <stdexcept>

namespace gad {

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::kameleon: return "kameleon";
    case Branch::dart: return "dart";
    case Branch::hold: return "hold";
    case Branch::rw: return "rw";
  }
  return "?";
}

const char* sketch_bias_name(SketchBias b) {
  switch (b) {
    case SketchBias::impartial: return "impartial";
    case SketchBias::weak: return "weak";
    case SketchBias::strong: return "strong";
  }
  return "?";
}

SketchBias sketch_bias_from_name(const std::string& name) {
  if (name == "impartial") return SketchBias::impartial;
  if (name == "weak") return SketchBias::weak;
  if (name == "strong") return SketchBias::strong;
  throw std::invalid_argument("unknown sketch bias: " + name);
}

Pose rw_propose(const Pose& x, const RwParams& params, Rng& rng) {
  const Eigen::LLT<Eigen::Matrix3d> llt(params.pos_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("rw_propose: pos_cov must be SPD");
  const Vec3 tra = x.tra + llt.matrixL() * Vec3(rng.normal(), rng.normal(), rng.normal());
  const UnitQuat rot = vmf_sample(x.rot, params.kappa, rng);
  return {rot, tra};
}

ChainRecord rw_step(RwChain& chain, const TargetDensity& target,
                    const RwParams& params, Rng& rng) {
  const Pose proposal = rw_propose(chain.current, params, rng);
  const double lp_new = target.log_density(proposal);

  if (chain.recorder)
    chain.recorder->push_back(
        {proposal, target.quality(proposal), target.is_success(proposal)});

  // Symmetric proposal: the q-ratio is 1.
  bool accepted = false;
  if (!std::isinf(lp_new) || lp_new > chain.current_log_density) {
    const double log_alpha = lp_new - chain.current_log_density;
    accepted = log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha;
  }
  if (accepted) {
    chain.current = proposal;
    chain.current_log_density = lp_new;
  }
  return {chain.current, chain.current_log_density, accepted, Branch::rw};
}

Sketch build_sketch(const TargetDensity& target, std::span<const Pose> demos,
                    SketchBias bias, std::size_t count, const RwParams& params,
                    Rng& rng) {
  if (demos.empty()) throw std::invalid_argument("build_sketch: need demonstrated grasps");
  if (bias != SketchBias::impartial && count < demos.size())
    throw std::invalid_argument("build_sketch: count must be >= number of demos");

  const std::size_t budget = 100 * count;

  std::vector<SketchSample> pool;
  pool.reserve(count * 2);
  RwChain chain{demos[0], target.log_density(demos[0]), &pool};

  std::vector<SketchSample> invalid, valid;
  std::size_t draws = 0;
  const std::size_t need_valid = bias == SketchBias::strong ? (count + 1) / 2 : 0;
  const std::size_t need_invalid =
      bias == SketchBias::weak ? count - demos.size() : count;

  // Periodic restarts from a random demonstrated grasp spread the recorded
  // proposals over every demonstrated basin instead of wherever the first
  // chain happens to wander; for a strong bias they also keep the walk near
  // regions that can produce valid samples.
  const std::size_t restart_every = std::max<std::size_t>(count / 10, 1);
  while (draws < budget) {
    if (draws > 0 && draws % restart_every == 0) {
      const std::size_t k = rng.uniform_int(demos.size());
      chain.current = demos[k];
      chain.current_log_density = target.log_density(demos[k]);
    }
    rw_step(chain, target, params, rng);
    ++draws;
    SketchSample s = pool.back();
    pool.pop_back();
    (s.valid ? valid : invalid).push_back(std::move(s));

    if (bias == SketchBias::strong) {
      if (valid.size() >= need_valid && valid.size() + invalid.size() >= count) break;
    } else if (invalid.size() >= need_invalid) {
      break;
    }
  }

  Sketch sketch;
  sketch.bias = bias;
  switch (bias) {
    case SketchBias::impartial:
      if (invalid.size() < count)
        throw std::runtime_error(
            "build_sketch: could not collect enough invalid samples "
            "(degenerate target)");
      sketch.samples.assign(invalid.begin(), invalid.begin() + count);
      break;
    case SketchBias::weak: {
      if (invalid.size() < need_invalid)
        throw std::runtime_error(
            "build_sketch: could not collect enough invalid samples "
            "(degenerate target)");
      sketch.samples.assign(invalid.begin(), invalid.begin() + need_invalid);
      for (const Pose& d : demos)
        sketch.samples.push_back({d, target.quality(d), true});
      break;
    }
    case SketchBias::strong: {
      if (valid.size() < need_valid)
        throw std::runtime_error(
            "build_sketch: could not collect enough valid samples for a "
            "strong bias");
      const std::size_t n_valid = std::min(valid.size(), count);
      sketch.samples.assign(valid.begin(), valid.begin() + n_valid);
      if (invalid.size() < count - n_valid)
        throw std::runtime_error("build_sketch: not enough invalid samples to fill");
      sketch.samples.insert(sketch.samples.end(), invalid.begin(),
                            invalid.begin() + (count - n_valid));
      break;
    }
  }
  return sketch;
}

}  // namespace gad
