#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "gad/kameleon.hpp"
#include "gad/rwmh.hpp"
#include "test_util.hpp"

using namespace gad;
using test::random_pose;

namespace {

std::vector<SketchSample> toy_sketch(const TargetDensity& t, int count, Rng& rng,
                                     double spread = 0.3) {
  std::vector<SketchSample> out;
  for (int i = 0; i < count; ++i) {
    const Pose p = random_pose(rng, spread);
    const double q = t.quality(p);
    out.push_back({p, q, q > t.threshold()});
  }
  return out;
}

MixtureTarget unimodal() { return MixtureTarget({{Pose{}, 1.0, 0.25}}, 0.3); }

KameleonParams toy_params() {
  KameleonParams p;
  p.kernel = {0.35, 0.15, 0.08};
  return p;
}

}  // namespace

TEST_CASE("from_sketch seeds history with every sketch pose") {
  const MixtureTarget t = unimodal();
  Rng rng(1);
  const auto sketch = toy_sketch(t, 57, rng);
  const Pose start = random_pose(rng, 0.1);
  const ChainState state = ChainState::from_sketch(start, t, sketch);
  CHECK(state.history.size() == 57);
  CHECK(state.current_log_density == doctest::Approx(t.log_density(start)));
  CHECK(!state.frozen_subsample.has_value());
  CHECK(state.iteration == 0);
}

TEST_CASE("subsample size and uniformity") {
  const MixtureTarget t = unimodal();
  Rng rng(2);
  const auto sketch = toy_sketch(t, 40, rng);
  ChainState state = ChainState::from_sketch(Pose{}, t, sketch);

  Rng draw_rng(3);
  SUBCASE("short history is returned whole") {
    const auto z = subsample_history(state, 100, draw_rng);
    CHECK(z.size() == 40);
  }
  SUBCASE("each element appears with frequency n/N within 3 sigma") {
    const int n = 10, trials = 20000;
    std::map<long long, int> hits;
    for (int trial = 0; trial < trials; ++trial) {
      const auto z = subsample_history(state, n, draw_rng);
      REQUIRE(z.size() == static_cast<std::size_t>(n));
      for (const auto& p : z)
        for (std::size_t k = 0; k < state.history.size(); ++k)
          if (d_mag_linearized(p, state.history[k], 1.0) < 1e-15)
            ++hits[static_cast<long long>(k)];
    }
    const double expect = trials * static_cast<double>(n) / 40.0;
    const double sigma = std::sqrt(expect * (1.0 - static_cast<double>(n) / 40.0));
    for (std::size_t k = 0; k < 40; ++k)
      CHECK(std::abs(hits[static_cast<long long>(k)] - expect) < 5.0 * sigma);
  }
  SUBCASE("frozen subsample is returned verbatim") {
    std::vector<Pose> frozen{random_pose(draw_rng), random_pose(draw_rng)};
    state.freeze(frozen);
    const auto z = subsample_history(state, 10, draw_rng);
    REQUIRE(z.size() == 2);
    CHECK(d_mag_linearized(z[0], frozen[0], 1.0) < 1e-15);
    CHECK(d_mag_linearized(z[1], frozen[1], 1.0) < 1e-15);
  }
}

TEST_CASE("nu = 0 reduces the proposal to an isotropic gamma walk") {
  const MixtureTarget t = unimodal();
  Rng rng(4);
  const auto sketch = toy_sketch(t, 30, rng);
  ChainState state = ChainState::from_sketch(Pose{}, t, sketch);
  KameleonParams params = toy_params();
  params.nu = 0.0;
  params.gamma = 1e-3;
  const auto z = subsample_history(state, params.n, rng);
  for (int i = 0; i < 100; ++i) {
    const auto prop = kameleon_propose(state.current, z, params, rng);
    REQUIRE(prop.pose.has_value());
    const Ambient7 delta = prop.ambient_draw - embed(state.current);
    CHECK(delta.norm() < 10.0 * params.gamma * std::sqrt(7.0));
  }
}

TEST_CASE("proposal covariance adapts toward the history spread") {
  // History clustered along the x-translation axis: proposals should scatter
  // far more along x than along z.
  const MixtureTarget t = unimodal();
  Rng rng(5);
  std::vector<SketchSample> sketch;
  for (int i = 0; i < 200; ++i) {
    const Pose p{UnitQuat(), Vec3(0.5 * rng.normal(), 1e-3 * rng.normal(), 1e-3 * rng.normal())};
    sketch.push_back({p, t.quality(p), false});
  }
  ChainState state = ChainState::from_sketch(Pose{}, t, sketch);
  KameleonParams params = toy_params();
  params.kernel = {1.0, 0.5, 1.0};
  const auto z = subsample_history(state, params.n, rng);
  double var_x = 0.0, var_z = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const auto prop = kameleon_propose(state.current, z, params, rng);
    const Ambient7 delta = prop.ambient_draw - embed(state.current);
    var_x += delta[4] * delta[4];
    var_z += delta[6] * delta[6];
  }
  CHECK(var_x / n > 25.0 * var_z / n);
}

TEST_CASE("log_q is a proper asymmetric density") {
  const MixtureTarget t = unimodal();
  Rng rng(6);
  const auto sketch = toy_sketch(t, 60, rng);
  ChainState state = ChainState::from_sketch(Pose{}, t, sketch);
  const KameleonParams params = toy_params();
  const auto z = subsample_history(state, params.n, rng);

  const Pose a = random_pose(rng, 0.2);
  const Pose b = random_pose(rng, 0.2);
  const double fwd = log_q(b, a, z, params);
  const double bwd = log_q(a, b, z, params);
  CHECK(std::isfinite(fwd));
  CHECK(std::isfinite(bwd));
  // Different anchor points give different covariances, hence asymmetry.
  CHECK(fwd != doctest::Approx(bwd).epsilon(1e-12));

  // Double-cover sign of the endpoint must not matter.
  const Pose bn{b.rot.negated(), b.tra};
  CHECK(log_q(bn, a, z, params) == doctest::Approx(fwd).epsilon(1e-12));

  // Density is maximal at the anchor itself.
  CHECK(log_q(a, a, z, params) > fwd);
}

TEST_CASE("kameleon_step bookkeeping") {
  const MixtureTarget t = unimodal();
  Rng rng(7);
  const auto sketch = toy_sketch(t, 50, rng);
  ChainState state = ChainState::from_sketch(Pose{}, t, sketch);
  const KameleonParams params = toy_params();

  const std::size_t before = state.history.size();
  for (int i = 0; i < 200; ++i) {
    const double prev_ld = state.current_log_density;
    const Pose prev = state.current;
    const ChainRecord rec = kameleon_step(state, t, params, rng);
    CHECK(rec.branch == Branch::kameleon);
    CHECK(state.history.size() == before + static_cast<std::size_t>(i) + 1);
    if (rec.accepted) {
      CHECK(rec.log_quality == doctest::Approx(state.current_log_density));
    } else {
      CHECK(state.current_log_density == prev_ld);
      CHECK(d_mag_linearized(state.current, prev, 1.0) < 1e-15);
    }
    CHECK(d_mag_linearized(state.history.back(), state.current, 1.0) < 1e-15);
  }
  CHECK(state.iteration == 200);
}

TEST_CASE("zero-density proposals are never accepted") {
  const CylinderRingTarget ring(0.10, 0.16, 0.0, 0.03, 0.6);
  Rng rng(8);
  std::vector<SketchSample> sketch;
  for (int i = 0; i < 30; ++i) {
    const Pose p = random_pose(rng, 0.05);
    sketch.push_back({p, ring.quality(p), false});
  }
  const Pose good{UnitQuat::rot_z(M_PI), Vec3(0.115, 0.0, 0.0)};
  REQUIRE(ring.is_success(good));
  ChainState state = ChainState::from_sketch(good, ring, sketch);
  KameleonParams params = toy_params();
  params.gamma = 0.5;  // huge isotropic noise: most proposals leave the shell
  params.nu = 0.0;
  int rejected_zero = 0;
  for (int i = 0; i < 300; ++i) {
    const ChainRecord rec = kameleon_step(state, ring, params, rng);
    if (!rec.accepted) ++rejected_zero;
    CHECK(std::isfinite(state.current_log_density));
  }
  CHECK(rejected_zero > 200);
}

TEST_CASE("a frozen chain is a deterministic function of the rng stream") {
  const MixtureTarget t = unimodal();
  auto run = [&t]() {
    Rng rng(99);
    const auto sketch = toy_sketch(t, 50, rng);
    ChainState state = ChainState::from_sketch(Pose{}, t, sketch);
    const KameleonParams params = toy_params();
    for (int i = 0; i < 20; ++i) kameleon_step(state, t, params, rng);
    state.freeze(subsample_history(state, params.n, rng));
    std::vector<double> trace;
    for (int i = 0; i < 100; ++i) {
      kameleon_step(state, t, params, rng);
      trace.push_back(state.current_log_density);
      const Ambient7 v = embed(state.current);
      for (int k = 0; k < 7; ++k) trace.push_back(v[k]);
    }
    return trace;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
