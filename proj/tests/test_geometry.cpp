#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gad/geometry.hpp"
#include "test_util.hpp"

using namespace gad;
using test::random_pose;
using test::random_unit_quat;

TEST_CASE("compose identity and inverse") {
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    const Pose p = random_pose(rng);
    CHECK(d_mag_linearized(pose_compose(Pose{}, p), p, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(d_mag_linearized(pose_compose(p, Pose{}), p, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
    const Pose id = pose_compose(p, pose_conjugate(p));
    CHECK(d_mag_linearized(id, Pose{}, 1.0) < 1e-9);
    const Pose id2 = pose_compose(pose_conjugate(p), p);
    CHECK(d_mag_linearized(id2, Pose{}, 1.0) < 1e-9);
  }
}

TEST_CASE("compose rotates the second translation into the first frame") {
  const Pose a{UnitQuat::rot_z(M_PI / 2.0), Vec3::Zero()};
  const Pose b{UnitQuat(), Vec3(1.0, 0.0, 0.0)};
  const Pose ab = pose_compose(a, b);
  CHECK(ab.tra.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ab.tra.y() == doctest::Approx(1.0));
  CHECK(ab.tra.z() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("conjugate is an involution") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const Pose p = random_pose(rng);
    CHECK(d_mag_linearized(pose_conjugate(pose_conjugate(p)), p, 1.0) < 1e-9);
  }
}

TEST_CASE("group laws on random triples") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    const Pose left = pose_compose(pose_compose(a, b), c);
    const Pose right = pose_compose(a, pose_compose(b, c));
    CHECK(d_mag_linearized(left, right, 1.0) < 1e-9);
  }
}

TEST_CASE("relative_transform recovers the delta, canonicalized") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Pose a = random_pose(rng);
    const Pose d = random_pose(rng, 0.3);
    const Pose b = pose_compose(a, d);
    const TransformDelta rel = relative_transform(a, b);
    CHECK(rel.rot.w >= 0.0);
    const UnitQuat dc = d.rot.canonical();
    CHECK(std::abs(std::abs(rel.rot.dot(d.rot)) - 1.0) < 1e-9);
    CHECK((rel.tra - d.tra).norm() < 1e-9);
    CHECK(std::abs(rel.rot.w - dc.w) < 1e-9);
  }
  const Pose p = random_pose(rng);
  const TransformDelta self = relative_transform(p, p);
  CHECK(self.rot.w == doctest::Approx(1.0));
  CHECK(self.tra.norm() < 1e-12);
}

TEST_CASE("d_arc basics") {
  Rng rng(5);
  const UnitQuat q = random_unit_quat(rng);
  CHECK(d_arc(q, q) == doctest::Approx(0.0));
  CHECK(d_arc(q, q.negated()) == doctest::Approx(0.0));
  CHECK(d_arc(UnitQuat(), UnitQuat::rot_z(M_PI / 2.0)) == doctest::Approx(M_PI / 4.0));
  for (int i = 0; i < 1000; ++i) {
    const UnitQuat a = random_unit_quat(rng), b = random_unit_quat(rng);
    CHECK(d_arc(a, b) == doctest::Approx(d_arc(b, a)));
    CHECK(d_arc(a, b) >= 0.0);
    CHECK(d_arc(a, b) <= M_PI / 2.0 + 1e-12);
  }
}

TEST_CASE("d_mag identities") {
  Rng rng(9);
  const Pose p = random_pose(rng);
  CHECK(d_mag(p, p, 0.7) == doctest::Approx(0.0));
  CHECK_THROWS(d_mag(p, p, -1.0));
  CHECK_THROWS(d_mag_linearized(p, p, -0.5));

  // c = 0 ignores translation.
  Pose q = p;
  q.tra += Vec3(5.0, -2.0, 1.0);
  CHECK(d_mag(p, q, 0.0) == doctest::Approx(d_arc(p.rot, q.rot)));

  // Pure translation with c = 1 gives the Euclidean norm.
  Pose r = p;
  r.tra += Vec3(0.3, 0.4, 0.0);
  CHECK(d_mag(p, r, 1.0) == doctest::Approx(0.5));
  CHECK(d_mag_linearized(p, r, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("d_mag symmetry and double-cover invariance") {
  Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    const double c = 0.5;
    CHECK(d_mag(a, b, c) == doctest::Approx(d_mag(b, a, c)).epsilon(1e-9));
    CHECK(d_mag_linearized(a, b, c) == doctest::Approx(d_mag_linearized(b, a, c)).epsilon(1e-9));
    Pose an = a;
    an.rot = an.rot.negated();
    CHECK(d_mag(an, b, c) == doctest::Approx(d_mag(a, b, c)).epsilon(1e-12));
    CHECK(d_mag_linearized(a, {b.rot.negated(), b.tra}, c) ==
          doctest::Approx(d_mag_linearized(a, b, c)).epsilon(1e-12));
  }
}

TEST_CASE("linearized distance tracks the arc for small rotations") {
  // Chord-vs-arc comparison over a grid of small pure rotations.
  for (double theta = 0.01; theta <= 0.2; theta += 0.01) {
    const Pose a;
    const Pose b{UnitQuat::rot_y(theta), Vec3::Zero()};
    const double exact = d_mag(a, b, 0.0);
    const double lin = d_mag_linearized(a, b, 0.0);
    CHECK(std::abs(lin - exact) <= 0.01 * exact);
  }
}

TEST_CASE("embed/project round trip and degenerate input") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Pose p = random_pose(rng);
    const auto back = project(embed(p));
    REQUIRE(back.has_value());
    CHECK(d_mag_linearized(*back, p, 1.0) < 1e-12);
  }
  Ambient7 v;
  v << 2, 0, 0, 0, 1, 2, 3;
  const auto p = project(v);
  REQUIRE(p.has_value());
  CHECK(p->rot.w == doctest::Approx(1.0));
  CHECK(p->tra.x() == doctest::Approx(1.0));
  CHECK(p->tra.z() == doctest::Approx(3.0));
  v << 0, 0, 0, 0, 1, 2, 3;
  CHECK(!project(v).has_value());
}

TEST_CASE("canonical representative") {
  const UnitQuat q = UnitQuat(-0.5, 0.5, 0.5, -0.5).canonical();
  CHECK(q.w == doctest::Approx(0.5));
  CHECK(q.x == doctest::Approx(-0.5));
  const UnitQuat r = UnitQuat(0.0, -1.0, 0.0, 0.0).canonical();
  CHECK(r.x == doctest::Approx(1.0));
}
