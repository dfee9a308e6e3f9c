#include "gad/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace gad {

UnitQuat::UnitQuat(double w_, double x_, double y_, double z_) {
  *this = from(Quat{w_, x_, y_, z_});
}

UnitQuat UnitQuat::from(const Quat& q) {
  auto u = try_normalize(q);
  if (!u) throw std::invalid_argument("UnitQuat: near-zero quaternion norm");
  return *u;
}

std::optional<UnitQuat> UnitQuat::try_normalize(const Quat& q) {
  const double n = q.norm();
  if (!(n > 1e-9)) return std::nullopt;
  return make_unchecked(q.w / n, q.x / n, q.y / n, q.z / n);
}

UnitQuat UnitQuat::canonical() const {
  if (w > 0.0) return *this;
  if (w < 0.0) return negated();
  // w == 0: tie-break on the first nonzero component.
  if (x != 0.0) return x > 0.0 ? *this : negated();
  if (y != 0.0) return y > 0.0 ? *this : negated();
  return z >= 0.0 ? *this : negated();
}

Vec3 UnitQuat::rotate(const Vec3& v) const {
  // v' = v + 2 u x (u x v + w v), u = (x, y, z)
  const Vec3 u(x, y, z);
  const Vec3 t = 2.0 * u.cross(v);
  return v + w * t + u.cross(t);
}

UnitQuat UnitQuat::axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw std::invalid_argument("axis_angle: zero axis");
  const double h = 0.5 * angle;
  const double s = std::sin(h) / n;
  return UnitQuat(std::cos(h), s * axis.x(), s * axis.y(), s * axis.z());
}

Pose pose_compose(const Pose& a, const Pose& b) {
  return {a.rot * b.rot, a.tra + a.rot.rotate(b.tra)};
}

Pose pose_conjugate(const Pose& a) {
  const UnitQuat rc = a.rot.conjugated();
  return {rc, -rc.rotate(a.tra)};
}

TransformDelta relative_transform(const Pose& a, const Pose& b) {
  const Pose rel = pose_compose(pose_conjugate(a), b);
  return {rel.rot.canonical(), rel.tra};
}

double d_arc(const UnitQuat& q, const UnitQuat& r) {
  // Chord form of arccos(|<q, r>|): exact at coincidence, where acos would
  // amplify rounding in the dot product to ~1e-8.
  const UnitQuat rs = q.dot(r) < 0.0 ? r.negated() : r;
  const double half_chord =
      0.5 * std::sqrt((q.w - rs.w) * (q.w - rs.w) + (q.x - rs.x) * (q.x - rs.x) +
                      (q.y - rs.y) * (q.y - rs.y) + (q.z - rs.z) * (q.z - rs.z));
  return 2.0 * std::asin(std::min(1.0, half_chord));
}

static void require_nonnegative_c(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("translation weight c must be >= 0");
}

double d_mag(const Pose& a, const Pose& b, double c) {
  require_nonnegative_c(c);
  const TransformDelta v = relative_transform(a, b);
  const double arc = d_arc(UnitQuat(), v.rot);
  return std::sqrt(arc * arc + c * v.tra.squaredNorm());
}

double d_mag_linearized(const Pose& a, const Pose& b, double c) {
  require_nonnegative_c(c);
  const TransformDelta v = relative_transform(a, b);
  const double dw = 1.0 - v.rot.w;
  const double chord2 =
      dw * dw + v.rot.x * v.rot.x + v.rot.y * v.rot.y + v.rot.z * v.rot.z;
  return std::sqrt(chord2 + c * v.tra.squaredNorm());
}

Ambient7 embed(const Pose& p) {
  Ambient7 v;
  v << p.rot.w, p.rot.x, p.rot.y, p.rot.z, p.tra.x(), p.tra.y(), p.tra.z();
  return v;
}

std::optional<Pose> project(const Ambient7& v) {
  auto rot = UnitQuat::try_normalize(Quat{v[0], v[1], v[2], v[3]});
  if (!rot) return std::nullopt;
  return Pose{*rot, Vec3(v[4], v[5], v[6])};
}

}  // namespace gad
