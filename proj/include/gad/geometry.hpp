#pragma once

#include <optional>

#include <Eigen/Dense>

namespace gad {

using Vec3 = Eigen::Vector3d;

// Ambient coordinates of a pose: [qw, qx, qy, qz, tx, ty, tz]. Gaussian
// proposals and kernel gradients are expressed here; the rotation block is
// renormalized on projection back to a Pose.
using Ambient7 = Eigen::Matrix<double, 7, 1>;

// General (not necessarily unit) quaternion.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }
  Quat conjugated() const { return {w, -x, -y, -z}; }
  double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

// Unit quaternion; normalized on every construction. q and -q denote the
// same rotation, canonical() fixes the representative with w >= 0.
struct UnitQuat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  UnitQuat() = default;
  UnitQuat(double w_, double x_, double y_, double z_);

  static std::optional<UnitQuat> try_normalize(const Quat& q);

  Quat as_quat() const { return {w, x, y, z}; }
  UnitQuat conjugated() const { return make_unchecked(w, -x, -y, -z); }
  UnitQuat negated() const { return make_unchecked(-w, -x, -y, -z); }
  UnitQuat operator*(const UnitQuat& o) const { return UnitQuat::from(as_quat() * o.as_quat()); }
  double dot(const UnitQuat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

  // Representative with w >= 0; at w = 0 the first nonzero of (x, y, z) is
  // made nonnegative.
  UnitQuat canonical() const;

  Vec3 rotate(const Vec3& v) const;

  static UnitQuat from(const Quat& q);
  static UnitQuat axis_angle(const Vec3& axis, double angle);
  static UnitQuat rot_x(double a) { return axis_angle(Vec3::UnitX(), a); }
  static UnitQuat rot_y(double a) { return axis_angle(Vec3::UnitY(), a); }
  static UnitQuat rot_z(double a) { return axis_angle(Vec3::UnitZ(), a); }

 private:
  static UnitQuat make_unchecked(double w_, double x_, double y_, double z_) {
    UnitQuat q;
    q.w = w_;
    q.x = x_;
    q.y = y_;
    q.z = z_;
    return q;
  }
};

// Rigid transform, the sampler state. Equivalent to the dual quaternion
// rot + eps * tra with the dual unit implicit in the (rot, tra) split.
struct Pose {
  UnitQuat rot;
  Vec3 tra = Vec3::Zero();
};

// conj(a) * b decomposed into rotational and translational parts, with the
// rotation canonicalized to w >= 0 (double-cover representative).
struct TransformDelta {
  UnitQuat rot;
  Vec3 tra = Vec3::Zero();
};

// "a then b applied in a's frame".
Pose pose_compose(const Pose& a, const Pose& b);

// Inverse rigid transform.
Pose pose_conjugate(const Pose& a);

TransformDelta relative_transform(const Pose& a, const Pose& b);

// Arc section between two quaternions, minimized over the double cover;
// range [0, pi/2].
double d_arc(const UnitQuat& q, const UnitQuat& r);

// Transformation-magnitude distance: sqrt(d_arc(q0, v_rot)^2 + c |v_tra|^2).
// Rejects c < 0.
double d_mag(const Pose& a, const Pose& b, double c);

// Same with the arc replaced by the Euclidean distance between q0 and the
// canonicalized v_rot; smooth almost everywhere, used by the kernel.
double d_mag_linearized(const Pose& a, const Pose& b, double c);

Ambient7 embed(const Pose& p);

// Renormalizes the rotation block; empty when its norm is below 1e-9
// (degenerate proposal, caller must reject).
std::optional<Pose> project(const Ambient7& v);

}  // namespace gad
