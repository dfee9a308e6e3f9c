#include "gad/vmf.hpp"

#include <cmath>
#include <stdexcept>

namespace gad {

static UnitQuat uniform_sphere4(Rng& rng) {
  for (;;) {
    const Quat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    if (auto u = UnitQuat::try_normalize(q)) return *u;
  }
}

// Wood (1994) for p = 4: cosine w ~ envelope via Beta(3/2, 3/2), tangent
// direction uniform on S^2, then a Householder reflection carries the
// e1-centered draw onto the requested mean.
UnitQuat vmf_sample(const UnitQuat& mean, double kappa, Rng& rng) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("vmf_sample: kappa must be >= 0");
  if (kappa == 0.0) return uniform_sphere4(rng);

  const double p1 = 3.0;  // p - 1
  const double b = (-2.0 * kappa + std::sqrt(4.0 * kappa * kappa + p1 * p1)) / p1;
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + p1 * std::log(1.0 - x0 * x0);

  double w;
  for (;;) {
    const double z = rng.beta(0.5 * p1, 0.5 * p1);
    const double u = rng.uniform();
    w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    if (kappa * w + p1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
  }

  Vec3 dir;
  do {
    dir = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (dir.norm() <= 1e-12);
  dir.normalize();

  const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
  Eigen::Vector4d draw(w, s * dir.x(), s * dir.y(), s * dir.z());

  // Householder reflection mapping e1 to the mean direction.
  Eigen::Vector4d mu(mean.w, mean.x, mean.y, mean.z);
  Eigen::Vector4d u = Eigen::Vector4d::UnitX() - mu;
  const double un2 = u.squaredNorm();
  if (un2 > 1e-24) draw -= (2.0 * u.dot(draw) / un2) * u;

  return UnitQuat(draw[0], draw[1], draw[2], draw[3]);
}

}  // namespace gad
