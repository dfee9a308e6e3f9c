#include "gad/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace gad {

static void check_params(const KernelParams& p) {
  if (!(p.sigma > 0.0) || !(p.ell > 0.0) || !(p.c >= 0.0))
    throw std::invalid_argument("KernelParams: require sigma > 0, ell > 0, c >= 0");
}

double kernel_eval(const Pose& a, const Pose& b, const KernelParams& params) {
  check_params(params);
  const double d = d_mag_linearized(a, b, params.c);
  return params.sigma * params.sigma *
         std::exp(-d * d / (2.0 * params.ell * params.ell));
}

// In ambient coordinates x = (q, t) the linearized squared distance to a
// fixed pose z collapses to
//   d^2 = 2 - 2 |<q/|q|, z.rot>| + c |z.tra - t|^2
// since (conj(p) r).w = <p, r> and the conjugate rotation preserves the
// translation norm. Differentiating through the normalization at |q| = 1
// gives the closed forms below.
std::optional<Ambient7> kernel_grad(const Pose& y, const Pose& z,
                                    const KernelParams& params) {
  check_params(params);
  const double dot = y.rot.dot(z.rot);
  if (std::abs(dot) <= 1e-9) return std::nullopt;  // canonicalization boundary
  const double s = dot > 0.0 ? 1.0 : -1.0;
  const double k = kernel_eval(y, z, params);
  const double inv_ell2 = 1.0 / (params.ell * params.ell);

  Eigen::Vector4d q(y.rot.w, y.rot.x, y.rot.y, y.rot.z);
  Eigen::Vector4d r(z.rot.w, z.rot.x, z.rot.y, z.rot.z);

  Ambient7 g;
  g.head<4>() = (k * s * inv_ell2) * (r - dot * q);
  g.tail<3>() = (k * params.c * inv_ell2) * (z.tra - y.tra);
  return g;
}

GradientMatrix gradient_matrix(std::span<const Pose> z, const Pose& y,
                               double eta, const KernelParams& params) {
  if (z.empty()) throw std::invalid_argument("gradient_matrix: empty subsample");
  GradientMatrix m(7, static_cast<Eigen::Index>(z.size()));
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    const auto g = kernel_grad(y, z[static_cast<std::size_t>(i)], params);
    if (g)
      m.col(i) = (2.0 * eta) * (*g);
    else
      m.col(i).setZero();
  }
  return m;
}

Matrix7d proposal_covariance(const GradientMatrix& m, double gamma, double nu) {
  if (!(gamma > 0.0)) throw std::invalid_argument("proposal_covariance: gamma must be > 0");
  // M H M^T = (M H)(M H)^T because H is a symmetric projection.
  const Ambient7 mean = m.rowwise().mean();
  const GradientMatrix centered = m.colwise() - mean;
  Matrix7d c = (nu * nu) * (centered * centered.transpose());
  c.diagonal().array() += gamma * gamma;
  return 0.5 * (c + c.transpose());
}

}  // namespace gad
