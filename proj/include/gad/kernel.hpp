#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "gad/geometry.hpp"

namespace gad {

using Matrix7d = Eigen::Matrix<double, 7, 7>;
using GradientMatrix = Eigen::Matrix<double, 7, Eigen::Dynamic>;

struct KernelParams {
  double sigma = 1.0;  // amplitude, > 0
  double ell = 1.0;    // length scale, > 0
  double c = 0.0;      // translation weight, >= 0
};

// sigma^2 exp(-d_mag_linearized(a, b, c)^2 / (2 ell^2)); range (0, sigma^2].
double kernel_eval(const Pose& a, const Pose& b, const KernelParams& params);

// Analytic gradient of kernel_eval with respect to the 7 ambient coordinates
// of the first argument. Empty when |<y.rot, z.rot>| <= 1e-9, i.e. at the
// double-cover canonicalization boundary; the caller substitutes a zero
// column there.
std::optional<Ambient7> kernel_grad(const Pose& y, const Pose& z,
                                    const KernelParams& params);

// 7 x n matrix with column i = 2 eta * kernel_grad(y, z_i); boundary columns
// are zero-filled.
GradientMatrix gradient_matrix(std::span<const Pose> z, const Pose& y,
                               double eta, const KernelParams& params);

// gamma^2 I + nu^2 M H M^T with H the n x n centering matrix. Exactly
// symmetric, minimum eigenvalue >= gamma^2 up to rounding.
Matrix7d proposal_covariance(const GradientMatrix& m, double gamma, double nu);

}  // namespace gad
