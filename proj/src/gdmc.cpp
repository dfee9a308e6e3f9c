#include "gad/gdmc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gad {

namespace {

constexpr double kEigenFloor = 1e-10;

// Ambient embedding with the quaternion sign flipped toward the reference
// rotation; prevents spurious two-unit jumps across the double cover.
Ambient7 embed_aligned(const Pose& p, const UnitQuat& reference) {
  Pose q = p;
  if (q.rot.dot(reference) < 0.0) q.rot = q.rot.negated();
  return embed(q);
}

Eigen::MatrixXd sample_covariance(const std::vector<Ambient7>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd data(7, n);
  for (Eigen::Index i = 0; i < n; ++i) data.col(i) = points[static_cast<std::size_t>(i)];
  const Eigen::VectorXd mean = data.rowwise().mean();
  data.colwise() -= mean;
  return data * data.transpose() / static_cast<double>(n - 1);
}

JumpRegion region_from_covariance(const Pose& center, const Eigen::MatrixXd& cov,
                                  double omega, VolumeMode volume_mode) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  JumpRegion region;
  region.center = center;
  region.basis = eig.eigenvectors();
  // Match the ellipsoid to the fitted Gaussian's bulk: a d-dimensional draw
  // sits at squared Mahalanobis radius ~ d, so the unit-radius ellipsoid of
  // the raw covariance would exclude nearly all of the mode's mass and darts
  // would almost never trigger.
  region.eigenvalues =
      (static_cast<double>(cov.rows()) * eig.eigenvalues()).cwiseMax(kEigenFloor);
  region.omega = omega;
  region.volume = ellipsoid_volume(
      omega, std::span<const double>(region.eigenvalues.data(),
                                     static_cast<std::size_t>(region.eigenvalues.size())),
      volume_mode);
  return region;
}

}  // namespace

double ellipsoid_volume(double omega, std::span<const double> eigenvalues,
                        VolumeMode mode) {
  const double d = static_cast<double>(eigenvalues.size());
  double prod = 1.0;
  for (double l : eigenvalues) prod *= mode == VolumeMode::sqrt_eigen ? std::sqrt(l) : l;
  return std::pow(M_PI, 0.5 * d) * std::pow(omega, d) * prod /
         std::tgamma(1.0 + 0.5 * d);
}

double standardized_radius(const Eigen::MatrixXd& basis,
                           const Eigen::VectorXd& eigenvalues,
                           const Eigen::VectorXd& delta) {
  const Eigen::VectorXd y = basis.transpose() * delta;
  return std::sqrt((y.array().square() / eigenvalues.array()).sum());
}

bool ellipsoid_contains(const Eigen::MatrixXd& basis,
                        const Eigen::VectorXd& eigenvalues, double omega,
                        const Eigen::VectorXd& delta) {
  return standardized_radius(basis, eigenvalues, delta) <= omega;
}

std::vector<JumpRegion> build_regions(std::span<const Pose> modes,
                                      std::span<const Pose> history,
                                      double omega, double metric_c,
                                      VolumeMode volume_mode) {
  if (modes.empty()) throw std::invalid_argument("build_regions: need at least one mode");

  // Nearest-mode assignment of the history, per the linearized pose metric.
  std::vector<std::vector<std::size_t>> assigned(modes.size());
  for (std::size_t i = 0; i < history.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double d = d_mag_linearized(history[i], modes[k], metric_c);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    assigned[best].push_back(i);
  }

  std::vector<JumpRegion> regions;
  regions.reserve(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    Eigen::MatrixXd cov;
    if (history.size() < 8) {
      cov = 1e-4 * Eigen::MatrixXd::Identity(7, 7);
    } else {
      std::vector<Ambient7> points;
      if (assigned[k].size() >= 8) {
        points.reserve(assigned[k].size());
        for (std::size_t i : assigned[k])
          points.push_back(embed_aligned(history[i], modes[k].rot));
      } else {
        points.reserve(history.size());
        for (const Pose& p : history)
          points.push_back(embed_aligned(p, modes[k].rot));
      }
      cov = sample_covariance(points);
    }
    regions.push_back(region_from_covariance(modes[k], cov, omega, volume_mode));
  }
  return regions;
}

bool contains(const JumpRegion& region, const Pose& x) {
  const Eigen::VectorXd delta =
      embed_aligned(x, region.center.rot) - embed(region.center);
  return ellipsoid_contains(region.basis, region.eigenvalues, region.omega, delta);
}

std::size_t select_region(std::span<const JumpRegion> regions, Rng& rng) {
  if (regions.empty()) throw std::invalid_argument("select_region: no regions");
  double total = 0.0;
  for (const auto& r : regions) total += r.volume;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    acc += regions[i].volume;
    if (u < acc) return i;
  }
  return regions.size() - 1;
}

std::optional<Pose> dart(const Pose& x, const JumpRegion& from,
                         const JumpRegion& to) {
  const Eigen::VectorXd delta =
      embed_aligned(x, from.center.rot) - embed(from.center);
  const Eigen::VectorXd u_std =
      from.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
      (from.basis.transpose() * delta);
  const Ambient7 out = embed(to.center) -
                       to.basis * (to.eigenvalues.cwiseSqrt().asDiagonal() * u_std);
  return project(out);
}

static std::size_t count_containing(std::span<const JumpRegion> regions,
                                    const Pose& x) {
  std::size_t n = 0;
  for (const auto& r : regions) n += contains(r, x) ? 1 : 0;
  return n;
}

bool dart_accept(const Pose& x, const Pose& x_new,
                 std::span<const JumpRegion> regions, const TargetDensity& target,
                 DartAcceptMode mode, Rng& rng) {
  const std::size_t n_old = count_containing(regions, x);
  const std::size_t n_new = count_containing(regions, x_new);

  if (mode == DartAcceptMode::reciprocal) {
    const double pi_old = target.quality(x);
    const double pi_new = target.quality(x_new);
    const double ratio = pi_new > 0.0
                             ? (static_cast<double>(n_old) * pi_old) /
                                   (static_cast<double>(n_new ? n_new : 1) * pi_new)
                             : std::numeric_limits<double>::infinity();
    const double p_accept = std::min(1.0, ratio);
    return rng.uniform() > p_accept;
  }

  // Standard darting MH: min{1, pi(x_new) n(x) / (pi(x) n(x_new))}.
  if (n_new == 0) return false;  // projection pushed the dart out; reject
  const double lp_new = target.log_density(x_new);
  if (std::isinf(lp_new) && lp_new < 0.0) return false;
  const double lp_old = target.log_density(x);
  const double log_alpha = lp_new + std::log(static_cast<double>(n_old)) -
                           lp_old - std::log(static_cast<double>(n_new));
  return log_alpha >= 0.0 || std::log(rng.uniform()) < log_alpha;
}

ChainRecord combined_step(ChainState& state, const TargetDensity& target,
                          std::span<const JumpRegion> regions,
                          const KameleonParams& kparams,
                          const DartingParams& dparams, Rng& rng) {
  const double u1 = rng.uniform();
  if (u1 < dparams.p_check) return kameleon_step(state, target, kparams, rng);

  // Darting check: find the tightest containing region.
  std::size_t from_idx = regions.size();
  double best_radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Eigen::VectorXd delta =
        embed_aligned(state.current, regions[i].center.rot) - embed(regions[i].center);
    const double r = standardized_radius(regions[i].basis, regions[i].eigenvalues, delta);
    if (r <= regions[i].omega && r < best_radius) {
      best_radius = r;
      from_idx = i;
    }
  }

  if (from_idx == regions.size()) {
    // Outside every jump region: the state is counted again.
    state.history.push_back(state.current);
    ++state.iteration;
    return {state.current, state.current_log_density, false, Branch::hold};
  }

  const std::size_t to_idx = select_region(regions, rng);
  const std::optional<Pose> x_new =
      dart(state.current, regions[from_idx], regions[to_idx]);
  bool accepted = false;
  if (x_new &&
      dart_accept(state.current, *x_new, regions, target, dparams.acceptance_mode, rng)) {
    accepted = true;
    state.current = *x_new;
    state.current_log_density = target.log_density(*x_new);
  }
  state.history.push_back(state.current);
  ++state.iteration;
  return {state.current, state.current_log_density, accepted, Branch::dart};
}

}  // namespace gad
