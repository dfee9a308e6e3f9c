#include "gad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace gad {

SuccessCounts count_successes(std::span<const ChainRecord> chain,
                              const TargetDensity& target, double dedup_c,
                              double dedup_eps) {
  SuccessCounts counts;
  std::vector<Pose> unique;
  for (const auto& rec : chain) {
    if (!rec.accepted || !target.is_success(rec.pose)) continue;
    ++counts.success_count;
    bool is_new = true;
    for (const Pose& u : unique) {
      if (d_mag_linearized(rec.pose, u, dedup_c) <= dedup_eps) {
        is_new = false;
        break;
      }
    }
    if (is_new) unique.push_back(rec.pose);
  }
  counts.unique_success_count = unique.size();
  return counts;
}

std::vector<AggregateRow> aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  std::map<SketchBias, std::vector<const RunMetrics*>> groups;
  for (const auto& r : runs) groups[r.bias].push_back(&r);

  std::vector<AggregateRow> rows;
  for (const auto& [bias, group] : groups) {
    AggregateRow row;
    row.bias = bias;
    row.runs = group.size();
    double sum = 0.0, sum_unique = 0.0;
    for (const auto* r : group) {
      sum += static_cast<double>(r->success_count);
      sum_unique += static_cast<double>(r->unique_success_count);
    }
    row.mean_successes = sum / static_cast<double>(group.size());
    row.mean_unique = sum_unique / static_cast<double>(group.size());
    if (group.size() > 1) {
      double ss = 0.0;
      for (const auto* r : group) {
        const double d = static_cast<double>(r->success_count) - row.mean_successes;
        ss += d * d;
      }
      row.std_successes = std::sqrt(ss / static_cast<double>(group.size() - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Quickhull.

namespace {

struct Face {
  int a, b, c;
  Vec3 normal;  // outward, unit
  double offset;
  std::vector<int> outside;
  bool alive = true;
};

double dist_to_face(const Face& f, const Vec3& p) {
  return f.normal.dot(p) - f.offset;
}

Face make_face(std::span<const Vec3> pts, int a, int b, int c, const Vec3& inside) {
  Face f{a, b, c, Vec3::Zero(), 0.0, {}, true};
  Vec3 n = (pts[static_cast<std::size_t>(b)] - pts[static_cast<std::size_t>(a)])
               .cross(pts[static_cast<std::size_t>(c)] - pts[static_cast<std::size_t>(a)]);
  const double len = n.norm();
  if (len > 0.0) n /= len;
  double off = n.dot(pts[static_cast<std::size_t>(a)]);
  if (n.dot(inside) - off > 0.0) {  // flip outward
    std::swap(f.b, f.c);
    n = -n;
    off = -off;
  }
  f.normal = n;
  f.offset = off;
  return f;
}

}  // namespace

HullResult convex_hull_area(std::span<const Vec3> points) {
  const std::size_t n = points.size();
  if (n < 4) return {0.0, true};

  // Initial simplex from extreme points.
  double scale = 0.0;
  for (const Vec3& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double eps_flat = 1e-12 * std::max(1.0, scale);

  std::size_t i0 = 0, i1 = 0;
  double best = -1.0;
  for (int axis = 0; axis < 3; ++axis) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (points[i][axis] < points[lo][axis]) lo = i;
      if (points[i][axis] > points[hi][axis]) hi = i;
    }
    const double d = (points[hi] - points[lo]).norm();
    if (d > best) {
      best = d;
      i0 = lo;
      i1 = hi;
    }
  }
  if (best <= eps_flat) return {0.0, true};

  const Vec3 dir = (points[i1] - points[i0]).normalized();
  std::size_t i2 = 0;
  best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 v = points[i] - points[i0];
    const double d = (v - v.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (best <= eps_flat) return {0.0, true};

  const Vec3 plane_n =
      (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  std::size_t i3 = 0;
  best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(plane_n.dot(points[i] - points[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (best <= eps_flat) return {0.0, true};  // coplanar point set

  const double eps = 1e-10 * std::max(1.0, scale);
  const Vec3 inside =
      0.25 * (points[i0] + points[i1] + points[i2] + points[i3]);

  std::vector<Face> faces;
  const int a = static_cast<int>(i0), b = static_cast<int>(i1),
            c = static_cast<int>(i2), d4 = static_cast<int>(i3);
  faces.push_back(make_face(points, a, b, c, inside));
  faces.push_back(make_face(points, a, b, d4, inside));
  faces.push_back(make_face(points, a, c, d4, inside));
  faces.push_back(make_face(points, b, c, d4, inside));

  // Assign every point to one face that sees it.
  for (std::size_t i = 0; i < n; ++i) {
    for (Face& f : faces) {
      if (dist_to_face(f, points[i]) > eps) {
        f.outside.push_back(static_cast<int>(i));
        break;
      }
    }
  }

  for (;;) {
    // Farthest outside point over all alive faces.
    int apex = -1;
    std::size_t seed_face = 0;
    double far = eps;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      const Face& f = faces[fi];
      if (!f.alive) continue;
      for (int pi : f.outside) {
        const double d = dist_to_face(f, points[static_cast<std::size_t>(pi)]);
        if (d > far) {
          far = d;
          apex = pi;
          seed_face = fi;
        }
      }
    }
    if (apex < 0) break;
    (void)seed_face;

    const Vec3& p = points[static_cast<std::size_t>(apex)];
    std::vector<std::size_t> visible;
    std::vector<int> orphans;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      Face& f = faces[fi];
      if (f.alive && dist_to_face(f, p) > eps) {
        visible.push_back(fi);
        f.alive = false;
        orphans.insert(orphans.end(), f.outside.begin(), f.outside.end());
        f.outside.clear();
      }
    }

    // Horizon = directed edges of visible faces whose reverse is not visible.
    std::vector<std::pair<int, int>> edges;
    for (std::size_t fi : visible) {
      const Face& f = faces[fi];
      edges.emplace_back(f.a, f.b);
      edges.emplace_back(f.b, f.c);
      edges.emplace_back(f.c, f.a);
    }
    std::vector<std::size_t> new_faces;
    for (const auto& [u, v] : edges) {
      const bool has_reverse =
          std::find(edges.begin(), edges.end(), std::make_pair(v, u)) != edges.end();
      if (has_reverse) continue;
      faces.push_back(make_face(points, u, v, apex, inside));
      new_faces.push_back(faces.size() - 1);
    }

    for (int pi : orphans) {
      if (pi == apex) continue;
      for (std::size_t fi : new_faces) {
        if (dist_to_face(faces[fi], points[static_cast<std::size_t>(pi)]) > eps) {
          faces[fi].outside.push_back(pi);
          break;
        }
      }
    }
  }

  double area = 0.0;
  for (const Face& f : faces) {
    if (!f.alive) continue;
    const Vec3& pa = points[static_cast<std::size_t>(f.a)];
    const Vec3& pb = points[static_cast<std::size_t>(f.b)];
    const Vec3& pc = points[static_cast<std::size_t>(f.c)];
    area += 0.5 * (pb - pa).cross(pc - pa).norm();
  }
  return {area, false};
}

}  // namespace gad
