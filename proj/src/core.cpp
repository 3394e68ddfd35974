#include "uapp/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "uapp/errors.hpp"

namespace uapp {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double distance(Vec2 a, Vec2 b) { return norm(a - b); }

ReferencePath::ReferencePath(std::vector<Vec2> points, double speed_limit)
    : points_(std::move(points)), speed_limit_(speed_limit) {
  if (points_.size() < 2) throw InvalidArgument("reference path needs at least 2 points");
  if (!(speed_limit_ > 0.0) || !std::isfinite(speed_limit_))
    throw InvalidArgument("reference path speed limit must be positive");
  arclength_.reserve(points_.size());
  arclength_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y))
      throw InvalidArgument("reference path point is not finite");
    const double len = distance(points_[i - 1], points_[i]);
    if (!(len > 0.0)) throw InvalidArgument("reference path has repeated consecutive points");
    arclength_.push_back(arclength_.back() + len);
  }
}

std::size_t ReferencePath::segment_at(double s) const {
  const auto it = std::upper_bound(arclength_.begin(), arclength_.end(), s);
  if (it == arclength_.begin()) return 0;
  const auto idx = static_cast<std::size_t>(std::distance(arclength_.begin(), it)) - 1;
  return std::min(idx, points_.size() - 2);
}

Vec2 ReferencePath::tangent(std::size_t segment) const {
  const Vec2 delta = points_[segment + 1] - points_[segment];
  return (1.0 / norm(delta)) * delta;
}

Vec2 ReferencePath::point_at(double s, double d) const {
  const std::size_t seg = segment_at(s);
  const Vec2 t = tangent(seg);
  const Vec2 left{-t.y, t.x};
  return points_[seg] + (s - arclength_[seg]) * t + d * left;
}

Vec2 ReferencePath::tangent_at(double s) const { return tangent(segment_at(s)); }

PathProjection project_to_path(Vec2 point, const ReferencePath& path) {
  const auto& pts = path.points();
  const auto& arc = path.cumulative_arclength();
  double best_dist2 = std::numeric_limits<double>::infinity();
  PathProjection best;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 seg = pts[i + 1] - pts[i];
    const double len = arc[i + 1] - arc[i];
    const Vec2 rel = point - pts[i];
    const double along = std::clamp(dot(rel, seg) / (len * len), 0.0, 1.0);
    const Vec2 foot = pts[i] + along * seg;
    const Vec2 off = point - foot;
    const double dist2 = dot(off, off);
    if (dist2 < best_dist2) {
      best_dist2 = dist2;
      const double side = cross(seg, rel) >= 0.0 ? 1.0 : -1.0;
      best.s = arc[i] + along * len;
      best.d = side * std::sqrt(dist2);
    }
  }
  return best;
}

AgentState step_dynamics(const AgentState& state, Control u, double dt) {
  AgentState next = state;
  const double v_end = state.v + u.a * dt;
  if (v_end >= 0.0) {
    next.s = state.s + state.v * dt + 0.5 * u.a * dt * dt;
    next.v = v_end;
  } else {
    // u.a < 0 here; the car stops at t* = -v/a and stays put.
    const double t_stop = -state.v / u.a;
    next.s = state.s + state.v * t_stop + 0.5 * u.a * t_stop * t_stop;
    next.v = 0.0;
  }
  next.s = std::max(next.s, state.s);
  return next;
}

namespace {

struct SegmentHit {
  double t_a;  // fraction along segment a
  double t_b;  // fraction along segment b
};

std::optional<SegmentHit> intersect_segments(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const Vec2 r = a1 - a0;
  const Vec2 q = b1 - b0;
  const double denom = cross(r, q);
  const Vec2 w = b0 - a0;
  constexpr double kEps = 1e-12;
  if (std::abs(denom) < kEps * norm(r) * norm(q)) return std::nullopt;  // parallel or collinear
  const double t = cross(w, q) / denom;
  const double u = cross(w, r) / denom;
  if (t < -kEps || t > 1.0 + kEps || u < -kEps || u > 1.0 + kEps) return std::nullopt;
  return SegmentHit{std::clamp(t, 0.0, 1.0), std::clamp(u, 0.0, 1.0)};
}

}  // namespace

ConflictPoint find_conflict_point(const ReferencePath& path_ego, const ReferencePath& path_other) {
  const auto& pe = path_ego.points();
  const auto& po = path_other.points();
  const auto& ae = path_ego.cumulative_arclength();
  const auto& ao = path_other.cumulative_arclength();
  std::optional<ConflictPoint> best;
  for (std::size_t i = 0; i + 1 < pe.size(); ++i) {
    for (std::size_t j = 0; j + 1 < po.size(); ++j) {
      const auto hit = intersect_segments(pe[i], pe[i + 1], po[j], po[j + 1]);
      if (!hit) continue;
      ConflictPoint cp;
      cp.s_ego = ae[i] + hit->t_a * (ae[i + 1] - ae[i]);
      cp.s_other = ao[j] + hit->t_b * (ao[j + 1] - ao[j]);
      cp.position = pe[i] + hit->t_a * (pe[i + 1] - pe[i]);
      if (!best || cp.s_ego < best->s_ego ||
          (cp.s_ego == best->s_ego && cp.s_other < best->s_other)) {
        best = cp;
      }
    }
    // Segments are visited in ego-arclength order, so the first segment with
    // any hit already holds the minimum.
    if (best) break;
  }
  if (!best) throw NoConflict("reference paths do not intersect");
  return *best;
}

Scene::Scene(ReferencePath ego, ReferencePath other)
    : path_ego(std::move(ego)), path_other(std::move(other)),
      conflict(find_conflict_point(path_ego, path_other)) {}

Scene::Scene(ReferencePath ego, ReferencePath other, ConflictPoint cp)
    : path_ego(std::move(ego)), path_other(std::move(other)), conflict(cp) {}

Scene Scene::swapped() const {
  ConflictPoint cp = conflict;
  std::swap(cp.s_ego, cp.s_other);
  return Scene(path_other, path_ego, cp);
}

}  // namespace uapp
