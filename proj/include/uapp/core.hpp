#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uapp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 a);
double distance(Vec2 a, Vec2 b);

/// Polyline reference path with cumulative arclength. Immutable once built.
class ReferencePath {
 public:
  /// Throws InvalidArgument on fewer than 2 points, repeated consecutive
  /// points or a non-positive speed limit.
  ReferencePath(std::vector<Vec2> points, double speed_limit);

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& cumulative_arclength() const { return arclength_; }
  double length() const { return arclength_.back(); }
  double speed_limit() const { return speed_limit_; }

  /// Index of the segment containing arclength s (clamped to the path).
  std::size_t segment_at(double s) const;
  Vec2 tangent(std::size_t segment) const;
  /// Cartesian position at arclength s with lateral offset d (positive left).
  /// Arclengths beyond the ends extrapolate along the end segments.
  Vec2 point_at(double s, double d = 0.0) const;
  Vec2 tangent_at(double s) const;

 private:
  std::vector<Vec2> points_;
  std::vector<double> arclength_;
  double speed_limit_;
};

struct AgentState {
  double s = 0.0;  // arclength along own path [m]
  double v = 0.0;  // longitudinal speed [m/s]
  double d = 0.0;  // lateral offset [m]

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct JointState {
  AgentState ego;
  AgentState other;
  int t = 0;

  friend bool operator==(const JointState&, const JointState&) = default;
};

/// Longitudinal acceleration [m/s^2].
struct Control {
  double a = 0.0;

  friend bool operator==(Control, Control) = default;
};

struct ConflictPoint {
  Vec2 position;
  double s_ego = 0.0;
  double s_other = 0.0;
};

struct PathProjection {
  double s = 0.0;
  double d = 0.0;
};

/// Closest point on the polyline; s is clamped to [0, length] and d is the
/// signed lateral offset, positive to the left of the travel direction.
PathProjection project_to_path(Vec2 point, const ReferencePath& path);

/// Path-constrained double integrator. Speed never goes negative: when the
/// control would reverse the car it stops exactly at the zero-speed instant.
AgentState step_dynamics(const AgentState& state, Control u, double dt);

/// First intersection of the two polylines ordered by ego arclength.
/// Throws NoConflict when the paths never cross.
ConflictPoint find_conflict_point(const ReferencePath& path_ego, const ReferencePath& path_other);

/// The two reference paths of an interaction and their conflict point.
struct Scene {
  ReferencePath path_ego;
  ReferencePath path_other;
  ConflictPoint conflict;

  /// Computes the conflict point; throws NoConflict.
  Scene(ReferencePath ego, ReferencePath other);
  Scene(ReferencePath ego, ReferencePath other, ConflictPoint cp);

  /// The same scene with the agent roles exchanged.
  Scene swapped() const;
};

}  // namespace uapp
