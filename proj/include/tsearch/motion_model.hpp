#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsearch/geometry.hpp"

namespace tsearch {

/// Kinematic limits. The same acceleration bound applies along and across
/// the line to the goal.
struct MotionModel {
  double v_max = 2.0;
  double a_max = 1.5;
  double w_max = 1.2;

  void validate() const {
    if (!(v_max > 0.0 && a_max > 0.0 && w_max > 0.0))
      throw std::invalid_argument("motion limits must be positive");
  }
};

struct AgentState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
};

/// Time to cover `l` metres starting at speed `v_ali` under constant
/// acceleration a_max, capped at v_max. Negative v_ali is treated as 0.
inline double time_aligned(double v_ali, double l, const MotionModel& m) {
  if (l <= 0.0) return 0.0;
  const double v0 = std::clamp(v_ali, 0.0, m.v_max);
  const double a = m.a_max;
  const double cap_dist = (m.v_max * m.v_max - v0 * v0) / (2.0 * a);
  if (cap_dist < l) return (m.v_max - v0) / a + (l - cap_dist) / m.v_max;
  return (std::sqrt(v0 * v0 + 2.0 * a * l) - v0) / a;
}

/// Distance covered after `t` seconds of the same accelerate-then-cruise
/// profile (inverse of time_aligned for t within the manoeuvre).
inline double profile_distance(double v_ali, double t, const MotionModel& m) {
  const double v0 = std::clamp(v_ali, 0.0, m.v_max);
  const double t_acc = (m.v_max - v0) / m.a_max;
  if (t <= t_acc) return v0 * t + 0.5 * m.a_max * t * t;
  return v0 * t_acc + 0.5 * m.a_max * t_acc * t_acc + m.v_max * (t - t_acc);
}

inline double profile_speed(double v_ali, double t, const MotionModel& m) {
  const double v0 = std::clamp(v_ali, 0.0, m.v_max);
  return std::min(m.v_max, v0 + m.a_max * t);
}

/// Inverse of profile_distance.
inline double profile_time_at(double v_ali, double s, const MotionModel& m) {
  return time_aligned(v_ali, s, m);
}

struct VelocitySplit {
  double aligned = 0.0;        // along the goal direction, clamped at 0
  double perpendicular = 0.0;  // magnitude across it
};

/// Splits `velocity` relative to the straight line from `from` to `to`. With
/// coincident points the whole velocity counts as perpendicular.
inline VelocitySplit split_velocity(const Vec3& velocity, const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double n = d.norm();
  if (n == 0.0) return {0.0, velocity.norm()};
  const Vec3 u = d / n;
  const double along = velocity.dot(u);
  return {std::max(0.0, along), (velocity - along * u).norm()};
}

/// Cost from the current state to a viewpoint reached over a path of
/// length `l`: the slowest of the aligned manoeuvre, cancelling the
/// perpendicular velocity, and turning to the goal yaw.
inline double state_cost(const AgentState& s, const Vec3& goal, double goal_yaw, double l,
                         const MotionModel& m) {
  const VelocitySplit v = split_velocity(s.velocity, s.position, goal);
  const double t_ali = time_aligned(v.aligned, l, m);
  const double t_per = 2.0 * v.perpendicular / m.a_max;
  const double t_yaw = std::abs(wrap_angle(s.yaw - goal_yaw)) / m.w_max;
  return std::max({t_ali, t_per, t_yaw});
}

/// Cost between two poses a path of length `l` apart.
inline double pair_cost(double yaw_i, double yaw_j, double l, const MotionModel& m) {
  return std::max(l / m.v_max, std::abs(wrap_angle(yaw_i - yaw_j)) / m.w_max);
}

}  // namespace tsearch
