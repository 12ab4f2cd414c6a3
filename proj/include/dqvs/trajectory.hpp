#pragma once

#include <string>

#include "dqvs/algebra.hpp"

namespace dqvs {

enum class TrajectoryKind { h_line, v_line, diagonal, ellipse, sine };

/// Scripted object motion, analytic in t. Line kinds translate the start
/// pose at `speed` until `length` is covered, then hold. The ellipse orbits
/// the start pose in the table plane, phase 0 at (+radius_a, 0). The sine
/// wave advances along y with a lateral x oscillation. `rotation_rate`
/// additionally spins the object about its own vertical axis.
struct TrajectoryScript {
  TrajectoryKind kind = TrajectoryKind::h_line;
  Pose start_pose;
  double speed = 0.01;       // m/s, line kinds and the sine advance
  double length = 0.30;      // m, travel before the object stops; <= 0: endless
  double radius_a = 0.15;    // m, ellipse
  double radius_b = 0.08;    // m, ellipse
  double amplitude = 0.15;   // m, sine
  double frequency = 0.02;   // Hz, ellipse revolution and sine oscillation
  bool with_rotation = false;
  double rotation_rate = 5.0 * M_PI / 180.0;  // rad/s about the object z axis
};

TrajectoryKind trajectory_kind_from_string(const std::string& name);
std::string to_string(TrajectoryKind kind);

Pose trajectory_pose(const TrajectoryScript& script, double t);

}  // namespace dqvs
