#include "dqvs/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace dqvs {

TrajectoryKind trajectory_kind_from_string(const std::string& name) {
  if (name == "h_line") return TrajectoryKind::h_line;
  if (name == "v_line") return TrajectoryKind::v_line;
  if (name == "diagonal") return TrajectoryKind::diagonal;
  if (name == "ellipse") return TrajectoryKind::ellipse;
  if (name == "sine") return TrajectoryKind::sine;
  throw std::invalid_argument("unknown trajectory kind: " + name);
}

std::string to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::h_line: return "h_line";
    case TrajectoryKind::v_line: return "v_line";
    case TrajectoryKind::diagonal: return "diagonal";
    case TrajectoryKind::ellipse: return "ellipse";
    case TrajectoryKind::sine: return "sine";
  }
  return "?";
}

Pose trajectory_pose(const TrajectoryScript& script, double t) {
  if (t < 0.0) {
    throw std::invalid_argument("trajectory_pose: negative time");
  }
  // Line kinds and the sine advance stop once `length` is covered.
  double t_travel = t;
  if (script.length > 0.0 && script.speed > 0.0) {
    t_travel = std::min(t, script.length / script.speed);
  }

  Vec3 offset = Vec3::Zero();
  switch (script.kind) {
    case TrajectoryKind::h_line:
      offset = Vec3(0.0, script.speed * t_travel, 0.0);
      break;
    case TrajectoryKind::v_line:
      offset = Vec3(script.speed * t_travel, 0.0, 0.0);
      break;
    case TrajectoryKind::diagonal:
      offset = Vec3(script.speed * t_travel, script.speed * t_travel, 0.0) *
               M_SQRT1_2;
      break;
    case TrajectoryKind::ellipse: {
      const double phase = 2.0 * M_PI * script.frequency * t;
      offset = Vec3(script.radius_a * std::cos(phase),
                    script.radius_b * std::sin(phase), 0.0);
      break;
    }
    case TrajectoryKind::sine: {
      const double phase = 2.0 * M_PI * script.frequency * t_travel;
      offset = Vec3(script.amplitude * std::sin(phase),
                    script.speed * t_travel, 0.0);
      break;
    }
  }

  Pose pose = Pose::from_translation(offset) * script.start_pose;
  if (script.with_rotation) {
    pose = pose * Pose::from_rotation(UnitQuaternion::from_axis_angle(
                      Vec3::UnitZ(), script.rotation_rate * t));
  }
  return pose;
}

}  // namespace dqvs
