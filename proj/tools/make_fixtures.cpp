// Regenerates the bundled fixture files under a target directory (the
// repository ships the output in data/). Usage: make_fixtures <dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "dqvs/grasp.hpp"
#include "dqvs/io.hpp"
#include "dqvs/kinematics.hpp"

using namespace dqvs;

namespace {

std::string pose_coeffs(const Pose& p) {
  std::string out;
  for (double c : p.coeffs()) {
    if (!out.empty()) out += ' ';
    out += format_double(c);
  }
  return out;
}

void write_chain(const std::filesystem::path& path) {
  const KinematicChain arm = reference_arm();
  std::ofstream os(path);
  os << "dqvs-chain v1\n";
  for (const JointModel& j : arm.joints()) {
    os << "joint " << format_double(j.axis[0]) << ' '
       << format_double(j.axis[1]) << ' ' << format_double(j.axis[2]) << ' '
       << pose_coeffs(j.origin) << ' ' << format_double(j.lower) << ' '
       << format_double(j.upper) << ' ' << format_double(j.mean) << '\n';
  }
  os << "tool " << pose_coeffs(arm.tool()) << '\n';
}

Pose top_down_grasp(double yaw) {
  return Pose::from_rotation(
             UnitQuaternion::from_axis_angle(Vec3::UnitZ(), yaw)) *
         Pose::from_rotation(
             UnitQuaternion::from_axis_angle(Vec3::UnitX(), M_PI)) *
         Pose::from_translation(Vec3(0, 0, -0.02));
}

Pose side_grasp(double yaw) {
  return Pose::from_rotation(
             UnitQuaternion::from_axis_angle(Vec3::UnitZ(), yaw)) *
         Pose::from_rotation(
             UnitQuaternion::from_axis_angle(Vec3::UnitY(), -M_PI / 2)) *
         Pose::from_translation(Vec3(0, 0, -0.02));
}

// Feature blocks sized so the computed scores decrease with `spread`.
void write_candidate(std::ofstream& os, int id, const Pose& grasp,
                     double spread) {
  os << "candidate " << id << '\n';
  os << "grasp " << pose_coeffs(grasp) << '\n';
  os << "offset 0.1\n";
  os << "gamma 1\n";
  os << "ns 3\n";
  for (int finger = 0; finger < 2; ++finger) {
    os << "finger 1 2 3\n";
    os << "sigma 0.04 0.01 0.01 0.03\n";
    for (int patch = 0; patch < 3; ++patch) {
      const double a = spread * (0.02 + 0.015 * patch + 0.01 * finger);
      const double b = spread * (0.01 + 0.012 * patch);
      os << "psi " << format_double(a) << ' ' << format_double(b) << '\n';
    }
  }
}

void write_box_grasps(const std::filesystem::path& path) {
  std::ofstream os(path);
  os << "dqvs-grasps v1\n";
  write_candidate(os, 1, top_down_grasp(0.0), 1.0);
  write_candidate(os, 2, top_down_grasp(M_PI / 2), 2.0);
  write_candidate(os, 3, side_grasp(0.0), 3.0);
  write_candidate(os, 4, side_grasp(M_PI / 2), 4.0);
  write_candidate(os, 5, side_grasp(M_PI), 5.0);
  write_candidate(os, 6, side_grasp(-M_PI / 2), 6.0);
}

void write_drift_grasps(const std::filesystem::path& path) {
  std::ofstream os(path);
  os << "dqvs-grasps v1\n";
  // Far-side approach (pre-grasp beyond the object, away from the robot):
  // the highest scored grasp, but the first to leave the workspace.
  os << "candidate 1\n";
  os << "grasp "
     << pose_coeffs(Pose::from_rotation(UnitQuaternion::from_axis_angle(
            Vec3::UnitY(), -M_PI / 2)))
     << '\n';
  os << "offset 0.12\n";
  os << "score 0.95\n";
  // Near-side approach, lower score, reachable much longer.
  os << "candidate 2\n";
  os << "grasp "
     << pose_coeffs(Pose::from_rotation(UnitQuaternion::from_axis_angle(
            Vec3::UnitY(), M_PI / 2)))
     << '\n';
  os << "offset 0.12\n";
  os << "score 0.6\n";
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream os(path);
  os << body;
}

std::string start_pose_line(const Vec3& t) {
  return "start_pose " + pose_coeffs(Pose::from_translation(t)) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);

  write_chain(dir / "arm7.chain");
  write_box_grasps(dir / "box.grasps");
  write_drift_grasps(dir / "drift.grasps");

  write_file(dir / "static.scenario",
             "dqvs-scenario v1\n"
             "chain arm7.chain\n"
             "grasps box.grasps\n"
             "gains 2.0 -0.005 1e-3 0.05\n"
             "trajectory h_line\n"
             "speed 0\n" +
                 start_pose_line(Vec3(0.45, 0.0, 0.45)) +
                 "q_start 0 0.5 0 1.4 0 1.0 0\n"
                 "observation 0 0 1\n"
                 "selection 3 0.05\n"
                 "ik_iters 200\n"
                 "max_duration 60\n");

  write_file(dir / "grid.scenario",
             "dqvs-scenario v1\n"
             "chain arm7.chain\n"
             "grasps box.grasps\n"
             "gains 12.0 -0.02 1e-3 0.01\n"
             "trajectory h_line\n"
             "speed 0.01\n"
             "length 0.25\n"
             "radii 0.15 0.08\n"
             "amplitude 0.15\n"
             "frequency 0.02\n"
             "rotation 0.0872664625997165\n" +
                 start_pose_line(Vec3(0.50, -0.12, 0.25)) +
                 "q_start 0 0.5 0 1.4 0 1.0 2.8\n"
                 "observation 0 0 1\n"
                 "selection 5 0.05\n"
                 "ik_iters 160\n"
                 "max_duration 150\n");

  write_file(dir / "hysteresis.scenario",
             "dqvs-scenario v1\n"
             "chain arm7.chain\n"
             "grasps box.grasps\n"
             "gains 12.0 -0.02 1e-3 0.02\n"
             "trajectory ellipse\n"
             "radii 0.15 0.08\n"
             "frequency 0.02\n" +
                 start_pose_line(Vec3(0.50, -0.12, 0.25)) +
                 "q_start 0 0.5 0 1.4 0 1.0 0\n"
                 "observation 0.002 0 77\n"
                 "selection 5 0.05\n"
                 "ik_iters 80\n"
                 "pregrasp_threshold 1e-9\n"
                 "max_duration 40\n");

  write_file(dir / "drift.scenario",
             "dqvs-scenario v1\n"
             "chain arm7.chain\n"
             "grasps drift.grasps\n"
             "gains 12.0 -0.02 1e-3 0.01\n"
             "trajectory v_line\n"
             "speed 0.02\n"
             "length 0.6\n" +
                 start_pose_line(Vec3(0.66, 0.0, 0.25)) +
                 "q_start 0 0.5 0 1.4 0 1.0 0\n"
                 "observation 0 0 1\n"
                 "selection 2 0.05\n"
                 "ik_iters 160\n"
                 "max_duration 60\n");

  std::cout << "fixtures written to " << dir.string() << "\n";
  return 0;
}
