#include "dqvs/observation.hpp"

#include <cmath>

namespace dqvs {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  // 53 mantissa bits, strictly inside (0, 1].
  return (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller, hand-rolled so the stream does not depend on the standard
// library's distribution internals.
void normal_pair(std::uint64_t& state, double& a, double& b) {
  const double u1 = uniform01(state);
  const double u2 = uniform01(state);
  const double r = std::sqrt(-2.0 * std::log(u1));
  a = r * std::cos(2.0 * M_PI * u2);
  b = r * std::sin(2.0 * M_PI * u2);
}

}  // namespace

Pose observe(const Pose& true_pose, const ObservationModel& model,
             std::uint64_t step) {
  if (model.sigma_translation == 0.0 && model.sigma_rotation == 0.0) {
    return true_pose;
  }
  std::uint64_t state = model.seed;
  splitmix64(state);
  state ^= step * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull;

  double n[6];
  normal_pair(state, n[0], n[1]);
  normal_pair(state, n[2], n[3]);
  normal_pair(state, n[4], n[5]);

  const Vec3 dt = model.sigma_translation * Vec3(n[0], n[1], n[2]);
  const Vec3 dr = model.sigma_rotation * Vec3(n[3], n[4], n[5]);

  UnitQuaternion rot = true_pose.rotation();
  const double angle = dr.norm();
  if (angle > 0.0) {
    rot = UnitQuaternion::from_axis_angle(dr / angle, angle) * rot;
  }
  return Pose::from_rt(rot, true_pose.translation() + dt);
}

}  // namespace dqvs
