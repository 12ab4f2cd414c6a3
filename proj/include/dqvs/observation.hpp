#pragma once

#include <cstdint>

#include "dqvs/algebra.hpp"

namespace dqvs {

/// Zero-mean pose noise standing in for a visual tracker. Per-axis normal
/// translation noise and a small-angle rotation perturbation. The stream
/// is a pure function of (seed, step), so observations are reproducible
/// regardless of evaluation order.
struct ObservationModel {
  double sigma_translation = 0.0;  // m, per axis
  double sigma_rotation = 0.0;     // rad
  std::uint64_t seed = 0;
};

Pose observe(const Pose& true_pose, const ObservationModel& model,
             std::uint64_t step);

}  // namespace dqvs
