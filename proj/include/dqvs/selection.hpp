#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dqvs/controller.hpp"
#include "dqvs/grasp.hpp"
#include "dqvs/kinematics.hpp"

namespace dqvs {

struct RerankResult {
  std::vector<double> upsilon;
  bool degenerate = false;  // dq_max == dq_min; all values fall back to 0
};

/// Grasp re-ranking: Upsilon_i = d_i / (d_max - d_min). Ordering by
/// Upsilon equals ordering by raw distance. When the spread is zero the
/// values fall back to 0 and the result is flagged degenerate.
RerankResult rerank(std::span<const double> distances);

struct SwitchState {
  int active_id = -1;  // -1: nothing selected yet
  double active_upsilon = 0.0;
  double delta = 0.05;  // switching threshold
};

struct SelectionOptions {
  int k = 5;                     // nearest candidates to consider
  int ik_max_iter = 300;         // feasibility servo budget
  double feasibility_tol = 1e-3; // spatial distance counting as reached
  std::uint64_t tree_seed = 0;
  bool parallel_feasibility = true;  // OpenMP lane over candidates
};

struct SelectionOutcome {
  SwitchState state;
  std::optional<RankedGrasp> chosen;  // empty: no feasible grasp available
  bool switched = false;              // active id changed this call
  bool degenerate = false;            // re-rank spread was zero
};

/// One re-ranking pass: k nearest grasps to the gripper under the spatial
/// distance (vp-tree), feasibility filter on the pre-grasp poses, re-rank,
/// then hysteresis switching -- the active grasp changes only when the best
/// candidate improves on it by at least delta or the active grasp dropped
/// out of the feasible set.
SelectionOutcome select_grasp(const SwitchState& state, const Pose& gripper,
                              std::span<const RankedGrasp> grasps,
                              const KinematicChain& chain,
                              const Eigen::VectorXd& q,
                              const ControllerGains& gains,
                              const SelectionOptions& options);

}  // namespace dqvs
