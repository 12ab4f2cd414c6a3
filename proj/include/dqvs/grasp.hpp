#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "dqvs/algebra.hpp"

namespace dqvs {

/// Contact-moment features of one gripper finger: weight, feature
/// covariance (SPD, d x d) and the per-patch feature difference vectors.
struct FingerFeatures {
  double weight = 1.0;                  // omega_i
  Eigen::MatrixXd sigma;                // d x d, positive definite
  std::vector<Eigen::VectorXd> psi;     // n vectors of dimension d
};

struct GraspCandidate {
  int id = 0;
  Pose grasp;                     // object frame
  double pregrasp_offset = 0.10;  // meters, along the approach (tool z) axis
  double gamma = 1.0;
  double normalizer = 1.0;        // N_s > 0
  std::vector<FingerFeatures> fingers;
  std::optional<double> precomputed_score;
};

/// Contact-moment grasp score: per finger the mean Gaussian similarity
/// (1/N_s) sum_j exp(-psi_j' Sigma^-1 psi_j / 2) -- the (2 pi)^n |Sigma|
/// prefactor cancels the Gaussian normalization -- combined as
/// gamma * prod C_i^omega_i. Throws on a non-PD covariance.
double locomo_score(const GraspCandidate& candidate);

/// precomputed_score when present, otherwise locomo_score.
double candidate_score(const GraspCandidate& candidate);

/// Pre-grasp: the grasp retracted by `offset` along its own approach
/// (tool z) axis.
Pose pregrasp_pose(const Pose& grasp, double offset);

/// Grasp and pre-grasp mapped into the world through the object pose.
struct RankedGrasp {
  int id = 0;
  double locomo = 0.0;
  Pose world_grasp;
  Pose world_pregrasp;
};

RankedGrasp to_world(const GraspCandidate& candidate, const Pose& object_pose);

std::vector<RankedGrasp> to_world(const std::vector<GraspCandidate>& candidates,
                                  const Pose& object_pose);

}  // namespace dqvs
