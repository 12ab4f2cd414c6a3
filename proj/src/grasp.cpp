#include "dqvs/grasp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dqvs {

double locomo_score(const GraspCandidate& candidate) {
  if (!(candidate.normalizer > 0.0)) {
    throw std::invalid_argument("candidate " + std::to_string(candidate.id) +
                                ": N_s must be positive");
  }
  double score = candidate.gamma;
  for (std::size_t f = 0; f < candidate.fingers.size(); ++f) {
    const FingerFeatures& finger = candidate.fingers[f];
    const std::string where = "candidate " + std::to_string(candidate.id) +
                              " finger " + std::to_string(f);
    if (finger.sigma.rows() != finger.sigma.cols() ||
        finger.sigma.rows() == 0) {
      throw std::invalid_argument(where + ": covariance is not square");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(finger.sigma);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument(where +
                                  ": covariance is not positive definite");
    }
    double contact_moment = 0.0;
    for (const Eigen::VectorXd& psi : finger.psi) {
      if (psi.size() != finger.sigma.rows()) {
        throw std::invalid_argument(where + ": feature dimension mismatch");
      }
      contact_moment += std::exp(-0.5 * psi.dot(llt.solve(psi)));
    }
    contact_moment /= candidate.normalizer;
    score *= std::pow(contact_moment, finger.weight);
  }
  return score;
}

double candidate_score(const GraspCandidate& candidate) {
  return candidate.precomputed_score.has_value()
             ? *candidate.precomputed_score
             : locomo_score(candidate);
}

Pose pregrasp_pose(const Pose& grasp, double offset) {
  return grasp * Pose::from_translation(Vec3(0.0, 0.0, -offset));
}

RankedGrasp to_world(const GraspCandidate& candidate,
                     const Pose& object_pose) {
  RankedGrasp out;
  out.id = candidate.id;
  out.locomo = candidate_score(candidate);
  out.world_grasp = object_pose * candidate.grasp;
  out.world_pregrasp = pregrasp_pose(out.world_grasp, candidate.pregrasp_offset);
  return out;
}

std::vector<RankedGrasp> to_world(const std::vector<GraspCandidate>& candidates,
                                  const Pose& object_pose) {
  std::vector<RankedGrasp> out;
  out.reserve(candidates.size());
  for (const GraspCandidate& c : candidates) {
    out.push_back(to_world(c, object_pose));
  }
  return out;
}

}  // namespace dqvs
