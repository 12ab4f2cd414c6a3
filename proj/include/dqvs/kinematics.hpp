#pragma once

#include <Eigen/Dense>

#include <vector>

#include "dqvs/algebra.hpp"

namespace dqvs {

/// One revolute joint: a fixed transform from the previous joint frame
/// followed by a rotation about `axis` (unit, in the joint's parent frame).
struct JointModel {
  Vec3 axis = Vec3::UnitZ();
  Pose origin;
  double lower = -M_PI;
  double upper = M_PI;
  double mean = 0.0;  // secondary-task rest position, default (lower+upper)/2
};

class KinematicChain {
 public:
  KinematicChain(std::vector<JointModel> joints, Pose tool);

  int dof() const { return static_cast<int>(joints_.size()); }
  const std::vector<JointModel>& joints() const { return joints_; }
  const Pose& tool() const { return tool_; }

  Eigen::VectorXd mean_config() const;
  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;

  bool within_limits(const Eigen::VectorXd& q, double tol = 0.0) const;
  /// Hard clamp to [lower, upper]; sets *clamped when any joint saturated.
  Eigen::VectorXd clamp(const Eigen::VectorXd& q,
                        bool* clamped = nullptr) const;

 private:
  std::vector<JointModel> joints_;
  Pose tool_;
};

using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Tool pose in the base frame: product over joints of
/// origin_i * rot(axis_i, q_i), then the tool transform.
Pose forward_kinematics(const KinematicChain& chain, const Eigen::VectorXd& q);

/// Geometric Jacobian mapping joint rates to the vec6 twist
/// (world angular velocity; world velocity of the tool point).
/// Column i is (w_i ; w_i x (p_ee - p_i)) for world joint axis w_i through
/// the joint origin p_i.
Jacobian geometric_jacobian(const KinematicChain& chain,
                            const Eigen::VectorXd& q);

/// Damped pseudo-inverse J^T (J J^T + lambda I6)^-1; defined at
/// singularities for any lambda > 0.
Eigen::MatrixXd damped_pinv(const Jacobian& jacobian, double lambda);

/// Null-space projector P = I - J^+ J.
Eigen::MatrixXd null_space_projector(const Jacobian& jacobian, double lambda);

/// Bundled 7-DoF reference arm: alternating z/y axes, link lengths
/// 0.34 / 0.40 / 0.40 m plus a 0.126 m tool offset, limits +-170deg on the
/// z joints and +-120deg on the y joints.
KinematicChain reference_arm();

}  // namespace dqvs
