#include "dqvs/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dqvs {

namespace {

void check_length(const KinematicChain& chain, const Eigen::VectorXd& q,
                  const char* what) {
  if (q.size() != chain.dof()) {
    throw std::invalid_argument(std::string(what) + ": config has " +
                                std::to_string(q.size()) + " joints, chain has " +
                                std::to_string(chain.dof()));
  }
}

}  // namespace

KinematicChain::KinematicChain(std::vector<JointModel> joints, Pose tool)
    : joints_(std::move(joints)), tool_(tool) {
  if (joints_.empty()) {
    throw std::invalid_argument("KinematicChain: needs at least one joint");
  }
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const JointModel& j = joints_[i];
    const std::string where = "joint " + std::to_string(i);
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument(where + ": axis is not unit length");
    }
    if (!(j.lower < j.upper)) {
      throw std::invalid_argument(where + ": lower limit must be below upper");
    }
    if (j.mean < j.lower || j.mean > j.upper) {
      throw std::invalid_argument(where + ": mean position outside limits");
    }
  }
}

Eigen::VectorXd KinematicChain::mean_config() const {
  Eigen::VectorXd q(dof());
  for (int i = 0; i < dof(); ++i) q[i] = joints_[i].mean;
  return q;
}

Eigen::VectorXd KinematicChain::lower_limits() const {
  Eigen::VectorXd q(dof());
  for (int i = 0; i < dof(); ++i) q[i] = joints_[i].lower;
  return q;
}

Eigen::VectorXd KinematicChain::upper_limits() const {
  Eigen::VectorXd q(dof());
  for (int i = 0; i < dof(); ++i) q[i] = joints_[i].upper;
  return q;
}

bool KinematicChain::within_limits(const Eigen::VectorXd& q,
                                   double tol) const {
  check_length(*this, q, "within_limits");
  for (int i = 0; i < dof(); ++i) {
    if (q[i] < joints_[i].lower - tol || q[i] > joints_[i].upper + tol) {
      return false;
    }
  }
  return true;
}

Eigen::VectorXd KinematicChain::clamp(const Eigen::VectorXd& q,
                                      bool* clamped) const {
  check_length(*this, q, "clamp");
  Eigen::VectorXd out = q;
  bool hit = false;
  for (int i = 0; i < dof(); ++i) {
    if (out[i] < joints_[i].lower) {
      out[i] = joints_[i].lower;
      hit = true;
    } else if (out[i] > joints_[i].upper) {
      out[i] = joints_[i].upper;
      hit = true;
    }
  }
  if (clamped != nullptr) *clamped = hit;
  return out;
}

Pose forward_kinematics(const KinematicChain& chain,
                        const Eigen::VectorXd& q) {
  check_length(chain, q, "forward_kinematics");
  Pose x;
  for (int i = 0; i < chain.dof(); ++i) {
    const JointModel& j = chain.joints()[i];
    x = x * j.origin *
        Pose::from_rotation(UnitQuaternion::from_axis_angle(j.axis, q[i]));
  }
  return x * chain.tool();
}

Jacobian geometric_jacobian(const KinematicChain& chain,
                            const Eigen::VectorXd& q) {
  check_length(chain, q, "geometric_jacobian");
  Jacobian jac(6, chain.dof());
  Pose x;  // frame before the current joint's rotation
  std::vector<Vec3> axes(chain.dof());
  std::vector<Vec3> origins(chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    const JointModel& j = chain.joints()[i];
    x = x * j.origin;
    axes[i] = x.rotation().rotate(j.axis);
    origins[i] = x.translation();
    x = x * Pose::from_rotation(UnitQuaternion::from_axis_angle(j.axis, q[i]));
  }
  const Vec3 tip = (x * chain.tool()).translation();
  for (int i = 0; i < chain.dof(); ++i) {
    jac.col(i).head<3>() = axes[i];
    jac.col(i).tail<3>() = axes[i].cross(tip - origins[i]);
  }
  return jac;
}

Eigen::MatrixXd damped_pinv(const Jacobian& jacobian, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("damped_pinv: lambda must be positive");
  }
  Eigen::Matrix<double, 6, 6> gram =
      jacobian * jacobian.transpose() +
      lambda * Eigen::Matrix<double, 6, 6>::Identity();
  // J^T (J J^T + lambda I)^-1, using symmetry of the Gram matrix.
  return gram.ldlt().solve(jacobian).transpose();
}

Eigen::MatrixXd null_space_projector(const Jacobian& jacobian, double lambda) {
  const Eigen::MatrixXd pinv = damped_pinv(jacobian, lambda);
  const int n = static_cast<int>(jacobian.cols());
  return Eigen::MatrixXd::Identity(n, n) - pinv * jacobian;
}

KinematicChain reference_arm() {
  const double kZLimit = 170.0 * M_PI / 180.0;
  const double kYLimit = 120.0 * M_PI / 180.0;
  const double lengths[7] = {0.34, 0.0, 0.40, 0.0, 0.40, 0.0, 0.0};
  std::vector<JointModel> joints(7);
  for (int i = 0; i < 7; ++i) {
    JointModel& j = joints[i];
    const bool z_joint = (i % 2 == 0);
    j.axis = z_joint ? Vec3::UnitZ() : Vec3::UnitY();
    j.origin = Pose::from_translation(Vec3(0.0, 0.0, lengths[i]));
    j.upper = z_joint ? kZLimit : kYLimit;
    j.lower = -j.upper;
    j.mean = 0.0;
  }
  return KinematicChain(std::move(joints),
                        Pose::from_translation(Vec3(0.0, 0.0, 0.126)));
}

}  // namespace dqvs
