#include "dqvs/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace dqvs {

void ControllerGains::validate() const {
  if (!(proportional > 0.0)) {
    throw std::invalid_argument("gains: proportional gain must be > 0");
  }
  if (secondary > 0.0) {
    throw std::invalid_argument("gains: secondary gain must be <= 0");
  }
  if (!(damping > 0.0)) {
    throw std::invalid_argument("gains: damping must be > 0");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("gains: dt must be > 0");
  }
}

ControllerState ControllerState::make(const KinematicChain& chain,
                                      const Eigen::VectorXd& q,
                                      const Pose& x_d) {
  ControllerState s;
  s.q = q;
  s.x_c = forward_kinematics(chain, q);
  s.x_d = x_d;
  return s;
}

Pose pose_error(const Pose& x_c, const Pose& x_d) {
  return x_c.inverse() * x_d;
}

Twist control_twist(const Pose& error) { return error.log(); }

Twist twist_to_base(const Pose& x_c, const Twist& w_body) {
  return adjoint(x_c, w_body);
}

LyapunovSample lyapunov_value(const Pose& error) {
  LyapunovSample s;
  s.V1 = 2.0 * (1.0 - error.primary().eta());
  s.V2 = error.dual().eta() * error.dual().eta() +
         error.dual().mu().squaredNorm();
  s.V = s.V1 + s.V2;
  return s;
}

namespace {

// Commanded twist expressed in the (world angular rate; tool-point velocity)
// convention of the geometric Jacobian: the body-frame log rotated into base
// axes. Using the full adjoint here would add a t x w term that belongs to
// the origin-referenced twist convention, not to this Jacobian.
Twist commanded_base_twist(const Pose& x_c, const Pose& error) {
  const Twist body = control_twist(error);
  return adjoint(Pose::from_rotation(x_c.rotation()), body);
}

}  // namespace

Eigen::VectorXd joint_update(const ControllerState& state,
                             const KinematicChain& chain,
                             const ControllerGains& gains) {
  const Pose error = pose_error(state.x_c, state.x_d);
  const Twist base = commanded_base_twist(state.x_c, error);
  const Jacobian jac = geometric_jacobian(chain, state.q);
  return state.q + gains.proportional * gains.dt *
                       (damped_pinv(jac, gains.damping) * vec6(base));
}

Eigen::VectorXd joint_update_nullspace(const ControllerState& state,
                                       const KinematicChain& chain,
                                       const ControllerGains& gains) {
  Eigen::VectorXd q_next = joint_update(state, chain, gains);
  if (gains.secondary != 0.0) {
    const Jacobian jac = geometric_jacobian(chain, state.q);
    const Eigen::MatrixXd projector =
        null_space_projector(jac, gains.damping);
    q_next += gains.secondary *
              (projector * (state.q - chain.mean_config()));
  }
  return q_next;
}

StepOutcome step(const ControllerState& state, const KinematicChain& chain,
                 const ControllerGains& gains, bool use_nullspace) {
  StepOutcome out;
  const Pose error = pose_error(state.x_c, state.x_d);
  out.lyapunov = lyapunov_value(error);
  out.commanded = commanded_base_twist(state.x_c, error);

  const Eigen::VectorXd q_raw = use_nullspace
                                    ? joint_update_nullspace(state, chain, gains)
                                    : joint_update(state, chain, gains);

  // How far the damped inverse falls short of the commanded twist; joins the
  // clamp flag as an annotation for Lyapunov monitoring.
  const Jacobian jac = geometric_jacobian(chain, state.q);
  const Vec6 commanded = vec6(out.commanded);
  const Vec6 realizable =
      jac * (damped_pinv(jac, gains.damping) * commanded);
  out.damping_residual = (commanded - realizable).lpNorm<Eigen::Infinity>();

  out.state.q = chain.clamp(q_raw, &out.clamped);
  out.state.x_c = forward_kinematics(chain, out.state.q);
  out.state.x_d = state.x_d;
  out.state.iteration = state.iteration + 1;
  return out;
}

IkResult ik_feasible(const KinematicChain& chain,
                     const Eigen::VectorXd& q_start, const Pose& target,
                     const ControllerGains& gains, int max_iter, double tol) {
  IkResult result;
  ControllerState state = ControllerState::make(
      chain, chain.clamp(q_start), target);
  result.residual = distance(state.x_c, target);
  for (int i = 0; i < max_iter && result.residual >= tol; ++i) {
    const Eigen::VectorXd q_next = chain.clamp(joint_update(state, chain, gains));
    const double progress = (q_next - state.q).lpNorm<Eigen::Infinity>();
    state.q = q_next;
    state.x_c = forward_kinematics(chain, q_next);
    result.iterations = i + 1;
    result.residual = distance(state.x_c, target);
    if (progress < 1e-13) break;  // pinned at limits or fully converged
  }
  result.q = state.q;
  result.feasible = result.residual < tol && chain.within_limits(result.q);
  return result;
}

}  // namespace dqvs
