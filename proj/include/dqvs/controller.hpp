#pragma once

#include <Eigen/Dense>

#include "dqvs/algebra.hpp"
#include "dqvs/kinematics.hpp"

namespace dqvs {

struct ControllerGains {
  double proportional = 2.0;  // K > 0; K*dt is the effective step size
  double secondary = -0.05;   // Ks <= 0, null-space attraction toward mean
  double damping = 1e-3;      // lambda of the damped pseudo-inverse
  double dt = 0.05;           // loop period, seconds

  void validate() const;
};

struct ControllerState {
  Eigen::VectorXd q;
  Pose x_c;  // cached forward kinematics of q
  Pose x_d;
  long iteration = 0;

  static ControllerState make(const KinematicChain& chain,
                              const Eigen::VectorXd& q, const Pose& x_d);
};

struct LyapunovSample {
  double V = 0.0;
  double V1 = 0.0;  // 2 (1 - etaP) of the error
  double V2 = 0.0;  // squared norm of the error's dual part
};

/// Error to regulate: e = xc* xd. Identity iff the poses coincide.
Pose pose_error(const Pose& x_c, const Pose& x_d);

/// Commanded end-effector twist in the body frame: log(e).
Twist control_twist(const Pose& error);

/// Frame transformation of a body twist into the base frame, Ad(xc) w.
Twist twist_to_base(const Pose& x_c, const Twist& w_body);

LyapunovSample lyapunov_value(const Pose& error);

/// One proportional joint-space update toward state.x_d (no limit clamp).
Eigen::VectorXd joint_update(const ControllerState& state,
                             const KinematicChain& chain,
                             const ControllerGains& gains);

/// joint_update plus the null-space secondary step Ks P (q - qbar).
/// Bit-identical to joint_update when Ks = 0.
Eigen::VectorXd joint_update_nullspace(const ControllerState& state,
                                       const KinematicChain& chain,
                                       const ControllerGains& gains);

struct StepOutcome {
  ControllerState state;
  LyapunovSample lyapunov;   // of the error at the start of the step
  Twist commanded;           // base-frame commanded twist
  bool clamped = false;      // a joint limit saturated this step
  double damping_residual = 0.0;  // inf-norm gap between commanded and
                                  // realizable twist through the damped pinv
};

/// One closed-loop iteration: error, twist, joint update (clamped to the
/// joint limits), FK refresh.
StepOutcome step(const ControllerState& state, const KinematicChain& chain,
                 const ControllerGains& gains, bool use_nullspace);

struct IkResult {
  bool feasible = false;
  Eigen::VectorXd q;
  double residual = 0.0;  // final spatial distance to the target
  int iterations = 0;
};

/// Runs the servo loop from q_start toward `target` for at most max_iter
/// iterations. Feasible iff the final distance drops below `tol` with the
/// configuration inside the joint limits. Infeasible is a valid result.
IkResult ik_feasible(const KinematicChain& chain,
                     const Eigen::VectorXd& q_start, const Pose& target,
                     const ControllerGains& gains, int max_iter,
                     double tol = 1e-3);

}  // namespace dqvs
