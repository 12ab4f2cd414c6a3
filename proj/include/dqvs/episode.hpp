#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "dqvs/controller.hpp"
#include "dqvs/grasp.hpp"
#include "dqvs/kinematics.hpp"
#include "dqvs/observation.hpp"
#include "dqvs/selection.hpp"
#include "dqvs/trajectory.hpp"

namespace dqvs {

struct EpisodeConfig {
  KinematicChain chain = reference_arm();
  std::vector<GraspCandidate> grasps;
  ControllerGains gains;
  TrajectoryScript trajectory;
  ObservationModel observation;
  SelectionOptions selection;
  double switch_delta = 0.05;
  double pregrasp_sse_threshold = 1e-4;  // sum of squared error coefficients
  double grasp_tol_translation = 0.002;  // m
  double grasp_tol_rotation = 0.5 * M_PI / 180.0;  // rad
  double max_duration = 120.0;  // s
  Eigen::VectorXd q_start;      // empty: mean configuration
  bool use_nullspace = true;
  bool use_rerank = true;
};

enum class Phase { pre_grasp = 0, grasp = 1 };

struct StepRecord {
  long iteration = 0;
  double t = 0.0;
  Eigen::VectorXd q;
  std::array<double, 8> error{};   // e = xc* xd coefficients
  double err_translation = 0.0;    // m
  double err_rotation = 0.0;       // rad
  double V = 0.0, V1 = 0.0, V2 = 0.0;
  bool clamped = false;
  std::array<double, 8> object{};  // true object pose
  int grasp_id = -1;
  int phase = 0;
  double upsilon = 0.0;            // re-rank value of the active grasp
};

struct EpisodeResult {
  bool success = false;
  int switches = 0;
  double time_to_grasp = -1.0;  // s, valid when success
  int clamp_events = 0;
  std::vector<StepRecord> telemetry;
  std::vector<std::pair<double, double>> no_grasp_intervals;  // [start, end) s
};

/// Closed-loop episode: per tick the object advances, its pose is observed,
/// the world grasps update, re-ranking picks the pre-grasp reference, and
/// the controller steps. Once the squared error to the pre-grasp falls
/// below the threshold the reference becomes the grasp pose and re-ranking
/// freezes (two-point reach). Success once the grasp-phase error is inside
/// the convergence tolerances; the object then stops.
EpisodeResult run_episode(const EpisodeConfig& config);

struct AblationRow {
  std::string trajectory;
  bool rotation = false;
  std::string variant;  // full | no_nullspace | no_rerank
  bool success = false;
  bool switches_na = false;  // re-ranking disabled
  int switches = 0;
  double time_to_grasp = -1.0;
  int clamp_events = 0;
};

/// The 5 trajectories x {rot, no-rot} x {full, no_nullspace, no_rerank}
/// grid. Episodes are independent; the parallel lane fans them out and the
/// rows always come back ordered by grid index.
std::vector<AblationRow> ablation_suite(const EpisodeConfig& base,
                                        bool parallel = true);

std::string ablation_table(const std::vector<AblationRow>& rows);

}  // namespace dqvs
