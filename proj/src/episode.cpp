#include "dqvs/episode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dqvs/parallel.hpp"

namespace dqvs {

namespace {

constexpr int kPostGraspHoldSteps = 20;

double rotation_angle(const Pose& error) {
  // Canonical error: etaP >= 0, so the angle lands in [0, pi].
  return 2.0 * std::atan2(error.primary().mu().norm(), error.primary().eta());
}

int index_of_id(const std::vector<RankedGrasp>& grasps, int id) {
  for (std::size_t i = 0; i < grasps.size(); ++i) {
    if (grasps[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int best_scored_candidate(const std::vector<GraspCandidate>& candidates) {
  int best = 0;
  double best_score = candidate_score(candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double s = candidate_score(candidates[i]);
    if (s > best_score) {
      best = static_cast<int>(i);
      best_score = s;
    }
  }
  return best;
}

}  // namespace

EpisodeResult run_episode(const EpisodeConfig& config) {
  config.gains.validate();
  if (config.grasps.empty()) {
    throw std::invalid_argument("run_episode: no grasp candidates");
  }

  EpisodeResult result;
  const KinematicChain& chain = config.chain;

  Eigen::VectorXd q = config.q_start.size() == 0
                          ? chain.mean_config()
                          : chain.clamp(config.q_start);
  ControllerState state = ControllerState::make(chain, q, Pose());

  SwitchState switching;
  switching.delta = config.switch_delta;
  SelectionOptions selection = config.selection;

  Phase phase = Phase::pre_grasp;
  int active_id = -1;
  double active_upsilon = 0.0;
  bool have_reference = false;
  Pose reference = state.x_c;

  if (!config.use_rerank) {
    active_id = config.grasps[best_scored_candidate(config.grasps)].id;
  }

  bool object_frozen = false;
  Pose frozen_pose;
  double no_grasp_open = -1.0;
  int hold_steps_left = -1;

  const long max_steps =
      static_cast<long>(std::ceil(config.max_duration / config.gains.dt));

  for (long k = 0; k <= max_steps; ++k) {
    const double t = static_cast<double>(k) * config.gains.dt;
    const Pose true_object =
        object_frozen ? frozen_pose : trajectory_pose(config.trajectory, t);
    const Pose observed = observe(true_object, config.observation,
                                  static_cast<std::uint64_t>(k));
    const std::vector<RankedGrasp> world = to_world(config.grasps, observed);

    if (phase == Phase::pre_grasp) {
      if (config.use_rerank) {
        const SelectionOutcome outcome =
            select_grasp(switching, state.x_c, world, chain, state.q,
                         config.gains, selection);
        if (outcome.chosen.has_value()) {
          switching = outcome.state;
          if (outcome.switched) ++result.switches;
          active_id = outcome.chosen->id;
          active_upsilon = switching.active_upsilon;
          reference = outcome.chosen->world_pregrasp;
          have_reference = true;
          if (no_grasp_open >= 0.0) {
            result.no_grasp_intervals.emplace_back(no_grasp_open, t);
            no_grasp_open = -1.0;
          }
        } else if (no_grasp_open < 0.0) {
          no_grasp_open = t;  // keep tracking the last reference
        }
      } else {
        const int idx = index_of_id(world, active_id);
        reference = world[idx].world_pregrasp;
        have_reference = true;
      }
      // Two-point reach: squared error below threshold hands the reference
      // over to the grasp pose and freezes re-ranking.
      if (have_reference) {
        const double sse = lyapunov_value(pose_error(state.x_c, reference)).V;
        if (sse < config.pregrasp_sse_threshold) {
          phase = Phase::grasp;
        }
      }
    }
    if (phase == Phase::grasp) {
      reference = world[index_of_id(world, active_id)].world_grasp;
    }

    const Pose error = pose_error(state.x_c, reference);
    const LyapunovSample lyap = lyapunov_value(error);

    StepRecord row;
    row.iteration = k;
    row.t = t;
    row.q = state.q;
    row.error = error.coeffs();
    row.err_translation =
        (state.x_c.translation() - reference.translation()).norm();
    row.err_rotation = rotation_angle(error);
    row.V = lyap.V;
    row.V1 = lyap.V1;
    row.V2 = lyap.V2;
    row.object = true_object.coeffs();
    row.grasp_id = active_id;
    row.phase = static_cast<int>(phase);
    row.upsilon = active_upsilon;

    if (!result.success && phase == Phase::grasp &&
        row.err_translation < config.grasp_tol_translation &&
        row.err_rotation < config.grasp_tol_rotation) {
      result.success = true;
      result.time_to_grasp = t;
      object_frozen = true;
      frozen_pose = true_object;
      hold_steps_left = kPostGraspHoldSteps;
    }

    state.x_d = reference;
    const StepOutcome outcome =
        step(state, chain, config.gains, config.use_nullspace);
    row.clamped = outcome.clamped;
    if (outcome.clamped) ++result.clamp_events;
    result.telemetry.push_back(std::move(row));
    state = outcome.state;

    if (hold_steps_left >= 0 && hold_steps_left-- == 0) break;
  }

  if (no_grasp_open >= 0.0) {
    result.no_grasp_intervals.emplace_back(
        no_grasp_open, result.telemetry.back().t);
  }
  return result;
}

std::vector<AblationRow> ablation_suite(const EpisodeConfig& base,
                                        bool parallel) {
  constexpr TrajectoryKind kKinds[] = {
      TrajectoryKind::h_line, TrajectoryKind::v_line, TrajectoryKind::diagonal,
      TrajectoryKind::ellipse, TrajectoryKind::sine};
  constexpr const char* kVariants[] = {"full", "no_nullspace", "no_rerank"};

  struct Cell {
    TrajectoryKind kind;
    bool rotation;
    const char* variant;
  };
  std::vector<Cell> grid;
  for (TrajectoryKind kind : kKinds) {
    for (bool rotation : {false, true}) {
      for (const char* variant : kVariants) {
        grid.push_back({kind, rotation, variant});
      }
    }
  }

  std::vector<AblationRow> rows(grid.size());
  par::for_each_index(
      static_cast<int>(grid.size()), parallel, [&](int i) {
        const Cell& cell = grid[i];
        EpisodeConfig config = base;
        config.trajectory.kind = cell.kind;
        config.trajectory.with_rotation = cell.rotation;
        config.use_nullspace = std::string(cell.variant) != "no_nullspace";
        config.use_rerank = std::string(cell.variant) != "no_rerank";

        AblationRow row;
        row.trajectory = to_string(cell.kind);
        row.rotation = cell.rotation;
        row.variant = cell.variant;
        row.switches_na = !config.use_rerank;
        const EpisodeResult episode = run_episode(config);
        row.success = episode.success;
        row.switches = episode.switches;
        row.time_to_grasp = episode.time_to_grasp;
        row.clamp_events = episode.clamp_events;
        rows[i] = std::move(row);
      });
  return rows;
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "trajectory,rotation,variant,success,switches,time_to_grasp,"
        "clamp_events\n";
  for (const AblationRow& row : rows) {
    os << row.trajectory << ',' << (row.rotation ? "rot" : "no-rot") << ','
       << row.variant << ',' << (row.success ? 1 : 0) << ',';
    if (row.switches_na) {
      os << "NA";
    } else {
      os << row.switches;
    }
    os << ',';
    if (row.success) {
      os << row.time_to_grasp;
    } else {
      os << "-";
    }
    os << ',' << row.clamp_events << '\n';
  }
  return os.str();
}

}  // namespace dqvs
