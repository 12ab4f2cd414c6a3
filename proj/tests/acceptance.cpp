// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "dqvs/episode.hpp"
#include "dqvs/io.hpp"
#include "dqvs/vptree.hpp"

using namespace dqvs;

namespace {

const std::string kData = DQVS_DATA_DIR;

struct Criterion {
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

std::vector<Criterion> g_results;

template <typename F>
void run_criterion(const std::string& name, double budget_seconds, F&& fn) {
  Criterion c;
  c.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    c.pass = fn(c.details);
  } catch (const std::exception& e) {
    c.pass = false;
    c.details = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  if (budget_seconds > 0.0 && c.seconds > budget_seconds) {
    c.pass = false;
    c.details += " [over budget " + format_double(budget_seconds) + " s]";
  }
  g_results.push_back(c);
  std::printf("%s  %-28s %7.2fs  %s\n", c.pass ? "PASS" : "FAIL",
              c.name.c_str(), c.seconds, c.details.c_str());
  std::fflush(stdout);
}

std::mt19937_64 g_rng(20240915);

UnitQuaternion random_rotation() {
  std::normal_distribution<double> normal(0.0, 1.0);
  return UnitQuaternion(Quaternion(normal(g_rng), normal(g_rng),
                                   normal(g_rng), normal(g_rng)));
}

Vec3 random_vec3(double span = 1.0) {
  std::uniform_real_distribution<double> uniform(-span, span);
  return {uniform(g_rng), uniform(g_rng), uniform(g_rng)};
}

Pose random_pose(double span = 0.6) {
  return Pose::from_rt(random_rotation(), random_vec3(span));
}

Eigen::VectorXd random_config(const KinematicChain& chain, double span) {
  Eigen::VectorXd q(chain.dof());
  for (int i = 0; i < chain.dof(); ++i) {
    std::uniform_real_distribution<double> dist(
        span * chain.joints()[i].lower, span * chain.joints()[i].upper);
    q[i] = dist(g_rng);
  }
  return q;
}

// ---------------------------------------------------------------------------

bool algebra_suite(std::string& details) {
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const UnitQuaternion r = random_rotation();
    const Vec3 t = random_vec3();
    const Pose x = Pose::from_rt(r, t);

    // Unit conditions.
    if (std::abs(x.primary().norm() - 1.0) > 1e-10) return false;
    if (std::abs(dot4(x.primary(), x.dual())) > 1e-10) return false;

    // Group inverse.
    const DualQuaternion id =
        x.as_dual_quaternion() * x.as_dual_quaternion().conjugate();
    if (std::abs(id.primary().eta() - 1.0) > 1e-10 ||
        id.primary().mu().norm() > 1e-10 || std::abs(id.dual().eta()) > 1e-10 ||
        id.dual().mu().norm() > 1e-10) {
      return false;
    }

    // rt round trip.
    const auto [r2, t2] = pose_to_rt(x);
    if ((t2 - t).norm() > 1e-10) return false;
    const Pose back = Pose::from_rt(r2, t2);
    const auto ca = x.coeffs(), cb = back.coeffs();
    for (int i = 0; i < 8; ++i) {
      if (std::abs(ca[i] - cb[i]) > 1e-10) return false;
    }

    // Logarithm against the rotation-matrix screw oracle.
    const Twist lg = x.log();
    const Eigen::AngleAxisd aa(
        Eigen::Quaterniond(r.eta(), r.mu()[0], r.mu()[1], r.mu()[2])
            .toRotationMatrix());
    Eigen::Vector3d oracle = 0.5 * aa.angle() * aa.axis();
    if ((oracle + lg.angular()).norm() < (oracle - lg.angular()).norm()) {
      oracle = -oracle;
    }
    if ((lg.angular() - oracle).norm() > 1e-10) return false;
    if ((lg.linear() - 0.5 * t).norm() > 1e-10) return false;

    // Distance against direct coefficient expansion, plus symmetry.
    const Pose y = random_pose();
    const DualQuaternion e =
        x.as_dual_quaternion().conjugate() * y.as_dual_quaternion();
    auto c = e.coeffs();
    if (c[0] < 0.0) {
      for (double& v : c) v = -v;
    }
    double sum = (1.0 - c[0]) * (1.0 - c[0]);
    for (int i = 1; i < 8; ++i) sum += c[i] * c[i];
    if (std::abs(distance(x, y) - std::sqrt(sum)) > 1e-10) return false;
    if (std::abs(distance(x, y) - distance(y, x)) > 1e-12) return false;
    ++checked;
  }
  details = std::to_string(checked) + " random instances";
  return true;
}

bool jacobian_check(std::string& details) {
  const KinematicChain arm = reference_arm();
  const double step = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = random_config(arm, 1.0);
    const Jacobian jac = geometric_jacobian(arm, q);
    const Pose x0 = forward_kinematics(arm, q);
    for (int j = 0; j < arm.dof(); ++j) {
      Eigen::VectorXd qj = q;
      qj[j] += step;
      const Pose x1 = forward_kinematics(arm, qj);
      const Pose rel =
          Pose::from_rotation(x1.rotation() * x0.rotation().conjugate());
      Vec6 fd;
      fd.head<3>() = 2.0 * vec6(rel.log()).head<3>() / step;
      fd.tail<3>() = (x1.translation() - x0.translation()) / step;
      worst = std::max(worst, (fd - jac.col(j)).lpNorm<Eigen::Infinity>());
    }
  }
  details = "max fd error " + format_double(worst);
  return worst < 1e-5;
}

struct RegulationRun {
  std::vector<double> lyapunov;
  std::vector<bool> annotated;  // clamped or visibly damped
  bool converged = false;
};

std::vector<RegulationRun> g_regulation_runs;

bool static_regulation(std::string& details) {
  const KinematicChain arm = reference_arm();
  ControllerGains gains;  // K dt = 0.1, lambda 1e-3
  int converged = 0;
  g_regulation_runs.clear();
  for (int pair = 0; pair < 50; ++pair) {
    const Eigen::VectorXd q0 = random_config(arm, 0.5);
    const Pose target = forward_kinematics(arm, random_config(arm, 0.5));
    ControllerState state = ControllerState::make(arm, q0, target);
    RegulationRun run;
    run.lyapunov.push_back(lyapunov_value(pose_error(state.x_c, target)).V);
    for (int k = 0; k < 500; ++k) {
      const StepOutcome out = step(state, arm, gains, false);
      state = out.state;
      run.lyapunov.push_back(
          lyapunov_value(pose_error(state.x_c, target)).V);
      run.annotated.push_back(out.clamped || out.damping_residual > 1e-12);
      const double err_t =
          (state.x_c.translation() - target.translation()).norm();
      const Pose e = pose_error(state.x_c, target);
      const double err_r =
          2.0 * std::atan2(e.primary().mu().norm(), e.primary().eta());
      if (err_t < 1e-3 && err_r < 0.1 * M_PI / 180.0) {
        run.converged = true;
        break;
      }
    }
    if (run.converged) ++converged;
    g_regulation_runs.push_back(std::move(run));
  }
  details = std::to_string(converged) + "/50 within 500 iterations";
  return converged == 50;
}

bool lyapunov_monotonicity(std::string& details) {
  if (g_regulation_runs.empty()) {
    details = "regulation suite did not run";
    return false;
  }
  long steps = 0, violations = 0, unannotated = 0;
  for (const RegulationRun& run : g_regulation_runs) {
    for (std::size_t k = 0; k + 1 < run.lyapunov.size(); ++k) {
      ++steps;
      if (run.lyapunov[k + 1] > run.lyapunov[k] + 1e-12) {
        ++violations;
        if (!run.annotated[k]) ++unannotated;
      }
    }
  }
  const double rate = static_cast<double>(violations) /
                      static_cast<double>(steps);
  details = std::to_string(violations) + "/" + std::to_string(steps) +
            " increases, " + std::to_string(unannotated) + " unannotated";
  return rate <= 0.01 && unannotated == 0;
}

bool nullspace_noninterference(std::string& details) {
  const KinematicChain arm = reference_arm();
  ControllerGains gains;
  gains.damping = 1e-12;
  gains.secondary = -0.01;
  // A pose with a genuine null-space component to burn off.
  Eigen::VectorXd q0(arm.dof());
  q0 << 0.4, 0.5, -0.3, 1.4, 0.5, 1.0, -0.6;
  const Pose hold = forward_kinematics(arm, q0);
  ControllerState state = ControllerState::make(arm, q0, hold);
  const Eigen::VectorXd mean = arm.mean_config();

  double worst_twist = 0.0;
  double cnull = 0.5 * (state.q - mean).squaredNorm();
  bool strictly_decreasing = true;
  for (int k = 0; k < 200; ++k) {
    const Jacobian jac = geometric_jacobian(arm, state.q);
    const Eigen::VectorXd secondary =
        gains.secondary *
        (null_space_projector(jac, gains.damping) * (state.q - mean));
    worst_twist =
        std::max(worst_twist, (jac * secondary).lpNorm<Eigen::Infinity>());
    state = step(state, arm, gains, true).state;
    const double next = 0.5 * (state.q - mean).squaredNorm();
    if (!(next < cnull)) strictly_decreasing = false;
    cnull = next;
  }
  details = "max secondary twist " + format_double(worst_twist) +
            (strictly_decreasing ? ", C_null strictly decreasing"
                                 : ", C_null stalled");
  return worst_twist < 1e-6 && strictly_decreasing;
}

bool vptree_equivalence(std::string& details) {
  std::vector<Pose> points;
  for (int i = 0; i < 1000; ++i) points.push_back(random_pose());
  const VpTree tree(points, 9001);
  long mismatches = 0;
  for (int query_i = 0; query_i < 100; ++query_i) {
    const Pose query = random_pose();
    for (int k : {1, 5, 10}) {
      const auto fast = tree.k_nearest(query, k);
      const auto slow = linear_scan_k_nearest(points, query, k);
      if (fast.size() != slow.size()) {
        ++mismatches;
        continue;
      }
      for (std::size_t i = 0; i < fast.size(); ++i) {
        if (fast[i].first != slow[i].first ||
            fast[i].second != slow[i].second) {
          ++mismatches;
        }
      }
    }
  }
  details = "100 queries x k in {1,5,10}, " + std::to_string(mismatches) +
            " mismatches";
  return mismatches == 0;
}

bool rerank_and_hysteresis(std::string& details) {
  // Hand-computed fixture of the re-ranking formula.
  const double d[] = {0.2, 0.5, 0.8};
  const RerankResult r = rerank(d);
  if (std::abs(r.upsilon[0] - 1.0 / 3.0) > 1e-12 ||
      std::abs(r.upsilon[1] - 5.0 / 6.0) > 1e-12 ||
      std::abs(r.upsilon[2] - 4.0 / 3.0) > 1e-12) {
    details = "re-rank fixture mismatch";
    return false;
  }

  ParseErrors errors;
  auto config = load_scenario(kData + "/hysteresis.scenario", errors);
  if (!config) {
    details = format_errors(errors);
    return false;
  }
  EpisodeConfig with_delta = *config;   // delta from the file
  EpisodeConfig no_delta = *config;
  no_delta.switch_delta = 0.0;

  const int switches_hysteresis = run_episode(with_delta).switches;
  const int switches_chatter = run_episode(no_delta).switches;
  details = "switches " + std::to_string(switches_hysteresis) +
            " (delta=0.05) vs " + std::to_string(switches_chatter) +
            " (delta=0)";
  return switches_chatter > 0 &&
         switches_hysteresis * 5 <= switches_chatter;
}

bool moving_target_grid(std::string& details) {
  ParseErrors errors;
  auto config = load_scenario(kData + "/grid.scenario", errors);
  if (!config) {
    details = format_errors(errors);
    return false;
  }
  const std::vector<AblationRow> rows = ablation_suite(*config, true);

  int full_total = 0, full_success = 0;
  int nullspace_clamps = 0;
  for (const AblationRow& row : rows) {
    if (row.variant == "full") {
      ++full_total;
      if (row.success) ++full_success;
    } else if (row.variant == "no_nullspace") {
      nullspace_clamps += row.clamp_events;
    }
  }

  auto drift = load_scenario(kData + "/drift.scenario", errors);
  if (!drift) {
    details = format_errors(errors);
    return false;
  }
  EpisodeConfig no_rerank = *drift;
  no_rerank.use_rerank = false;
  const EpisodeResult drift_no_rerank = run_episode(no_rerank);
  const EpisodeResult drift_full = run_episode(*drift);

  details = "full " + std::to_string(full_success) + "/" +
            std::to_string(full_total) + ", no-nullspace clamps " +
            std::to_string(nullspace_clamps) + ", drift no-rerank " +
            (drift_no_rerank.success ? "grasped" : "timed out") +
            ", drift full " +
            (drift_full.success ? "grasped" : "timed out");
  return full_total == 10 && full_success == 10 && nullspace_clamps >= 1 &&
         !drift_no_rerank.success && drift_full.success;
}

bool locomo_formula(std::string& details) {
  GraspCandidate closed_form;
  closed_form.gamma = 2.0;
  closed_form.normalizer = 8.0;
  for (double w : {1.5, 0.5}) {
    FingerFeatures f;
    f.weight = w;
    f.sigma = Eigen::MatrixXd::Identity(2, 2);
    f.psi.assign(4, Eigen::VectorXd::Zero(2));
    closed_form.fingers.push_back(f);
  }
  const double expected = 2.0 * std::pow(4.0 / 8.0, 2.0);
  if (std::abs(locomo_score(closed_form) - expected) > 1e-12) {
    details = "closed form mismatch";
    return false;
  }

  GraspCandidate scalar;
  scalar.normalizer = 1.0;
  FingerFeatures f;
  f.weight = 1.0;
  f.sigma = Eigen::MatrixXd::Identity(1, 1);
  f.psi = {Eigen::VectorXd::Ones(1)};
  scalar.fingers.push_back(f);
  if (std::abs(locomo_score(scalar) - std::exp(-0.5)) > 1e-12) {
    details = "scalar fixture mismatch";
    return false;
  }
  details = "closed form and scalar fixture within 1e-12";
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance suite (data: %s)\n", kData.c_str());
  run_criterion("algebra-suite", 10.0, algebra_suite);
  run_criterion("jacobian-check", 5.0, jacobian_check);
  run_criterion("static-regulation", 30.0, static_regulation);
  run_criterion("lyapunov-monotonicity", 0.0, lyapunov_monotonicity);
  run_criterion("nullspace-noninterference", 0.0, nullspace_noninterference);
  run_criterion("vptree-oracle", 10.0, vptree_equivalence);
  run_criterion("rerank-hysteresis", 0.0, rerank_and_hysteresis);
  run_criterion("moving-target-grid", 300.0, moving_target_grid);
  run_criterion("locomo-formula", 0.0, locomo_formula);

  int failed = 0;
  for (const Criterion& c : g_results) {
    if (!c.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(g_results.size()) - failed,
              g_results.size());
  return failed == 0 ? 0 : 1;
}
