#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "dqvs/episode.hpp"
#include "dqvs/io.hpp"
#include "dqvs/parallel.hpp"
#include "dqvs/selection.hpp"
#include "dqvs/vptree.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitEpisodeFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFileError = 3;

std::optional<dqvs::EpisodeConfig> load_scenario_or_report(
    const std::string& path) {
  dqvs::ParseErrors errors;
  auto config = dqvs::load_scenario(path, errors);
  if (!config) {
    std::cerr << dqvs::format_errors(errors);
  }
  return config;
}

bool prepare_out_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) {
    std::cerr << out << ": cannot create output directory: " << ec.message()
              << '\n';
    return false;
  }
  return true;
}

int run_simulate(const std::string& scenario, const std::string& out,
                 std::uint64_t seed) {
  auto config = load_scenario_or_report(scenario);
  if (!config) return kExitFileError;
  if (!prepare_out_dir(out)) return kExitFileError;
  config->observation.seed = seed;
  config->selection.tree_seed = seed;

  const dqvs::EpisodeResult result = dqvs::run_episode(*config);
  const std::string csv = out + "/telemetry.csv";
  if (!dqvs::write_telemetry_csv(csv, result, config->chain.dof())) {
    std::cerr << csv << ": cannot write telemetry\n";
    return kExitFileError;
  }

  std::cout << "success " << (result.success ? 1 : 0) << "\n"
            << "switches " << result.switches << "\n"
            << "clamp_events " << result.clamp_events << "\n";
  if (result.success) {
    std::cout << "time_to_grasp " << dqvs::format_double(result.time_to_grasp)
              << "\n";
  }
  std::cout << "telemetry " << csv << "\n";
  return result.success ? kExitSuccess : kExitEpisodeFailure;
}

int run_ablate(const std::string& scenario, const std::string& out,
               std::uint64_t seed, bool serial) {
  auto config = load_scenario_or_report(scenario);
  if (!config) return kExitFileError;
  if (!prepare_out_dir(out)) return kExitFileError;
  config->observation.seed = seed;
  config->selection.tree_seed = seed;

  const std::vector<dqvs::AblationRow> rows =
      dqvs::ablation_suite(*config, !serial);
  const std::string table = dqvs::ablation_table(rows);

  const std::string csv = out + "/ablation.csv";
  std::ofstream os(csv);
  if (!os) {
    std::cerr << csv << ": cannot write summary\n";
    return kExitFileError;
  }
  os << table;
  std::cout << table;
  return kExitSuccess;
}

int run_rank(const std::string& grasps_path,
             const std::vector<double>& pose_coeffs) {
  dqvs::ParseErrors errors;
  auto candidates = dqvs::load_grasps(grasps_path, errors);
  if (!candidates) {
    std::cerr << dqvs::format_errors(errors);
    return kExitFileError;
  }

  const dqvs::Quaternion primary(pose_coeffs[0], pose_coeffs[1],
                                 pose_coeffs[2], pose_coeffs[3]);
  const dqvs::Quaternion dual(pose_coeffs[4], pose_coeffs[5], pose_coeffs[6],
                              pose_coeffs[7]);
  dqvs::Pose gripper;
  try {
    gripper = dqvs::Pose::from_parts(primary, dual);
  } catch (const std::invalid_argument& e) {
    std::cerr << "--pose: " << e.what() << '\n';
    return kExitUsage;
  }

  std::vector<double> distances;
  std::cout << "id,score,distance,upsilon\n";
  for (const auto& c : *candidates) {
    distances.push_back(dqvs::distance(gripper, c.grasp));
  }
  const dqvs::RerankResult ranks = dqvs::rerank(distances);
  for (std::size_t i = 0; i < candidates->size(); ++i) {
    std::cout << (*candidates)[i].id << ','
              << dqvs::format_double(dqvs::candidate_score((*candidates)[i]))
              << ',' << dqvs::format_double(distances[i]) << ','
              << dqvs::format_double(ranks.upsilon[i]) << '\n';
  }
  if (ranks.degenerate) {
    std::cout << "# degenerate re-rank: all distances equal\n";
  }
  return kExitSuccess;
}

int run_check_jacobian(const std::string& chain_path, int trials,
                       std::uint64_t seed) {
  dqvs::ParseErrors errors;
  auto chain = dqvs::load_chain(chain_path, errors);
  if (!chain) {
    std::cerr << dqvs::format_errors(errors);
    return kExitFileError;
  }

  const double step = 1e-6;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Eigen::VectorXd q(chain->dof());
    for (int i = 0; i < chain->dof(); ++i) {
      std::uniform_real_distribution<double> dist(chain->joints()[i].lower,
                                                  chain->joints()[i].upper);
      q[i] = dist(rng);
    }
    const dqvs::Jacobian jac = dqvs::geometric_jacobian(*chain, q);
    const dqvs::Pose x0 = dqvs::forward_kinematics(*chain, q);
    for (int j = 0; j < chain->dof(); ++j) {
      Eigen::VectorXd qj = q;
      qj[j] += step;
      const dqvs::Pose x1 = dqvs::forward_kinematics(*chain, qj);
      // Finite-difference twist in the Jacobian's convention:
      // world rotation increment and tool displacement per unit step.
      const dqvs::Pose rel = dqvs::Pose::from_rotation(
          x1.rotation() * x0.rotation().conjugate());
      dqvs::Vec6 fd;
      fd.head<3>() = dqvs::vec6(rel.log()).head<3>() * (2.0 / step);
      fd.tail<3>() = (x1.translation() - x0.translation()) / step;
      worst = std::max(worst,
                       (fd - jac.col(j)).lpNorm<Eigen::Infinity>());
    }
  }
  std::cout << "trials " << trials << "\n"
            << "max_error " << dqvs::format_double(worst) << "\n";
  return worst < 1e-5 ? kExitSuccess : kExitEpisodeFailure;
}

int run_convergence(const std::string& scenario, const std::string& out) {
  auto config = load_scenario_or_report(scenario);
  if (!config) return kExitFileError;
  if (!out.empty() && !prepare_out_dir(out)) return kExitFileError;

  // Static-target regulation toward the best-scored grasp of the object at
  // its scripted start pose.
  const std::vector<dqvs::RankedGrasp> world =
      dqvs::to_world(config->grasps, config->trajectory.start_pose);
  int best = 0;
  for (std::size_t i = 1; i < world.size(); ++i) {
    if (world[i].locomo > world[best].locomo) best = static_cast<int>(i);
  }
  const dqvs::Pose target = world[best].world_grasp;

  Eigen::VectorXd q = config->q_start.size() == 0
                          ? config->chain.mean_config()
                          : config->chain.clamp(config->q_start);
  dqvs::ControllerState state =
      dqvs::ControllerState::make(config->chain, q, target);

  std::ostringstream csv;
  csv << "iter,t,err_trans,err_rot,V,V1,V2\n";
  const int max_iters = 2000;
  bool converged = false;
  for (int k = 0; k <= max_iters; ++k) {
    const dqvs::Pose error = dqvs::pose_error(state.x_c, target);
    const dqvs::LyapunovSample lyap = dqvs::lyapunov_value(error);
    const double err_t =
        (state.x_c.translation() - target.translation()).norm();
    const double err_r =
        2.0 * std::atan2(error.primary().mu().norm(), error.primary().eta());
    csv << k << ',' << dqvs::format_double(k * config->gains.dt) << ','
        << dqvs::format_double(err_t) << ',' << dqvs::format_double(err_r)
        << ',' << dqvs::format_double(lyap.V) << ','
        << dqvs::format_double(lyap.V1) << ','
        << dqvs::format_double(lyap.V2) << '\n';
    if (err_t < 1e-3 && err_r < 0.1 * M_PI / 180.0) {
      converged = true;
      break;
    }
    state = dqvs::step(state, config->chain, config->gains,
                       config->use_nullspace)
                .state;
  }

  if (!out.empty()) {
    const std::string path = out + "/convergence.csv";
    std::ofstream os(path);
    if (!os) {
      std::cerr << path << ": cannot write\n";
      return kExitFileError;
    }
    os << csv.str();
    std::cout << "csv " << path << "\n";
  } else {
    std::cout << csv.str();
  }
  std::cout << "converged " << (converged ? 1 : 0) << "\n";
  return converged ? kExitSuccess : kExitEpisodeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual quaternion visual servoing simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  std::string grasps_path;
  std::string chain_path;
  std::vector<double> pose_coeffs;
  std::uint64_t seed = 0;
  int trials = 100;
  bool serial = false;

  CLI::App* simulate = app.add_subcommand("simulate", "Run one episode");
  simulate->add_option("--scenario", scenario, "Scenario file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--seed", seed, "Noise and vantage seed")->required();

  CLI::App* ablate =
      app.add_subcommand("ablate", "Run the trajectory/variant grid");
  ablate->add_option("--scenario", scenario, "Base scenario file")->required();
  ablate->add_option("--out", out_dir, "Output directory")->required();
  ablate->add_option("--seed", seed, "Noise and vantage seed")->required();
  ablate->add_flag("--serial", serial, "Disable the parallel episode lane");

  CLI::App* rank = app.add_subcommand("rank", "Score and re-rank a grasp file");
  rank->add_option("--grasps", grasps_path, "Grasp candidate file")->required();
  rank->add_option("--pose", pose_coeffs, "Gripper pose, 8 coefficients")
      ->expected(8)
      ->required();

  CLI::App* check =
      app.add_subcommand("check-jacobian", "Finite-difference Jacobian check");
  check->add_option("--chain", chain_path, "Chain file")->required();
  check->add_option("--trials", trials, "Random configurations");
  check->add_option("--seed", seed, "Configuration seed");

  CLI::App* convergence = app.add_subcommand(
      "convergence", "Static-target regulation, error per iteration");
  convergence->add_option("--scenario", scenario, "Scenario file")->required();
  convergence->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(scenario, out_dir, seed);
    if (ablate->parsed()) return run_ablate(scenario, out_dir, seed, serial);
    if (rank->parsed()) return run_rank(grasps_path, pose_coeffs);
    if (check->parsed()) return run_check_jacobian(chain_path, trials, seed);
    if (convergence->parsed()) return run_convergence(scenario, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFileError;
  }
  return kExitUsage;
}
