// Times the OpenMP lanes against their serial reference paths. The two
// paths produce identical results by construction; this only reports the
// speedup actually obtained on this machine.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "dqvs/episode.hpp"
#include "dqvs/parallel.hpp"
#include "dqvs/selection.hpp"
#include "dqvs/vptree.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

dqvs::Pose random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-0.6, 0.6);
  const dqvs::Quaternion raw(normal(rng), normal(rng), normal(rng),
                             normal(rng));
  const dqvs::Vec3 t(uniform(rng), uniform(rng), uniform(rng));
  return dqvs::Pose::from_rt(dqvs::UnitQuaternion(raw), t);
}

void report(const char* lane, double serial_ms, double parallel_ms) {
  std::printf("%-22s %10.1f ms %10.1f ms %8.2fx\n", lane, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

void bench_batch_knn() {
  std::mt19937_64 rng(7);
  std::vector<dqvs::Pose> points;
  for (int i = 0; i < 4000; ++i) points.push_back(random_pose(rng));
  std::vector<dqvs::Pose> queries;
  for (int i = 0; i < 2000; ++i) queries.push_back(random_pose(rng));
  const dqvs::VpTree tree(points, 11);

  auto t0 = Clock::now();
  auto serial = dqvs::batch_k_nearest(tree, queries, 10, false);
  const double serial_ms = ms_since(t0);
  t0 = Clock::now();
  auto parallel = dqvs::batch_k_nearest(tree, queries, 10, true);
  const double parallel_ms = ms_since(t0);
  if (serial != parallel) std::printf("batch_knn: LANES DISAGREE\n");
  report("batch k-nearest", serial_ms, parallel_ms);
}

dqvs::EpisodeConfig small_episode_config() {
  dqvs::EpisodeConfig config;
  config.trajectory.start_pose = dqvs::Pose::from_rt(
      dqvs::UnitQuaternion::from_axis_angle(dqvs::Vec3::UnitX(), M_PI),
      dqvs::Vec3(0.45, 0.0, 0.45));
  config.trajectory.speed = 0.01;
  config.trajectory.length = 0.1;
  config.gains.proportional = 4.0;
  config.gains.dt = 0.025;
  config.max_duration = 30.0;
  config.selection.ik_max_iter = 80;
  for (int i = 0; i < 4; ++i) {
    dqvs::GraspCandidate c;
    c.id = i;
    c.grasp = dqvs::Pose::from_rt(
        dqvs::UnitQuaternion::from_axis_angle(dqvs::Vec3::UnitZ(),
                                              i * M_PI / 2.0),
        dqvs::Vec3::Zero());
    c.precomputed_score = 0.5 + 0.1 * i;
    config.grasps.push_back(c);
  }
  return config;
}

void bench_ablation() {
  const dqvs::EpisodeConfig config = small_episode_config();
  auto t0 = Clock::now();
  auto serial = dqvs::ablation_suite(config, false);
  const double serial_ms = ms_since(t0);
  t0 = Clock::now();
  auto parallel = dqvs::ablation_suite(config, true);
  const double parallel_ms = ms_since(t0);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    if (serial[i].success != parallel[i].success ||
        serial[i].switches != parallel[i].switches) {
      std::printf("ablation: LANES DISAGREE at row %zu\n", i);
    }
  }
  report("ablation episodes", serial_ms, parallel_ms);
}

void bench_feasibility() {
  dqvs::EpisodeConfig config = small_episode_config();
  const dqvs::KinematicChain& chain = config.chain;
  const Eigen::VectorXd q = chain.mean_config();
  const std::vector<dqvs::RankedGrasp> world =
      dqvs::to_world(config.grasps, config.trajectory.start_pose);
  const dqvs::Pose gripper = dqvs::forward_kinematics(chain, q);
  dqvs::SwitchState state;
  dqvs::SelectionOptions options;
  options.k = 4;
  options.ik_max_iter = 300;

  constexpr int kRepeats = 40;
  options.parallel_feasibility = false;
  auto t0 = Clock::now();
  for (int r = 0; r < kRepeats; ++r) {
    dqvs::select_grasp(state, gripper, world, chain, q, config.gains, options);
  }
  const double serial_ms = ms_since(t0);
  options.parallel_feasibility = true;
  t0 = Clock::now();
  for (int r = 0; r < kRepeats; ++r) {
    dqvs::select_grasp(state, gripper, world, chain, q, config.gains, options);
  }
  const double parallel_ms = ms_since(t0);
  report("feasibility filter", serial_ms, parallel_ms);
}

}  // namespace

int main() {
  std::printf("threads: %d (OpenMP %s)\n", dqvs::par::max_threads(),
              dqvs::par::openmp_enabled() ? "on" : "off");
  std::printf("%-22s %13s %13s %9s\n", "lane", "serial", "parallel",
              "speedup");
  bench_batch_knn();
  bench_feasibility();
  bench_ablation();
  return 0;
}
