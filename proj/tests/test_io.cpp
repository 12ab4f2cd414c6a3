#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dqvs/io.hpp"

using namespace dqvs;

namespace {

const std::string kData = DQVS_DATA_DIR;

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "dqvs_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = temp_dir() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("bundled chain file matches the built-in reference arm") {
  ParseErrors errors;
  const auto chain = load_chain(kData + "/arm7.chain", errors);
  REQUIRE_MESSAGE(chain.has_value(), format_errors(errors));
  CHECK(chain->dof() == 7);

  const KinematicChain builtin = reference_arm();
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd q(7);
    for (int i = 0; i < 7; ++i) {
      std::uniform_real_distribution<double> dist(builtin.joints()[i].lower,
                                                  builtin.joints()[i].upper);
      q[i] = dist(rng);
    }
    CHECK(distance(forward_kinematics(*chain, q),
                   forward_kinematics(builtin, q)) < 1e-12);
  }
}

TEST_CASE("missing file and version mismatch") {
  ParseErrors errors;
  CHECK_FALSE(load_chain(kData + "/does_not_exist.chain", errors).has_value());
  REQUIRE_FALSE(errors.empty());
  CHECK(errors[0].message.find("cannot open") != std::string::npos);

  errors.clear();
  const std::string stale =
      write_temp("stale.chain", "dqvs-chain v0\njoint 0 0 1\n");
  CHECK_FALSE(load_chain(stale, errors).has_value());
  REQUIRE_FALSE(errors.empty());
  CHECK(errors[0].message.find("header") != std::string::npos);
}

TEST_CASE("bundled scenarios parse cleanly") {
  for (const char* name :
       {"/static.scenario", "/grid.scenario", "/hysteresis.scenario",
        "/drift.scenario"}) {
    ParseErrors errors;
    const auto config = load_scenario(kData + name, errors);
    CHECK_MESSAGE(config.has_value(), name << ": " << format_errors(errors));
  }
}

TEST_CASE("minimal scenario gets the documented defaults") {
  const std::string minimal = write_temp(
      "minimal.scenario",
      "dqvs-scenario v1\n"
      "chain " + kData + "/arm7.chain\n"
      "grasps " + kData + "/box.grasps\n");
  ParseErrors errors;
  const auto config = load_scenario(minimal, errors);
  REQUIRE_MESSAGE(config.has_value(), format_errors(errors));
  CHECK(config->gains.proportional == 2.0);
  CHECK(config->gains.dt == 0.05);
  CHECK(config->selection.k == 5);
  CHECK(config->switch_delta == 0.05);
  CHECK(config->pregrasp_sse_threshold == 1e-4);
  CHECK(config->grasp_tol_translation == 0.002);
  CHECK(config->max_duration == 120.0);
  CHECK(config->use_nullspace);
  CHECK(config->use_rerank);
}

TEST_CASE("scenario validation reports every error with its field") {
  const std::string bad = write_temp(
      "bad.scenario",
      "dqvs-scenario v1\n"
      "chain " + kData + "/arm7.chain\n"
      "grasps " + kData + "/box.grasps\n"
      "gains -3 0 1e-3 0.05\n"
      "selection 0 -1\n"
      "max_duration -5\n"
      "bogus_key 1\n");
  ParseErrors errors;
  CHECK_FALSE(load_scenario(bad, errors).has_value());
  const std::string all = format_errors(errors);
  CHECK(errors.size() >= 4);
  CHECK(all.find("K must be > 0") != std::string::npos);
  CHECK(all.find("k must be >= 1") != std::string::npos);
  CHECK(all.find("delta") != std::string::npos);
  CHECK(all.find("max_duration") != std::string::npos);
  CHECK(all.find("bogus_key") != std::string::npos);
}

TEST_CASE("grasps file with a non-PD covariance names the candidate") {
  const std::string bad = write_temp(
      "bad.grasps",
      "dqvs-grasps v1\n"
      "candidate 5\n"
      "grasp 1 0 0 0 0 0 0 0\n"
      "ns 1\n"
      "finger 1.0 2 1\n"
      "sigma 1 0 0 -1\n"
      "psi 0 0\n");
  ParseErrors errors;
  CHECK_FALSE(load_grasps(bad, errors).has_value());
  const std::string all = format_errors(errors);
  CHECK(all.find("candidate 5") != std::string::npos);
  CHECK(all.find("positive definite") != std::string::npos);
}

TEST_CASE("bundled grasps parse and score") {
  ParseErrors errors;
  const auto grasps = load_grasps(kData + "/box.grasps", errors);
  REQUIRE_MESSAGE(grasps.has_value(), format_errors(errors));
  CHECK(grasps->size() >= 4);
  for (const auto& g : *grasps) {
    CHECK(candidate_score(g) > 0.0);
  }
}

TEST_CASE("telemetry CSV round-trips exactly") {
  ParseErrors errors;
  auto config = load_scenario(kData + "/static.scenario", errors);
  REQUIRE_MESSAGE(config.has_value(), format_errors(errors));
  config->max_duration = 2.0;
  const EpisodeResult episode = run_episode(*config);
  REQUIRE_FALSE(episode.telemetry.empty());

  const auto csv_path = (temp_dir() / "roundtrip.csv").string();
  REQUIRE(write_telemetry_csv(csv_path, episode, config->chain.dof()));

  const auto rows = read_csv(csv_path, errors);
  REQUIRE_MESSAGE(rows.has_value(), format_errors(errors));
  REQUIRE(rows->size() == episode.telemetry.size());
  const int dof = config->chain.dof();
  for (std::size_t i = 0; i < rows->size(); ++i) {
    const StepRecord& r = episode.telemetry[i];
    const std::vector<double>& row = (*rows)[i];
    REQUIRE(static_cast<int>(row.size()) == 2 + dof + 8 + 6 + 8 + 3);
    CHECK(row[0] == static_cast<double>(r.iteration));
    CHECK(row[1] == r.t);
    for (int j = 0; j < dof; ++j) CHECK(row[2 + j] == r.q[j]);
    for (int j = 0; j < 8; ++j) CHECK(row[2 + dof + j] == r.error[j]);
    CHECK(row[2 + dof + 8] == r.err_translation);
    CHECK(row[2 + dof + 9] == r.err_rotation);
    CHECK(row[2 + dof + 10] == r.V);
    CHECK(row[2 + dof + 13] == (r.clamped ? 1.0 : 0.0));
    for (int j = 0; j < 8; ++j) CHECK(row[2 + dof + 14 + j] == r.object[j]);
    CHECK(row[2 + dof + 22] == static_cast<double>(r.grasp_id));
    CHECK(row[2 + dof + 23] == static_cast<double>(r.phase));
    CHECK(row[2 + dof + 24] == r.upsilon);
  }
}

TEST_CASE("format_double survives the round trip") {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> normal(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = normal(rng);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.5) == "0.5");
}
