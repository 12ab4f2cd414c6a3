#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dqvs/episode.hpp"

namespace dqvs {

struct ParseError {
  std::string file;
  int line = 0;  // 0: file-level problem
  std::string message;
};

using ParseErrors = std::vector<ParseError>;

std::string format_errors(const ParseErrors& errors);

/// Chain definition, `dqvs-chain v1`: one `joint` line per joint
/// (axis xyz, origin pose 8, lower, upper, mean) and a final `tool` line.
std::optional<KinematicChain> load_chain(const std::string& path,
                                         ParseErrors& errors);

/// Grasp candidates, `dqvs-grasps v1`.
std::optional<std::vector<GraspCandidate>> load_grasps(const std::string& path,
                                                       ParseErrors& errors);

/// Scenario, `dqvs-scenario v1`. Chain and grasps paths are resolved
/// relative to the scenario file; all three files are validated together and
/// every error is reported, not just the first.
std::optional<EpisodeConfig> load_scenario(const std::string& path,
                                           ParseErrors& errors);

/// Per-step telemetry CSV. Locale-independent, fixed column order:
/// iter,t,q0..,e0..e7,err_trans,err_rot,V,V1,V2,clamp,obj0..obj7,
/// grasp_id,phase,upsilon.
void write_telemetry_csv(std::ostream& os, const EpisodeResult& result,
                         int dof);
bool write_telemetry_csv(const std::string& path, const EpisodeResult& result,
                         int dof);

/// Reads a telemetry CSV back into rows of doubles (header skipped).
std::optional<std::vector<std::vector<double>>> read_csv(
    const std::string& path, ParseErrors& errors);

/// Repeatable double formatting used in every file this project writes:
/// shortest representation that round-trips exactly.
std::string format_double(double value);

}  // namespace dqvs
