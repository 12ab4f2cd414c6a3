#include "dqvs/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

namespace dqvs {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    if (tok.front() == '#') break;  // trailing comment
    tokens.push_back(tok);
  }
  return tokens;
}

bool parse_double(const std::string& tok, double& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_long(const std::string& tok, long& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

class Context {
 public:
  Context(std::string file, ParseErrors& errors)
      : file_(std::move(file)), errors_(errors), initial_(errors.size()) {}

  void error(int line, const std::string& message) {
    errors_.push_back({file_, line, message});
  }
  bool clean() const { return errors_.size() == initial_; }
  const std::string& file() const { return file_; }

 private:
  std::string file_;
  ParseErrors& errors_;
  std::size_t initial_;
};

bool read_doubles(Context& ctx, int line, const std::vector<std::string>& toks,
                  std::size_t from, std::size_t count, double* out,
                  const char* what) {
  if (toks.size() != from + count) {
    ctx.error(line, std::string(what) + ": expected " + std::to_string(count) +
                        " numbers, got " +
                        std::to_string(toks.size() - from));
    return false;
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!parse_double(toks[from + i], out[i])) {
      ctx.error(line, std::string(what) + ": bad number '" + toks[from + i] +
                          "'");
      return false;
    }
  }
  return true;
}

std::optional<Pose> pose_from_numbers(Context& ctx, int line,
                                      const double* c, const char* what) {
  const Quaternion primary(c[0], c[1], c[2], c[3]);
  const Quaternion dual(c[4], c[5], c[6], c[7]);
  if (std::abs(primary.norm() - 1.0) > 1e-6) {
    ctx.error(line, std::string(what) + ": primary part is not unit norm");
    return std::nullopt;
  }
  if (std::abs(dot4(primary, dual)) > 1e-6) {
    ctx.error(line,
              std::string(what) + ": parts violate the unit dual condition");
    return std::nullopt;
  }
  return Pose::from_parts(primary, dual);
}

struct Lines {
  std::vector<std::pair<int, std::vector<std::string>>> content;
};

std::optional<Lines> read_lines(Context& ctx, const std::string& path,
                                const char* expected_header) {
  std::ifstream in(path);
  if (!in) {
    ctx.error(0, "cannot open file");
    return std::nullopt;
  }
  std::string line;
  int number = 0;
  bool header_seen = false;
  Lines out;
  while (std::getline(in, line)) {
    ++number;
    if (!header_seen) {
      if (line != expected_header) {
        ctx.error(number, std::string("expected header '") + expected_header +
                              "', got '" + line + "'");
        return std::nullopt;
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> toks = tokenize(line);
    if (!toks.empty()) out.content.emplace_back(number, std::move(toks));
  }
  if (!header_seen) {
    ctx.error(0, std::string("empty file, expected header '") +
                     expected_header + "'");
    return std::nullopt;
  }
  return out;
}

}  // namespace

std::string format_errors(const ParseErrors& errors) {
  std::ostringstream os;
  for (const ParseError& e : errors) {
    os << e.file;
    if (e.line > 0) os << ':' << e.line;
    os << ": " << e.message << '\n';
  }
  return os.str();
}

std::optional<KinematicChain> load_chain(const std::string& path,
                                         ParseErrors& errors) {
  Context ctx(path, errors);
  const auto lines = read_lines(ctx, path, "dqvs-chain v1");
  if (!lines) return std::nullopt;

  std::vector<JointModel> joints;
  std::optional<Pose> tool;
  for (const auto& [number, toks] : lines->content) {
    if (toks[0] == "joint") {
      double v[14];
      if (!read_doubles(ctx, number, toks, 1, 14, v, "joint")) continue;
      JointModel j;
      j.axis = Vec3(v[0], v[1], v[2]);
      if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
        ctx.error(number, "joint: axis is not unit length");
        continue;
      }
      const auto origin = pose_from_numbers(ctx, number, v + 3, "joint origin");
      if (!origin) continue;
      j.origin = *origin;
      j.lower = v[11];
      j.upper = v[12];
      j.mean = v[13];
      if (!(j.lower < j.upper)) {
        ctx.error(number, "joint: lower limit must be below upper");
        continue;
      }
      if (j.mean < j.lower || j.mean > j.upper) {
        ctx.error(number, "joint: mean position outside limits");
        continue;
      }
      joints.push_back(j);
    } else if (toks[0] == "tool") {
      double v[8];
      if (!read_doubles(ctx, number, toks, 1, 8, v, "tool")) continue;
      tool = pose_from_numbers(ctx, number, v, "tool");
    } else {
      ctx.error(number, "unknown directive '" + toks[0] + "'");
    }
  }
  if (joints.empty()) ctx.error(0, "chain has no joints");
  if (!tool) ctx.error(0, "chain has no tool line");
  if (!ctx.clean()) return std::nullopt;
  return KinematicChain(std::move(joints), *tool);
}

std::optional<std::vector<GraspCandidate>> load_grasps(const std::string& path,
                                                       ParseErrors& errors) {
  Context ctx(path, errors);
  const auto lines = read_lines(ctx, path, "dqvs-grasps v1");
  if (!lines) return std::nullopt;

  std::vector<GraspCandidate> out;
  GraspCandidate current;
  bool in_candidate = false;
  bool have_grasp = false;
  int psi_expected = 0;
  int candidate_line = 0;

  auto flush = [&]() {
    if (!in_candidate) return;
    if (!have_grasp) {
      ctx.error(candidate_line, "candidate " + std::to_string(current.id) +
                                    ": missing grasp pose");
    }
    if (psi_expected > 0) {
      ctx.error(candidate_line,
                "candidate " + std::to_string(current.id) +
                    ": finger is missing " + std::to_string(psi_expected) +
                    " psi rows");
    }
    if (!(current.normalizer > 0.0)) {
      ctx.error(candidate_line, "candidate " + std::to_string(current.id) +
                                    ": ns must be positive");
    }
    out.push_back(std::move(current));
    current = GraspCandidate{};
    have_grasp = false;
    psi_expected = 0;
  };

  for (const auto& [number, toks] : lines->content) {
    const std::string& key = toks[0];
    if (key == "candidate") {
      flush();
      in_candidate = true;
      candidate_line = number;
      long id = 0;
      if (toks.size() != 2 || !parse_long(toks[1], id)) {
        ctx.error(number, "candidate: expected one integer id");
      }
      current.id = static_cast<int>(id);
      continue;
    }
    if (!in_candidate) {
      ctx.error(number, "'" + key + "' before any candidate");
      continue;
    }
    if (key == "grasp") {
      double v[8];
      if (read_doubles(ctx, number, toks, 1, 8, v, "grasp")) {
        if (auto p = pose_from_numbers(ctx, number, v, "grasp")) {
          current.grasp = *p;
          have_grasp = true;
        }
      }
    } else if (key == "offset") {
      double v;
      if (toks.size() == 2 && parse_double(toks[1], v)) {
        current.pregrasp_offset = v;
      } else {
        ctx.error(number, "offset: expected one number");
      }
    } else if (key == "gamma") {
      double v;
      if (toks.size() == 2 && parse_double(toks[1], v)) {
        current.gamma = v;
      } else {
        ctx.error(number, "gamma: expected one number");
      }
    } else if (key == "ns") {
      double v;
      if (toks.size() == 2 && parse_double(toks[1], v)) {
        current.normalizer = v;
      } else {
        ctx.error(number, "ns: expected one number");
      }
    } else if (key == "score") {
      double v;
      if (toks.size() == 2 && parse_double(toks[1], v)) {
        current.precomputed_score = v;
      } else {
        ctx.error(number, "score: expected one number");
      }
    } else if (key == "finger") {
      if (psi_expected > 0) {
        ctx.error(number, "candidate " + std::to_string(current.id) +
                              ": previous finger is missing psi rows");
        psi_expected = 0;
      }
      double omega = 0;
      long dim = 0, patches = 0;
      if (toks.size() != 4 || !parse_double(toks[1], omega) ||
          !parse_long(toks[2], dim) || !parse_long(toks[3], patches) ||
          dim < 1 || patches < 0) {
        ctx.error(number, "finger: expected omega, dimension, patch count");
        continue;
      }
      FingerFeatures finger;
      finger.weight = omega;
      finger.sigma = Eigen::MatrixXd::Zero(dim, dim);
      current.fingers.push_back(std::move(finger));
      psi_expected = static_cast<int>(patches);
    } else if (key == "sigma") {
      if (current.fingers.empty()) {
        ctx.error(number, "sigma before any finger");
        continue;
      }
      FingerFeatures& finger = current.fingers.back();
      const long d = finger.sigma.rows();
      std::vector<double> v(static_cast<std::size_t>(d * d));
      if (!read_doubles(ctx, number, toks, 1, v.size(), v.data(), "sigma")) {
        continue;
      }
      for (long r = 0; r < d; ++r) {
        for (long c = 0; c < d; ++c) {
          finger.sigma(r, c) = v[static_cast<std::size_t>(r * d + c)];
        }
      }
      Eigen::LLT<Eigen::MatrixXd> llt(finger.sigma);
      if (llt.info() != Eigen::Success) {
        ctx.error(number, "candidate " + std::to_string(current.id) +
                              ": covariance is not positive definite");
      }
    } else if (key == "psi") {
      if (current.fingers.empty() || psi_expected <= 0) {
        ctx.error(number, "unexpected psi row");
        continue;
      }
      FingerFeatures& finger = current.fingers.back();
      const long d = finger.sigma.rows();
      Eigen::VectorXd psi(d);
      if (!read_doubles(ctx, number, toks, 1, static_cast<std::size_t>(d),
                        psi.data(), "psi")) {
        continue;
      }
      finger.psi.push_back(std::move(psi));
      --psi_expected;
    } else {
      ctx.error(number, "unknown directive '" + key + "'");
    }
  }
  flush();
  if (out.empty()) ctx.error(0, "no grasp candidates");
  if (!ctx.clean()) return std::nullopt;
  return out;
}

std::optional<EpisodeConfig> load_scenario(const std::string& path,
                                           ParseErrors& errors) {
  Context ctx(path, errors);
  const auto lines = read_lines(ctx, path, "dqvs-scenario v1");
  if (!lines) return std::nullopt;

  EpisodeConfig config;
  std::string chain_path;
  std::string grasps_path;
  std::vector<double> q_start;
  int q_start_line = 0;

  auto one_double = [&](const auto& entry, double& out) {
    const auto& [number, toks] = entry;
    double v;
    if (toks.size() == 2 && parse_double(toks[1], v)) {
      out = v;
      return true;
    }
    ctx.error(number, toks[0] + ": expected one number");
    return false;
  };

  for (const auto& entry : lines->content) {
    const auto& [number, toks] = entry;
    const std::string& key = toks[0];
    if (key == "chain" && toks.size() == 2) {
      chain_path = toks[1];
    } else if (key == "grasps" && toks.size() == 2) {
      grasps_path = toks[1];
    } else if (key == "gains") {
      double v[4];
      if (read_doubles(ctx, number, toks, 1, 4, v, "gains")) {
        config.gains.proportional = v[0];
        config.gains.secondary = v[1];
        config.gains.damping = v[2];
        config.gains.dt = v[3];
        if (!(v[0] > 0.0)) ctx.error(number, "gains: K must be > 0");
        if (v[1] > 0.0) ctx.error(number, "gains: Ks must be <= 0");
        if (!(v[2] > 0.0)) ctx.error(number, "gains: lambda must be > 0");
        if (!(v[3] > 0.0)) ctx.error(number, "gains: dt must be > 0");
      }
    } else if (key == "trajectory") {
      if (toks.size() != 2) {
        ctx.error(number, "trajectory: expected one kind");
        continue;
      }
      try {
        config.trajectory.kind = trajectory_kind_from_string(toks[1]);
      } catch (const std::invalid_argument& e) {
        ctx.error(number, e.what());
      }
    } else if (key == "start_pose") {
      double v[8];
      if (read_doubles(ctx, number, toks, 1, 8, v, "start_pose")) {
        if (auto p = pose_from_numbers(ctx, number, v, "start_pose")) {
          config.trajectory.start_pose = *p;
        }
      }
    } else if (key == "speed") {
      if (one_double(entry, config.trajectory.speed) &&
          config.trajectory.speed < 0.0) {
        ctx.error(number, "speed: must be >= 0");
      }
    } else if (key == "length") {
      one_double(entry, config.trajectory.length);
    } else if (key == "radii") {
      double v[2];
      if (read_doubles(ctx, number, toks, 1, 2, v, "radii")) {
        config.trajectory.radius_a = v[0];
        config.trajectory.radius_b = v[1];
      }
    } else if (key == "amplitude") {
      one_double(entry, config.trajectory.amplitude);
    } else if (key == "frequency") {
      one_double(entry, config.trajectory.frequency);
    } else if (key == "rotation") {
      if (one_double(entry, config.trajectory.rotation_rate)) {
        config.trajectory.with_rotation = true;
      }
    } else if (key == "observation") {
      double v[3];
      if (read_doubles(ctx, number, toks, 1, 3, v, "observation")) {
        config.observation.sigma_translation = v[0];
        config.observation.sigma_rotation = v[1];
        config.observation.seed = static_cast<std::uint64_t>(v[2]);
        if (v[0] < 0.0 || v[1] < 0.0) {
          ctx.error(number, "observation: sigmas must be >= 0");
        }
      }
    } else if (key == "selection") {
      double v[2];
      if (read_doubles(ctx, number, toks, 1, 2, v, "selection")) {
        config.selection.k = static_cast<int>(v[0]);
        config.switch_delta = v[1];
        if (config.selection.k < 1) {
          ctx.error(number, "selection: k must be >= 1");
        }
        if (config.switch_delta < 0.0) {
          ctx.error(number, "selection: delta must be >= 0");
        }
      }
    } else if (key == "ik_iters") {
      long v;
      if (toks.size() == 2 && parse_long(toks[1], v) && v > 0) {
        config.selection.ik_max_iter = static_cast<int>(v);
      } else {
        ctx.error(number, "ik_iters: expected one positive integer");
      }
    } else if (key == "feasibility_tol") {
      if (one_double(entry, config.selection.feasibility_tol) &&
          !(config.selection.feasibility_tol > 0.0)) {
        ctx.error(number, "feasibility_tol: must be > 0");
      }
    } else if (key == "pregrasp_threshold") {
      if (one_double(entry, config.pregrasp_sse_threshold) &&
          !(config.pregrasp_sse_threshold > 0.0)) {
        ctx.error(number, "pregrasp_threshold: must be > 0");
      }
    } else if (key == "grasp_tol_translation") {
      if (one_double(entry, config.grasp_tol_translation) &&
          !(config.grasp_tol_translation > 0.0)) {
        ctx.error(number, "grasp_tol_translation: must be > 0");
      }
    } else if (key == "grasp_tol_rotation_deg") {
      double deg;
      if (one_double(entry, deg)) {
        if (!(deg > 0.0)) {
          ctx.error(number, "grasp_tol_rotation_deg: must be > 0");
        }
        config.grasp_tol_rotation = deg * M_PI / 180.0;
      }
    } else if (key == "max_duration") {
      if (one_double(entry, config.max_duration) &&
          !(config.max_duration > 0.0)) {
        ctx.error(number, "max_duration: must be > 0");
      }
    } else if (key == "q_start") {
      q_start.clear();
      q_start_line = number;
      bool ok = true;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        double v;
        if (!parse_double(toks[i], v)) {
          ctx.error(number, "q_start: bad number '" + toks[i] + "'");
          ok = false;
          break;
        }
        q_start.push_back(v);
      }
      if (!ok) q_start.clear();
    } else if (key == "nullspace" || key == "rerank") {
      if (toks.size() != 2 || (toks[1] != "on" && toks[1] != "off")) {
        ctx.error(number, key + ": expected on or off");
        continue;
      }
      const bool value = toks[1] == "on";
      if (key == "nullspace") {
        config.use_nullspace = value;
      } else {
        config.use_rerank = value;
      }
    } else {
      ctx.error(number, "unknown key '" + key + "'");
    }
  }

  if (chain_path.empty()) ctx.error(0, "missing 'chain' entry");
  if (grasps_path.empty()) ctx.error(0, "missing 'grasps' entry");

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  if (!chain_path.empty()) {
    if (auto chain = load_chain(resolve(chain_path), errors)) {
      config.chain = std::move(*chain);
    }
  }
  if (!grasps_path.empty()) {
    if (auto grasps = load_grasps(resolve(grasps_path), errors)) {
      config.grasps = std::move(*grasps);
    }
  }

  if (!q_start.empty()) {
    if (static_cast<int>(q_start.size()) != config.chain.dof()) {
      ctx.error(q_start_line, "q_start: expected " +
                                  std::to_string(config.chain.dof()) +
                                  " values for this chain");
    } else {
      config.q_start = Eigen::Map<Eigen::VectorXd>(
          q_start.data(), static_cast<long>(q_start.size()));
    }
  }

  if (!errors.empty()) return std::nullopt;
  return config;
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_telemetry_csv(std::ostream& os, const EpisodeResult& result,
                         int dof) {
  os << "iter,t";
  for (int i = 0; i < dof; ++i) os << ",q" << i;
  for (int i = 0; i < 8; ++i) os << ",e" << i;
  os << ",err_trans,err_rot,V,V1,V2,clamp";
  for (int i = 0; i < 8; ++i) os << ",obj" << i;
  os << ",grasp_id,phase,upsilon\n";
  for (const StepRecord& row : result.telemetry) {
    os << row.iteration << ',' << format_double(row.t);
    for (int i = 0; i < dof; ++i) os << ',' << format_double(row.q[i]);
    for (double e : row.error) os << ',' << format_double(e);
    os << ',' << format_double(row.err_translation) << ','
       << format_double(row.err_rotation) << ',' << format_double(row.V)
       << ',' << format_double(row.V1) << ',' << format_double(row.V2) << ','
       << (row.clamped ? 1 : 0);
    for (double o : row.object) os << ',' << format_double(o);
    os << ',' << row.grasp_id << ',' << row.phase << ','
       << format_double(row.upsilon) << '\n';
  }
}

bool write_telemetry_csv(const std::string& path, const EpisodeResult& result,
                         int dof) {
  std::ofstream out(path);
  if (!out) return false;
  write_telemetry_csv(out, result, dof);
  return static_cast<bool>(out);
}

std::optional<std::vector<std::vector<double>>> read_csv(
    const std::string& path, ParseErrors& errors) {
  Context ctx(path, errors);
  std::ifstream in(path);
  if (!in) {
    ctx.error(0, "cannot open file");
    return std::nullopt;
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (number == 1) continue;  // header
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      double v;
      if (!parse_double(line.substr(start, comma - start), v)) {
        ctx.error(number, "bad number in CSV");
        return std::nullopt;
      }
      row.push_back(v);
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dqvs
