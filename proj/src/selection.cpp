#include "dqvs/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dqvs/parallel.hpp"
#include "dqvs/vptree.hpp"

namespace dqvs {

RerankResult rerank(std::span<const double> distances) {
  RerankResult result;
  result.upsilon.assign(distances.size(), 0.0);
  if (distances.empty()) {
    result.degenerate = true;
    return result;
  }
  const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
  const double spread = *hi - *lo;
  if (spread <= 0.0) {
    result.degenerate = true;
    return result;
  }
  for (std::size_t i = 0; i < distances.size(); ++i) {
    result.upsilon[i] = distances[i] / spread;
  }
  return result;
}

SelectionOutcome select_grasp(const SwitchState& state, const Pose& gripper,
                              std::span<const RankedGrasp> grasps,
                              const KinematicChain& chain,
                              const Eigen::VectorXd& q,
                              const ControllerGains& gains,
                              const SelectionOptions& options) {
  if (grasps.empty()) {
    throw std::invalid_argument("select_grasp: empty grasp list");
  }

  std::vector<Pose> grasp_poses;
  grasp_poses.reserve(grasps.size());
  for (const RankedGrasp& g : grasps) grasp_poses.push_back(g.world_grasp);

  const int k = std::min<int>(options.k, static_cast<int>(grasps.size()));
  const VpTree tree(grasp_poses, options.tree_seed);
  const std::vector<Neighbor> nearest = tree.k_nearest(gripper, k);

  // Feasibility of each pre-grasp from the current configuration.
  std::vector<char> feasible(nearest.size(), 0);
  par::for_each_index(
      static_cast<int>(nearest.size()), options.parallel_feasibility,
      [&](int i) {
        const RankedGrasp& g = grasps[nearest[i].first];
        feasible[i] = ik_feasible(chain, q, g.world_pregrasp, gains,
                                  options.ik_max_iter, options.feasibility_tol)
                          .feasible
                          ? 1
                          : 0;
      });

  std::vector<int> kept;        // indices into `grasps`
  std::vector<double> kept_dist;
  for (std::size_t i = 0; i < nearest.size(); ++i) {
    if (feasible[i]) {
      kept.push_back(nearest[i].first);
      kept_dist.push_back(nearest[i].second);
    }
  }

  SelectionOutcome outcome;
  outcome.state = state;
  if (kept.empty()) {
    return outcome;  // no grasp available; caller keeps its last reference
  }

  const RerankResult ranks = rerank(kept_dist);
  outcome.degenerate = ranks.degenerate;

  // Best candidate: minimum Upsilon; near-ties go to the higher grasp
  // score, then the smaller id.
  int best = 0;
  for (std::size_t i = 1; i < kept.size(); ++i) {
    const double diff = ranks.upsilon[i] - ranks.upsilon[best];
    if (diff < -1e-9) {
      best = static_cast<int>(i);
    } else if (std::abs(diff) <= 1e-9) {
      const RankedGrasp& a = grasps[kept[i]];
      const RankedGrasp& b = grasps[kept[best]];
      if (a.locomo > b.locomo ||
          (a.locomo == b.locomo && a.id < b.id)) {
        best = static_cast<int>(i);
      }
    }
  }

  // Position of the currently active grasp inside the feasible set.
  int active_pos = -1;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (grasps[kept[i]].id == state.active_id) {
      active_pos = static_cast<int>(i);
      break;
    }
  }

  int chosen_pos;
  if (state.active_id < 0 || active_pos < 0) {
    // First selection, or the active grasp became infeasible.
    chosen_pos = best;
    outcome.switched = state.active_id >= 0;
  } else if (ranks.upsilon[active_pos] - ranks.upsilon[best] >=
             state.delta) {
    chosen_pos = best;
    outcome.switched = chosen_pos != active_pos;
  } else {
    chosen_pos = active_pos;
  }

  outcome.chosen = grasps[kept[chosen_pos]];
  outcome.state.active_id = outcome.chosen->id;
  outcome.state.active_upsilon = ranks.upsilon[chosen_pos];
  return outcome;
}

}  // namespace dqvs
