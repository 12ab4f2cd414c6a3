#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dqvs/algebra.hpp"

namespace dqvs {

/// Result entry of a nearest-neighbor query: (index into the stored poses,
/// spatial distance), ascending by distance with ties broken by index.
using Neighbor = std::pair<int, double>;

/// Vantage-point tree over poses under the dual quaternion spatial
/// distance. Immutable after construction; concurrent queries are safe.
/// Vantage points are chosen by a seeded generator, splits at the median
/// distance, so builds are deterministic for a fixed seed.
class VpTree {
 public:
  explicit VpTree(std::vector<Pose> points, std::uint64_t seed = 0);

  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<Pose>& points() const { return points_; }

  /// The k nearest stored poses to `query`. k must lie in [1, size()].
  std::vector<Neighbor> k_nearest(const Pose& query, int k) const;

 private:
  struct Node {
    int point = -1;      // index into points_
    double radius = 0.0; // median distance splitting inner from outer
    int inner = -1;
    int outer = -1;
  };

  int build(std::vector<int>& ids, int begin, int end, std::uint64_t& rng);

  std::vector<Pose> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Serial reference: exhaustive scan. The tree must return exactly this.
std::vector<Neighbor> linear_scan_k_nearest(std::span<const Pose> points,
                                            const Pose& query, int k);

/// One query per entry of `queries`. The parallel lane fans the queries out
/// across OpenMP threads; results are identical either way.
std::vector<std::vector<Neighbor>> batch_k_nearest(
    const VpTree& tree, std::span<const Pose> queries, int k,
    bool parallel = true);

}  // namespace dqvs
