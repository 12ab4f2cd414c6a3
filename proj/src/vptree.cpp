#include "dqvs/vptree.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

#include "dqvs/parallel.hpp"

namespace dqvs {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Worst-first ordering on (distance, index) pairs.
using HeapEntry = std::pair<double, int>;
using Heap = std::priority_queue<HeapEntry>;

void offer(Heap& heap, int k, double dist, int id) {
  const HeapEntry entry{dist, id};
  if (static_cast<int>(heap.size()) < k) {
    heap.push(entry);
  } else if (entry < heap.top()) {
    heap.pop();
    heap.push(entry);
  }
}

void check_k(int k, int size, const char* what) {
  if (k < 1 || k > size) {
    throw std::invalid_argument(std::string(what) + ": k out of range");
  }
}

std::vector<Neighbor> drain(Heap& heap) {
  std::vector<Neighbor> out(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = {heap.top().second, heap.top().first};
    heap.pop();
  }
  return out;
}

}  // namespace

VpTree::VpTree(std::vector<Pose> points, std::uint64_t seed)
    : points_(std::move(points)) {
  if (points_.empty()) {
    throw std::invalid_argument("VpTree: empty point set");
  }
  std::vector<int> ids(points_.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  nodes_.reserve(points_.size());
  std::uint64_t rng = seed ^ 0xd1b54a32d192ed03ull;
  root_ = build(ids, 0, static_cast<int>(ids.size()), rng);
}

int VpTree::build(std::vector<int>& ids, int begin, int end,
                  std::uint64_t& rng) {
  if (begin >= end) return -1;
  const int pick =
      begin + static_cast<int>(splitmix64(rng) %
                               static_cast<std::uint64_t>(end - begin));
  std::swap(ids[begin], ids[pick]);

  Node node;
  node.point = ids[begin];
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);

  if (end - begin > 1) {
    const Pose& vantage = points_[nodes_[node_index].point];
    const int mid = begin + 1 + (end - begin - 1) / 2;
    std::nth_element(ids.begin() + begin + 1, ids.begin() + mid,
                     ids.begin() + end, [&](int a, int b) {
                       return distance(points_[a], vantage) <
                              distance(points_[b], vantage);
                     });
    const double radius = distance(points_[ids[mid]], vantage);
    const int inner = build(ids, begin + 1, mid, rng);
    const int outer = build(ids, mid, end, rng);
    nodes_[node_index].radius = radius;
    nodes_[node_index].inner = inner;
    nodes_[node_index].outer = outer;
  }
  return node_index;
}

std::vector<Neighbor> VpTree::k_nearest(const Pose& query, int k) const {
  check_k(k, size(), "VpTree::k_nearest");
  Heap heap;

  // Recursive descent with the heap's worst distance as pruning bound.
  // Boundary points are kept on both sides (non-strict tests) so that
  // equal-distance ties resolve purely by index, exactly as the linear
  // scan does.
  auto visit = [&](auto&& self, int node_index) -> void {
    if (node_index < 0) return;
    const Node& node = nodes_[node_index];
    const double dist = distance(query, points_[node.point]);
    offer(heap, k, dist, node.point);
    if (node.inner < 0 && node.outer < 0) return;

    const auto tau = [&]() {
      return static_cast<int>(heap.size()) == k
                 ? heap.top().first
                 : std::numeric_limits<double>::infinity();
    };
    if (dist < node.radius) {
      if (dist - tau() <= node.radius) self(self, node.inner);
      if (dist + tau() >= node.radius) self(self, node.outer);
    } else {
      if (dist + tau() >= node.radius) self(self, node.outer);
      if (dist - tau() <= node.radius) self(self, node.inner);
    }
  };
  visit(visit, root_);
  return drain(heap);
}

std::vector<Neighbor> linear_scan_k_nearest(std::span<const Pose> points,
                                            const Pose& query, int k) {
  check_k(k, static_cast<int>(points.size()), "linear_scan_k_nearest");
  Heap heap;
  for (std::size_t i = 0; i < points.size(); ++i) {
    offer(heap, k, distance(query, points[i]), static_cast<int>(i));
  }
  return drain(heap);
}

std::vector<std::vector<Neighbor>> batch_k_nearest(
    const VpTree& tree, std::span<const Pose> queries, int k, bool parallel) {
  std::vector<std::vector<Neighbor>> out(queries.size());
  par::for_each_index(static_cast<int>(queries.size()), parallel,
                      [&](int i) { out[i] = tree.k_nearest(queries[i], k); });
  return out;
}

}  // namespace dqvs
