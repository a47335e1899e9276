#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace railelec {

using NodeIndex = std::int32_t;
using ArcIndex = std::int32_t;

inline constexpr NodeIndex kNoNode = -1;
inline constexpr ArcIndex kNoArc = -1;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Directed multigraph with dense 0-based node and arc indices.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(std::size_t num_nodes) : out_(num_nodes), in_(num_nodes) {}

  NodeIndex add_node() {
    out_.emplace_back();
    in_.emplace_back();
    return static_cast<NodeIndex>(out_.size() - 1);
  }

  ArcIndex add_arc(NodeIndex tail, NodeIndex head) {
    if (tail < 0 || head < 0 || static_cast<std::size_t>(tail) >= out_.size() ||
        static_cast<std::size_t>(head) >= out_.size())
      throw std::out_of_range("Digraph::add_arc: node index out of range");
    const auto a = static_cast<ArcIndex>(tail_.size());
    tail_.push_back(tail);
    head_.push_back(head);
    out_[tail].push_back(a);
    in_[head].push_back(a);
    return a;
  }

  std::size_t num_nodes() const noexcept { return out_.size(); }
  std::size_t num_arcs() const noexcept { return tail_.size(); }
  NodeIndex tail(ArcIndex a) const { return tail_[a]; }
  NodeIndex head(ArcIndex a) const { return head_[a]; }
  std::span<const ArcIndex> out_arcs(NodeIndex v) const { return out_[v]; }
  std::span<const ArcIndex> in_arcs(NodeIndex v) const { return in_[v]; }

 private:
  std::vector<NodeIndex> tail_;
  std::vector<NodeIndex> head_;
  std::vector<std::vector<ArcIndex>> out_;
  std::vector<std::vector<ArcIndex>> in_;
};

struct ShortestPathTree {
  std::vector<double> dist;
  std::vector<ArcIndex> pred;  // kNoArc at the root and at unreachable nodes

  bool reached(NodeIndex v) const { return dist[v] < kInf; }

  /// Arcs from the root to `v` in travel order; empty when unreachable or v is the root.
  std::vector<ArcIndex> path_to(const Digraph& g, NodeIndex v) const {
    std::vector<ArcIndex> rev;
    if (!reached(v)) return rev;
    for (ArcIndex a = pred[v]; a != kNoArc; a = pred[g.tail(a)]) rev.push_back(a);
    return {rev.rbegin(), rev.rend()};
  }
};

/// Dijkstra over arcs accepted by `usable`, costs must be non-negative.
/// Among equal-distance predecessors the lowest arc index wins, so results are
/// reproducible independent of heap ordering.
template <class CostFn, class UsableFn>
ShortestPathTree dijkstra(const Digraph& g, NodeIndex root, CostFn&& cost, UsableFn&& usable) {
  ShortestPathTree t{std::vector<double>(g.num_nodes(), kInf),
                     std::vector<ArcIndex>(g.num_nodes(), kNoArc)};
  using Item = std::pair<double, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<char> done(g.num_nodes(), 0);
  t.dist[root] = 0.0;
  heap.emplace(0.0, root);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (ArcIndex a : g.out_arcs(u)) {
      if (!usable(a)) continue;
      const NodeIndex v = g.head(a);
      if (done[v]) continue;
      const double nd = d + cost(a);
      if (nd < t.dist[v] || (nd == t.dist[v] && a < t.pred[v])) {
        const bool improved = nd < t.dist[v];
        t.dist[v] = nd;
        t.pred[v] = a;
        if (improved) heap.emplace(nd, v);
      }
    }
  }
  return t;
}

}  // namespace railelec
