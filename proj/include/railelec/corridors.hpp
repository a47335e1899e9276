#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "railelec/costmodel.hpp"
#include "railelec/error.hpp"
#include "railelec/network.hpp"

namespace railelec {

/// Yard-to-yard path electrified as one unit. `links` lists every candidate
/// link along the path in travel order, both directions of a track included.
struct Corridor {
  std::size_t id = 0;
  long yard_a = 0;  // node id where the search started
  long yard_b = 0;
  std::vector<std::size_t> links;  // physical link indices
  double length_km = 0.0;          // route length
  double cost = 0.0;               // sum of member electrification costs
};

enum class CorridorMetric { FreeFlowCost, Length };

struct CorridorSet {
  std::vector<Corridor> corridors;
  std::vector<std::string> warnings;
};

/// Candidate links grouped by unordered endpoint pair: the undirected graph
/// the corridor search runs on.
class TrackGraph {
 public:
  struct Edge {
    std::size_t a = 0, b = 0;         // node indices, a < b
    std::vector<std::size_t> links;  // member link indices, ascending id
    long key = 0;                    // smallest member link id
    double weight = kInf;            // smallest member weight
    double length_km = kInf;
  };

  TrackGraph(const RailNetwork& net, std::span<const double> link_weight) : adj_(net.nodes().size()) {
    if (link_weight.size() != net.links().size()) throw ValidationError("corridors: one weight per link required");
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> by_pair;
    const auto& links = net.links();
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (!links[i].candidate) continue;
      auto u = net.node_index(links[i].tail), v = net.node_index(links[i].head);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      auto [it, fresh] = by_pair.try_emplace({u, v}, edges_.size());
      if (fresh) edges_.push_back({u, v, {}, links[i].id, kInf, kInf});
      auto& e = edges_[it->second];
      e.links.push_back(i);
      e.key = std::min(e.key, links[i].id);
      if (!(link_weight[i] >= 0.0)) throw ValidationError("corridors: link weights must be >= 0");
      e.weight = std::min(e.weight, link_weight[i]);
      e.length_km = std::min(e.length_km, links[i].length_km);
    }
    for (auto& e : edges_) {
      std::sort(e.links.begin(), e.links.end(), [&](std::size_t x, std::size_t y) { return links[x].id < links[y].id; });
    }
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      adj_[edges_[k].a].push_back(k);
      adj_[edges_[k].b].push_back(k);
    }
  }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& incident(std::size_t node) const { return adj_[node]; }
  std::size_t other(std::size_t edge, std::size_t node) const {
    return edges_[edge].a == node ? edges_[edge].b : edges_[edge].a;
  }
  std::size_t num_nodes() const { return adj_.size(); }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
};

/// Shortest paths from one source. Equal-distance paths are ranked by their
/// edge-key sequence, smallest first. When `stop` is given, nodes it marks are
/// reached but never expanded (except the source).
struct LexTree {
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<double> dist;
  std::vector<std::size_t> pred_edge;

  std::vector<std::size_t> edges_to(const TrackGraph& g, std::size_t v) const {
    std::vector<std::size_t> rev;
    for (std::size_t u = v; pred_edge[u] != kNone; u = g.other(pred_edge[u], u)) rev.push_back(pred_edge[u]);
    return {rev.rbegin(), rev.rend()};
  }
};

inline LexTree lex_shortest_paths(const TrackGraph& g, std::size_t source, const std::vector<char>* stop = nullptr) {
  const std::size_t n = g.num_nodes();
  LexTree t{std::vector<double>(n, kInf), std::vector<std::size_t>(n, LexTree::kNone)};
  auto key_sequence = [&](std::size_t v, std::size_t last_edge) {
    std::vector<long> seq;
    for (std::size_t e : t.edges_to(g, v)) seq.push_back(g.edges()[e].key);
    seq.push_back(g.edges()[last_edge].key);
    return seq;
  };
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<char> done(n, 0);
  t.dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (stop && u != source && (*stop)[u]) continue;
    for (std::size_t e : g.incident(u)) {
      const std::size_t v = g.other(e, u);
      if (done[v]) continue;
      const double nd = d + g.edges()[e].weight;
      bool take = nd < t.dist[v];
      if (!take && nd == t.dist[v]) {
        const std::size_t old = t.pred_edge[v];
        take = key_sequence(u, e) < key_sequence(g.other(old, v), old);
      }
      if (take) {
        t.dist[v] = nd;
        t.pred_edge[v] = e;
        heap.emplace(nd, v);
      }
    }
  }
  return t;
}

inline double corridor_cost(const Corridor& c, std::span<const double> link_costs) {
  double total = 0.0;
  for (std::size_t l : c.links) total += link_costs[l];
  return total;
}

/// Per-link search weight for the chosen metric.
inline std::vector<double> corridor_weights(const RailNetwork& net, CorridorMetric metric,
                                            std::span<const LinkCostProfile> profiles = {}) {
  std::vector<double> w(net.links().size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (metric == CorridorMetric::Length) {
      w[i] = net.links()[i].length_km;
    } else {
      if (profiles.size() != w.size()) throw ValidationError("corridors: cost metric needs one profile per link");
      w[i] = profiles[i].congestion_cost_per_ton + profiles[i].diesel.fuel_cost_per_ton;
    }
  }
  return w;
}

/// Yard-to-yard corridors: full shortest paths that coincide with the
/// shortest paths found when the search stops at the first yard reached.
inline CorridorSet candidate_corridors(const RailNetwork& net, std::span<const double> link_weight,
                                       std::span<const double> link_costs) {
  if (link_costs.size() != net.links().size()) throw ValidationError("corridors: one cost per link required");
  const TrackGraph g(net, link_weight);
  const auto yards = net.yards();
  if (yards.empty()) throw ValidationError("corridors: the network has no yards");
  std::vector<char> is_yard(net.nodes().size(), 0);
  for (auto y : yards) is_yard[y] = 1;

  CorridorSet out;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t s : yards) {
    const auto full = lex_shortest_paths(g, s);
    const auto pruned = lex_shortest_paths(g, s, &is_yard);
    bool connected = false;
    for (std::size_t t : yards) {
      if (t == s || !(full.dist[t] < kInf)) continue;
      connected = true;
      const auto path = full.edges_to(g, t);
      if (pruned.edges_to(g, t) != path) continue;
      Corridor c;
      c.yard_a = net.nodes()[s].id;
      c.yard_b = net.nodes()[t].id;
      for (std::size_t e : path) {
        const auto& edge = g.edges()[e];
        c.links.insert(c.links.end(), edge.links.begin(), edge.links.end());
        c.length_km += edge.length_km;
      }
      auto key = c.links;
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) continue;
      c.cost = corridor_cost(c, link_costs);
      c.id = out.corridors.size();
      out.corridors.push_back(std::move(c));
    }
    if (!connected) out.warnings.push_back("yard " + std::to_string(net.nodes()[s].id) + " reaches no other yard; excluded");
  }
  return out;
}

}  // namespace railelec
