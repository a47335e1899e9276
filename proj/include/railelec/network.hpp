#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "railelec/error.hpp"
#include "railelec/geo.hpp"
#include "railelec/graph.hpp"

namespace railelec {

struct Node {
  long id = 0;
  double lat = 0.0;
  double lon = 0.0;
  bool is_yard = false;
  // $ per train for a diesel/electric locomotive swap. Empty on a yard means
  // "use the configured default"; non-yards never carry one.
  std::optional<double> switching_cost;
};

struct PhysicalLink {
  long id = 0;
  long tail = 0;
  long head = 0;
  double length_km = 0.0;
  double straight_line_km = 0.0;  // filled by assign_alphas
  double alpha = 1.0;             // filled by assign_alphas
  double grade = 0.0;             // signed fraction, positive is uphill tail->head
  double curve_radius_m = 0.0;    // 0 = derive from alpha, inf = tangent track
  double capacity_tpd = 0.0;
  int signal_class = 0;
  bool candidate = false;
  std::optional<double> desired_speed_mps;
  std::optional<double> k_f;
  std::optional<double> k_a;
};

/// Physical rail network with id lookups. Links are directed tail->head.
class RailNetwork {
 public:
  RailNetwork() = default;
  RailNetwork(std::vector<Node> nodes, std::vector<PhysicalLink> links)
      : nodes_(std::move(nodes)), links_(std::move(links)) {
    index();
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<PhysicalLink>& links() const noexcept { return links_; }
  std::vector<PhysicalLink>& mutable_links() noexcept { return links_; }

  std::size_t node_index(long id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) throw ValidationError("unknown node id " + std::to_string(id));
    return it->second;
  }
  std::size_t link_index(long id) const {
    auto it = link_index_.find(id);
    if (it == link_index_.end()) throw ValidationError("unknown link id " + std::to_string(id));
    return it->second;
  }
  bool has_node(long id) const { return node_index_.count(id) > 0; }
  bool has_link(long id) const { return link_index_.count(id) > 0; }

  const Node& tail_node(const PhysicalLink& l) const { return nodes_[node_index(l.tail)]; }
  const Node& head_node(const PhysicalLink& l) const { return nodes_[node_index(l.head)]; }

  std::vector<std::size_t> yards() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].is_yard) out.push_back(i);
    return out;
  }

  double candidate_km() const {
    double km = 0.0;
    for (const auto& l : links_)
      if (l.candidate) km += l.length_km;
    return km;
  }

 private:
  void index() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (!node_index_.emplace(n.id, i).second)
        throw ValidationError("duplicate node id " + std::to_string(n.id));
      if (n.is_yard && n.switching_cost && (!std::isfinite(*n.switching_cost) || *n.switching_cost < 0.0))
        throw ValidationError("yard " + std::to_string(n.id) + " has an invalid switching cost");
      if (!n.is_yard && n.switching_cost && std::isfinite(*n.switching_cost))
        throw ValidationError("non-yard node " + std::to_string(n.id) + " carries a finite switching cost");
    }
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const auto& l = links_[i];
      if (!link_index_.emplace(l.id, i).second)
        throw ValidationError("duplicate link id " + std::to_string(l.id));
      if (!node_index_.count(l.tail) || !node_index_.count(l.head))
        throw ValidationError("link " + std::to_string(l.id) + " references an unknown node");
      if (!(l.length_km > 0.0)) throw ValidationError("link " + std::to_string(l.id) + " has non-positive length");
      if (!(l.capacity_tpd > 0.0)) throw ValidationError("link " + std::to_string(l.id) + " has non-positive capacity");
      if (!(std::abs(l.grade) < 0.1)) throw ValidationError("link " + std::to_string(l.id) + " grade outside (-0.1, 0.1)");
    }
  }

  std::vector<Node> nodes_;
  std::vector<PhysicalLink> links_;
  std::unordered_map<long, std::size_t> node_index_;
  std::unordered_map<long, std::size_t> link_index_;
};

struct AlphaResult {
  double alpha = 1.0;
  double straight_line_km = 0.0;
  bool degenerate = false;  // endpoints coincide; caller substitutes the network alpha_max
};

/// Ratio of track length to great-circle endpoint distance, never below one.
inline AlphaResult compute_alpha(const PhysicalLink& link, const Node& tail, const Node& head) {
  if (!(link.length_km > 0.0)) throw ValidationError("compute_alpha: link length must be positive");
  const double sl = geo::haversine_km(tail.lat, tail.lon, head.lat, head.lon);
  if (!(sl > 0.0)) return {1.0, 0.0, true};
  return {std::max(1.0, link.length_km / sl), sl, false};
}

/// Fills alpha and straight-line length on every link. Returns warnings for
/// links with coincident endpoints, which receive the largest regular alpha.
inline std::vector<std::string> assign_alphas(RailNetwork& net) {
  std::vector<std::string> warnings;
  std::vector<std::size_t> degenerate;
  double alpha_max = 1.0;
  auto& links = net.mutable_links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    auto& l = links[i];
    const auto r = compute_alpha(l, net.tail_node(l), net.head_node(l));
    l.straight_line_km = r.straight_line_km;
    if (r.degenerate) {
      degenerate.push_back(i);
      continue;
    }
    l.alpha = r.alpha;
    alpha_max = std::max(alpha_max, r.alpha);
  }
  for (auto i : degenerate) {
    links[i].alpha = alpha_max;
    links[i].straight_line_km = links[i].length_km / alpha_max;
    warnings.push_back("link " + std::to_string(links[i].id) +
                       " has coincident endpoints; alpha set to network maximum");
  }
  return warnings;
}

enum class ArcKind { DieselTraction, ElectricTraction, Switch, Connector };

inline const char* to_string(ArcKind k) {
  switch (k) {
    case ArcKind::DieselTraction: return "diesel";
    case ArcKind::ElectricTraction: return "electric";
    case ArcKind::Switch: return "switch";
    case ArcKind::Connector: return "connector";
  }
  return "?";
}

enum class NodeRole { Diesel, Electric, Source, Sink };

struct ExpandedArc {
  ArcIndex id = kNoArc;
  ArcKind kind = ArcKind::Connector;
  std::optional<std::size_t> physical_link;  // traction arcs only (index into links)
  ArcIndex partner = kNoArc;                  // traction arcs only
  std::optional<std::size_t> yard;            // switch arcs only (index into nodes)
  double fixed_cost = 0.0;                    // $/ton, switch arcs only
};

struct ExpandedNode {
  std::size_t physical_node = 0;
  NodeRole role = NodeRole::Diesel;
};

struct TractionPair {
  ArcIndex diesel = kNoArc;
  ArcIndex electric = kNoArc;
};

struct NodePorts {
  NodeIndex diesel = kNoNode;
  NodeIndex electric = kNoNode;
  NodeIndex source = kNoNode;
  NodeIndex sink = kNoNode;
};

/// Mode-expanded network. Every physical node becomes a diesel side and an
/// electric side; a physical link becomes a diesel arc between the diesel
/// sides and an electric arc between the electric sides. Yards get two switch
/// arcs crossing between the sides. Demand enters through a source node with
/// zero-cost connectors to both sides and leaves through a sink node reached
/// from both sides, so no mode change can happen outside a yard.
struct ExpandedNetwork {
  Digraph graph;
  std::vector<ExpandedArc> arcs;
  std::vector<ExpandedNode> nodes;
  std::vector<NodePorts> ports;          // per physical node
  std::vector<TractionPair> pairs;       // per physical link
  std::vector<char> link_is_candidate;   // per physical link
  std::vector<std::size_t> yards;        // physical node indices

  std::size_t num_links() const { return pairs.size(); }

  std::size_t count(ArcKind k) const {
    return static_cast<std::size_t>(
        std::count_if(arcs.begin(), arcs.end(), [k](const ExpandedArc& a) { return a.kind == k; }));
  }
};

struct SwitchingParams {
  double default_cost_per_train = 3800.0;
  double tons_per_train = 1.0;  // cargo tons carried by the representative train
};

inline ExpandedNetwork expand(const RailNetwork& net, const SwitchingParams& sw) {
  if (!(sw.tons_per_train > 0.0)) throw ValidationError("expand: tons per train must be positive");
  ExpandedNetwork x;
  const auto& nodes = net.nodes();
  const auto& links = net.links();
  x.ports.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& p = x.ports[i];
    p.diesel = x.graph.add_node();
    x.nodes.push_back({i, NodeRole::Diesel});
    p.electric = x.graph.add_node();
    x.nodes.push_back({i, NodeRole::Electric});
    p.source = x.graph.add_node();
    x.nodes.push_back({i, NodeRole::Source});
    p.sink = x.graph.add_node();
    x.nodes.push_back({i, NodeRole::Sink});
  }

  auto push = [&x](NodeIndex t, NodeIndex h, ExpandedArc arc) {
    arc.id = x.graph.add_arc(t, h);
    x.arcs.push_back(arc);
    return arc.id;
  };

  x.pairs.resize(links.size());
  x.link_is_candidate.resize(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& p_t = x.ports[net.node_index(links[i].tail)];
    const auto& p_h = x.ports[net.node_index(links[i].head)];
    ExpandedArc d{kNoArc, ArcKind::DieselTraction, i, kNoArc, std::nullopt, 0.0};
    ExpandedArc e{kNoArc, ArcKind::ElectricTraction, i, kNoArc, std::nullopt, 0.0};
    const ArcIndex ad = push(p_t.diesel, p_h.diesel, d);
    const ArcIndex ae = push(p_t.electric, p_h.electric, e);
    x.arcs[ad].partner = ae;
    x.arcs[ae].partner = ad;
    x.pairs[i] = {ad, ae};
    x.link_is_candidate[i] = links[i].candidate ? 1 : 0;
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_yard) continue;
    x.yards.push_back(i);
    const double per_train = nodes[i].switching_cost.value_or(sw.default_cost_per_train);
    const double per_ton = per_train / sw.tons_per_train;
    const auto& p = x.ports[i];
    push(p.diesel, p.electric, {kNoArc, ArcKind::Switch, std::nullopt, kNoArc, i, per_ton});
    push(p.electric, p.diesel, {kNoArc, ArcKind::Switch, std::nullopt, kNoArc, i, per_ton});
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& p = x.ports[i];
    push(p.source, p.diesel, {});
    push(p.source, p.electric, {});
    push(p.diesel, p.sink, {});
    push(p.electric, p.sink, {});
  }
  return x;
}

/// Per-arc usability: electric arcs only on electrified links, everything else open.
inline std::vector<char> apply_design(const ExpandedNetwork& x, std::span<const char> electrified_links) {
  if (electrified_links.size() != x.num_links())
    throw ValidationError("apply_design: electrification mask has " + std::to_string(electrified_links.size()) +
                          " entries, network has " + std::to_string(x.num_links()) + " links");
  std::vector<char> usable(x.arcs.size(), 1);
  for (std::size_t i = 0; i < x.num_links(); ++i) {
    if (electrified_links[i] && !x.link_is_candidate[i])
      throw ValidationError("apply_design: link index " + std::to_string(i) + " is not a candidate for electrification");
    usable[x.pairs[i].electric] = electrified_links[i] ? 1 : 0;
  }
  return usable;
}

struct PhysicalFlows {
  std::vector<double> diesel;
  std::vector<double> electric;
  std::vector<double> total;
};

inline PhysicalFlows aggregate(const ExpandedNetwork& x, std::span<const double> arc_flows) {
  PhysicalFlows f;
  f.diesel.resize(x.num_links());
  f.electric.resize(x.num_links());
  f.total.resize(x.num_links());
  for (std::size_t i = 0; i < x.num_links(); ++i) {
    f.diesel[i] = arc_flows[x.pairs[i].diesel];
    f.electric[i] = arc_flows[x.pairs[i].electric];
    f.total[i] = f.diesel[i] + f.electric[i];
  }
  return f;
}

}  // namespace railelec
