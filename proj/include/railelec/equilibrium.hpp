#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "railelec/arc_costs.hpp"
#include "railelec/error.hpp"
#include "railelec/graph.hpp"

namespace railelec {

/// One origin-destination demand in expanded-graph node indices, tons/day.
struct Demand {
  NodeIndex origin = kNoNode;
  NodeIndex destination = kNoNode;
  double tons = 0.0;
};

struct FlowState {
  std::vector<double> flow;  // tons/day per arc
  std::vector<double> cost;  // $/ton per arc
  double beckmann = 0.0;
};

struct GapRecord {
  int iteration = 0;
  double beckmann = 0.0;
  double relative_gap = 0.0;
  double seconds = 0.0;
};

struct GapMetrics {
  double relative_gap = 0.0;
  double max_label_spread = 0.0;  // max over bushes and loaded nodes of (U - L) / L
  int iterations = 0;
  double beckmann = 0.0;
  double seconds = 0.0;
  bool converged = false;
  std::vector<GapRecord> trace;
};

struct ShiftEvent {
  std::size_t bush = 0;
  NodeIndex merge_node = kNoNode;
  double delta = 0.0;
  double beckmann_change = 0.0;
  std::span<const double> flows;  // total arc flows after the shift
};

struct SolverOptions {
  double tol = 1e-6;          // relative gap and label-spread target
  int max_iter = 500;
  bool interaction_newton = true;  // include partner coupling in the Newton denominator
  std::function<void(const ShiftEvent&)> on_shift;
};

// ---- objective, costs, Jacobian ----

template <SymmetricCostModel M>
double beckmann(const M& m, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t a = 0; a < m.num_arcs(); ++a) {
    const auto arc = static_cast<ArcIndex>(a);
    if (group_leader(m, arc) == arc) total += m.group_potential(arc, x);
  }
  return total;
}

template <SymmetricCostModel M>
std::vector<double> arc_costs(const M& m, std::span<const double> x) {
  std::vector<double> c(m.num_arcs());
  for (std::size_t a = 0; a < c.size(); ++a) c[a] = m.cost(static_cast<ArcIndex>(a), x);
  return c;
}

template <SymmetricCostModel M>
double total_system_cost(const M& m, std::span<const double> x) {
  double total = 0.0;
  for (std::size_t a = 0; a < m.num_arcs(); ++a) total += x[a] * m.cost(static_cast<ArcIndex>(a), x);
  return total;
}

/// Dense analytic Jacobian, J[a][b] = d c_a / d x_b. Meant for tests and small instances.
template <SymmetricCostModel M>
std::vector<std::vector<double>> jacobian(const M& m, std::span<const double> x) {
  const std::size_t n = m.num_arcs();
  std::vector<std::vector<double>> j(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    const auto arc = static_cast<ArcIndex>(a);
    j[a][a] = m.own_derivative(arc, x);
    if (const ArcIndex p = m.partner(arc); p != kNoArc) j[a][p] = m.cross_derivative(arc, x);
  }
  return j;
}

// ---- bushes ----

struct Bush {
  NodeIndex origin = kNoNode;
  std::vector<char> contains;    // per arc
  std::vector<double> flow;      // this origin's flow per arc
  std::vector<NodeIndex> order;  // topological order of nodes reachable inside the bush
};

/// Kahn ordering of the bush restricted to nodes reachable from its origin.
/// Returns false when the bush arcs contain a cycle.
inline bool topological_order(const Digraph& g, const Bush& b, std::vector<NodeIndex>& order) {
  const std::size_t n = g.num_nodes();
  std::vector<char> reach(n, 0);
  std::vector<NodeIndex> stack{b.origin};
  reach[b.origin] = 1;
  while (!stack.empty()) {
    const NodeIndex u = stack.back();
    stack.pop_back();
    for (ArcIndex a : g.out_arcs(u))
      if (b.contains[a] && !reach[g.head(a)]) {
        reach[g.head(a)] = 1;
        stack.push_back(g.head(a));
      }
  }
  std::vector<int> indeg(n, 0);
  std::size_t reachable = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!reach[v]) continue;
    ++reachable;
    for (ArcIndex a : g.in_arcs(static_cast<NodeIndex>(v)))
      if (b.contains[a] && reach[g.tail(a)]) ++indeg[v];
  }
  order.clear();
  std::vector<NodeIndex> ready;
  if (indeg[b.origin] == 0) ready.push_back(b.origin);
  std::size_t head = 0;
  while (head < ready.size()) {
    const NodeIndex u = ready[head++];
    order.push_back(u);
    for (ArcIndex a : g.out_arcs(u)) {
      if (!b.contains[a]) continue;
      const NodeIndex v = g.head(a);
      if (--indeg[v] == 0) ready.push_back(v);
    }
  }
  return order.size() == reachable;
}

struct BushLabels {
  std::vector<double> min_cost;    // L
  std::vector<double> max_cost;    // U
  std::vector<ArcIndex> min_pred;
  std::vector<ArcIndex> max_pred;
};

/// Min- and max-cost labels in one topological pass. Min labels use every bush
/// arc; max labels use only arcs carrying this origin's flow unless
/// `max_over_all_arcs` is set. Ties go to the lowest arc index.
inline BushLabels shortest_longest_labels(const Digraph& g, const Bush& b, std::span<const double> costs,
                                          bool max_over_all_arcs = false) {
  const std::size_t n = g.num_nodes();
  BushLabels l{std::vector<double>(n, kInf), std::vector<double>(n, -kInf), std::vector<ArcIndex>(n, kNoArc),
               std::vector<ArcIndex>(n, kNoArc)};
  l.min_cost[b.origin] = 0.0;
  l.max_cost[b.origin] = 0.0;
  for (NodeIndex v : b.order) {
    if (v == b.origin) continue;
    for (ArcIndex a : g.in_arcs(v)) {
      if (!b.contains[a]) continue;
      const NodeIndex u = g.tail(a);
      if (l.min_cost[u] < kInf) {
        const double c = l.min_cost[u] + costs[a];
        if (c < l.min_cost[v] || (c == l.min_cost[v] && a < l.min_pred[v])) {
          l.min_cost[v] = c;
          l.min_pred[v] = a;
        }
      }
      if ((max_over_all_arcs || b.flow[a] > 0.0) && l.max_cost[u] > -kInf) {
        const double c = l.max_cost[u] + costs[a];
        if (c > l.max_cost[v] || (c == l.max_cost[v] && a < l.max_pred[v])) {
          l.max_cost[v] = c;
          l.max_pred[v] = a;
        }
      }
    }
  }
  return l;
}

struct SegmentPair {
  std::vector<ArcIndex> lower;  // pi_L, travel order
  std::vector<ArcIndex> upper;  // pi_U, travel order
  NodeIndex diverge = kNoNode;
};

/// Min and max paths into `node` traced back to the last node they share.
inline std::optional<SegmentPair> divergent_segments(const Digraph& g, const BushLabels& l, NodeIndex node) {
  if (l.max_pred[node] == kNoArc || l.min_pred[node] == kNoArc || l.max_pred[node] == l.min_pred[node])
    return std::nullopt;
  std::map<NodeIndex, std::size_t> depth;
  std::vector<ArcIndex> min_rev;
  depth[node] = 0;
  for (NodeIndex v = node; l.min_pred[v] != kNoArc;) {
    const ArcIndex a = l.min_pred[v];
    min_rev.push_back(a);
    v = g.tail(a);
    depth[v] = min_rev.size();
  }
  std::vector<ArcIndex> max_rev;
  NodeIndex v = node;
  do {
    const ArcIndex a = l.max_pred[v];
    if (a == kNoArc) return std::nullopt;
    max_rev.push_back(a);
    v = g.tail(a);
  } while (!depth.count(v));
  SegmentPair s;
  s.diverge = v;
  s.upper.assign(max_rev.rbegin(), max_rev.rend());
  s.lower.assign(min_rev.rbegin() + static_cast<std::ptrdiff_t>(min_rev.size() - depth[v]), min_rev.rend());
  return s;
}

/// d F(x + I dx) / d dx  =  sum_a c_a(x + I dx) I_a  with I = +1 on the lower
/// segment and -1 on the upper one.
template <SymmetricCostModel M>
double shift_derivative(const M& m, std::span<const ArcIndex> lower, std::span<const ArcIndex> upper,
                        std::span<const double> x, double dx) {
  std::vector<double> moved(x.begin(), x.end());
  for (ArcIndex a : lower) moved[a] += dx;
  for (ArcIndex a : upper) moved[a] -= dx;
  double d = 0.0;
  for (ArcIndex a : lower) d += m.cost(a, moved);
  for (ArcIndex a : upper) d -= m.cost(a, moved);
  return d;
}

namespace detail {

struct GroupDelta {
  ArcIndex leader;
  double d_leader;
  double d_partner;
};

template <SymmetricCostModel M>
std::vector<GroupDelta> group_deltas(const M& m, std::span<const ArcIndex> lower, std::span<const ArcIndex> upper,
                                     double dx) {
  std::vector<GroupDelta> out;
  auto add = [&](ArcIndex a, double d) {
    const ArcIndex lead = group_leader(m, a);
    auto it = std::find_if(out.begin(), out.end(), [lead](const GroupDelta& g) { return g.leader == lead; });
    if (it == out.end()) it = out.insert(out.end(), {lead, 0.0, 0.0});
    (a == lead ? it->d_leader : it->d_partner) += d;
  };
  for (ArcIndex a : lower) add(a, dx);
  for (ArcIndex a : upper) add(a, -dx);
  return out;
}

}  // namespace detail

/// Exact change of the Beckmann objective when `dx` moves from upper to lower.
template <SymmetricCostModel M>
double shift_objective_change(const M& m, std::span<const ArcIndex> lower, std::span<const ArcIndex> upper,
                              std::span<const double> x, double dx) {
  double change = 0.0;
  for (const auto& g : detail::group_deltas(m, lower, upper, dx))
    change += m.group_potential_change(g.leader, x, g.d_leader, g.d_partner);
  return change;
}

struct ShiftResult {
  double delta = 0.0;
  double beckmann_change = 0.0;
  double cost_difference = 0.0;  // upper minus lower before the shift
  bool applied = false;
};

/// One Newton step equalizing the two segment costs. The step is clamped to
/// the origin's smallest flow on the upper segment and halved until the
/// objective does not increase.
template <SymmetricCostModel M>
ShiftResult newton_flow_shift(const M& m, std::span<const ArcIndex> lower, std::span<const ArcIndex> upper,
                              std::span<double> total_flow, std::span<double> origin_flow, bool interaction_aware,
                              double snap_tol = 0.0) {
  ShiftResult r;
  std::span<const double> x(total_flow.data(), total_flow.size());
  double c_lower = 0.0;
  double c_upper = 0.0;
  for (ArcIndex a : lower) c_lower += m.cost(a, x);
  for (ArcIndex a : upper) c_upper += m.cost(a, x);
  r.cost_difference = c_upper - c_lower;
  if (!(r.cost_difference > 0.0)) return r;

  double max_shift = kInf;
  for (ArcIndex a : upper) max_shift = std::min(max_shift, origin_flow[a]);
  if (!(max_shift > 0.0)) return r;

  auto sign = [&](ArcIndex a) {
    if (std::find(lower.begin(), lower.end(), a) != lower.end()) return 1.0;
    if (std::find(upper.begin(), upper.end(), a) != upper.end()) return -1.0;
    return 0.0;
  };
  double denom = 0.0;
  for (auto seg : {lower, upper}) {
    for (ArcIndex a : seg) {
      denom += m.own_derivative(a, x);
      if (!interaction_aware) continue;
      const ArcIndex p = m.partner(a);
      if (p == kNoArc) continue;
      const double s = sign(a) * sign(p);
      if (s != 0.0) denom += s * m.cross_derivative(a, x);
    }
  }
  // A vanishing denominator means the objective is linear along the shift,
  // so the whole clamp is the minimizer.
  double dx = denom > 0.0 ? r.cost_difference / denom : max_shift;
  dx = std::min(dx, max_shift);

  double change = shift_objective_change(m, lower, upper, x, dx);
  for (int halvings = 0; change > 0.0 && halvings < 60; ++halvings) {
    dx *= 0.5;
    change = shift_objective_change(m, lower, upper, x, dx);
  }
  if (change > 0.0 || !(dx > 0.0)) return r;

  for (ArcIndex a : lower) {
    origin_flow[a] += dx;
    total_flow[a] += dx;
  }
  for (ArcIndex a : upper) {
    const double before = origin_flow[a];
    double after = dx == max_shift && before == max_shift ? 0.0 : before - dx;
    if (after <= snap_tol) after = 0.0;
    origin_flow[a] = after;
    total_flow[a] = std::max(0.0, total_flow[a] - (before - after));
  }
  r.delta = dx;
  r.beckmann_change = change;
  r.applied = true;
  return r;
}

/// Shortest-path cost from each demand origin to its destinations over usable arcs.
inline std::vector<ShortestPathTree> shortest_path_trees(const Digraph& g, std::span<const double> costs,
                                                         std::span<const char> usable,
                                                         std::span<const NodeIndex> origins) {
  std::vector<ShortestPathTree> out;
  out.reserve(origins.size());
  for (NodeIndex o : origins)
    out.push_back(dijkstra(
        g, o, [&](ArcIndex a) { return costs[a]; }, [&](ArcIndex a) { return usable[a] != 0; }));
  return out;
}

inline std::vector<NodeIndex> demand_origins(std::span<const Demand> demands) {
  std::vector<NodeIndex> o;
  for (const auto& d : demands)
    if (d.tons > 0.0 && d.origin != d.destination) o.push_back(d.origin);
  std::sort(o.begin(), o.end());
  o.erase(std::unique(o.begin(), o.end()), o.end());
  return o;
}

/// (total experienced cost - total shortest-path cost) / total shortest-path cost.
template <SymmetricCostModel M>
double relative_gap(const Digraph& g, const M& m, std::span<const char> usable, std::span<const Demand> demands,
                    std::span<const double> x) {
  const auto costs = arc_costs(m, x);
  const auto origins = demand_origins(demands);
  const auto trees = shortest_path_trees(g, costs, usable, origins);
  double shortest = 0.0;
  for (const auto& d : demands) {
    if (!(d.tons > 0.0) || d.origin == d.destination) continue;
    const auto i = std::lower_bound(origins.begin(), origins.end(), d.origin) - origins.begin();
    shortest += d.tons * trees[i].dist[d.destination];
  }
  double experienced = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) experienced += x[a] * costs[a];
  if (!(shortest > 0.0)) return 0.0;
  return std::max(0.0, (experienced - shortest) / shortest);
}

/// Successive averages with all-or-nothing loading; a slow but independent
/// reference for the bush solver.
template <SymmetricCostModel M>
FlowState msa_reference(const Digraph& g, const M& m, std::span<const char> usable, std::span<const Demand> demands,
                        int iterations) {
  const auto origins = demand_origins(demands);
  std::vector<double> x(g.num_arcs(), 0.0);
  std::vector<double> y(g.num_arcs());
  for (int k = 1; k <= iterations; ++k) {
    const auto costs = arc_costs(m, x);
    const auto trees = shortest_path_trees(g, costs, usable, origins);
    std::fill(y.begin(), y.end(), 0.0);
    for (const auto& d : demands) {
      if (!(d.tons > 0.0) || d.origin == d.destination) continue;
      const auto i = std::lower_bound(origins.begin(), origins.end(), d.origin) - origins.begin();
      if (!trees[i].reached(d.destination))
        throw InfeasibleError("no usable path for demand", d.origin, d.destination);
      for (ArcIndex a : trees[i].path_to(g, d.destination)) y[a] += d.tons;
    }
    const double step = 1.0 / k;
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += step * (y[a] - x[a]);
  }
  FlowState s{x, arc_costs(m, x), beckmann(m, std::span<const double>(x))};
  return s;
}

/// Origin-based user-equilibrium solver over acyclic bushes.
template <SymmetricCostModel M>
class BushSolver {
 public:
  BushSolver(const Digraph& g, const M& model, std::vector<char> usable, std::vector<Demand> demands,
             SolverOptions opts = {})
      : g_(g), m_(model), usable_(std::move(usable)), demands_(std::move(demands)), opts_(std::move(opts)) {
    if (usable_.size() != g_.num_arcs() || m_.num_arcs() != g_.num_arcs())
      throw ValidationError("BushSolver: arc counts of graph, model and mask differ");
    for (const auto& d : demands_) {
      if (d.tons < 0.0 || !std::isfinite(d.tons)) throw ValidationError("BushSolver: demand must be finite and >= 0");
      if (d.origin < 0 || d.destination < 0 || static_cast<std::size_t>(d.origin) >= g_.num_nodes() ||
          static_cast<std::size_t>(d.destination) >= g_.num_nodes())
        throw ValidationError("BushSolver: demand node out of range");
    }
    flow_.assign(g_.num_arcs(), 0.0);
    cost_ = arc_costs(m_, flow_);
  }

  /// Loads free-flow shortest paths into fresh bushes.
  void initialize() {
    origins_ = demand_origins(demands_);
    bushes_.clear();
    flow_.assign(g_.num_arcs(), 0.0);
    cost_ = arc_costs(m_, flow_);
    scale_.assign(origins_.size(), 0.0);
    for (std::size_t i = 0; i < origins_.size(); ++i) {
      const NodeIndex o = origins_[i];
      const auto tree = dijkstra(
          g_, o, [&](ArcIndex a) { return cost_[a]; }, [&](ArcIndex a) { return usable_[a] != 0; });
      Bush b;
      b.origin = o;
      b.contains.assign(g_.num_arcs(), 0);
      b.flow.assign(g_.num_arcs(), 0.0);
      for (std::size_t v = 0; v < g_.num_nodes(); ++v)
        if (tree.pred[v] != kNoArc) b.contains[tree.pred[v]] = 1;
      for (const auto& d : demands_) {
        if (d.origin != o || !(d.tons > 0.0) || d.destination == o) continue;
        if (!tree.reached(d.destination))
          throw InfeasibleError("no usable path from expanded node " + std::to_string(d.origin) + " to " +
                                    std::to_string(d.destination),
                                d.origin, d.destination);
        for (ArcIndex a : tree.path_to(g_, d.destination)) b.flow[a] += d.tons;
        scale_[i] += d.tons;
      }
      if (!topological_order(g_, b, b.order)) throw std::logic_error("initial bush is cyclic");
      for (std::size_t a = 0; a < g_.num_arcs(); ++a) flow_[a] += b.flow[a];
      bushes_.push_back(std::move(b));
    }
    cost_ = arc_costs(m_, flow_);
    beckmann_ = beckmann(m_, std::span<const double>(flow_));
  }

  GapMetrics solve() {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    initialize();
    GapMetrics gm;
    auto record = [&](int it) {
      gm.relative_gap = relative_gap(g_, m_, usable_, demands_, flow_);
      gm.max_label_spread = max_label_spread();
      gm.beckmann = beckmann(m_, std::span<const double>(flow_));
      gm.iterations = it;
      gm.trace.push_back({it, gm.beckmann, gm.relative_gap, elapsed()});
      return gm.relative_gap <= opts_.tol && gm.max_label_spread <= opts_.tol;
    };
    gm.converged = record(0);
    for (int it = 1; it <= opts_.max_iter && !gm.converged; ++it) {
      for (std::size_t i = 0; i < bushes_.size(); ++i) {
        update_bush(i);
        equilibrate_bush(i);
      }
      gm.converged = record(it);
    }
    gm.seconds = elapsed();
    return gm;
  }

  /// Adds shortcut arcs and drops unused ones for bush `i`.
  void update_bush(std::size_t i) {
    Bush& b = bushes_[i];
    auto labels = shortest_longest_labels(g_, b, cost_);
    for (std::size_t a = 0; a < g_.num_arcs(); ++a) {
      if (!b.contains[a] || b.flow[a] > 0.0) continue;
      if (labels.min_pred[g_.head(static_cast<ArcIndex>(a))] == static_cast<ArcIndex>(a)) continue;
      b.contains[a] = 0;
    }
    refresh_order(b);
    labels = shortest_longest_labels(g_, b, cost_, /*max_over_all_arcs=*/true);
    std::vector<ArcIndex> pending;
    bool added = false;
    for (std::size_t ai = 0; ai < g_.num_arcs(); ++ai) {
      const auto a = static_cast<ArcIndex>(ai);
      if (b.contains[a] || !usable_[a]) continue;
      const NodeIndex u = g_.tail(a);
      const NodeIndex v = g_.head(a);
      if (!(labels.min_cost[u] < kInf) || v == b.origin) continue;
      const double via = labels.min_cost[u] + cost_[a];
      if (!(via < labels.min_cost[v] - improvement_tol(labels.min_cost[v]))) continue;
      if (labels.max_cost[u] + cost_[a] < labels.max_cost[v]) {
        b.contains[a] = 1;
        added = true;
      } else {
        pending.push_back(a);
      }
    }
    if (!added) {
      for (ArcIndex a : pending)
        if (!reaches(b, g_.head(a), g_.tail(a))) b.contains[a] = 1;
    }
    refresh_order(b);
  }

  /// One pass of Newton shifts over the merge nodes of bush `i`.
  void equilibrate_bush(std::size_t i) {
    Bush& b = bushes_[i];
    const auto labels = shortest_longest_labels(g_, b, cost_);
    const double snap = 1e-13 * scale_[i];
    for (auto it = b.order.rbegin(); it != b.order.rend(); ++it) {
      const auto seg = divergent_segments(g_, labels, *it);
      if (!seg) continue;
      const auto r = newton_flow_shift(m_, seg->lower, seg->upper, std::span<double>(flow_),
                                       std::span<double>(b.flow), opts_.interaction_newton, snap);
      if (!r.applied) continue;
      refresh_costs(seg->lower);
      refresh_costs(seg->upper);
      beckmann_ += r.beckmann_change;
      if (opts_.on_shift) opts_.on_shift({i, *it, r.delta, r.beckmann_change, flow_});
    }
  }

  /// Largest relative spread between max and min path cost over loaded nodes.
  double max_label_spread() const {
    double worst = 0.0;
    for (const auto& b : bushes_) {
      const auto l = shortest_longest_labels(g_, b, cost_);
      for (NodeIndex v : b.order) {
        if (v == b.origin || l.max_pred[v] == kNoArc) continue;
        const double spread = l.max_cost[v] - l.min_cost[v];
        worst = std::max(worst, l.min_cost[v] > 0.0 ? spread / l.min_cost[v] : (spread > 1e-12 ? kInf : 0.0));
      }
    }
    return worst;
  }

  /// Largest absolute flow-conservation residual over all bushes and nodes.
  double max_conservation_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < bushes_.size(); ++i) {
      const auto& b = bushes_[i];
      std::vector<double> net(g_.num_nodes(), 0.0);
      for (std::size_t a = 0; a < g_.num_arcs(); ++a) {
        net[g_.tail(static_cast<ArcIndex>(a))] -= b.flow[a];
        net[g_.head(static_cast<ArcIndex>(a))] += b.flow[a];
      }
      for (const auto& d : demands_)
        if (d.origin == b.origin && d.tons > 0.0 && d.destination != d.origin) {
          net[d.destination] -= d.tons;
          net[d.origin] += d.tons;
        }
      for (double v : net) worst = std::max(worst, std::abs(v));
    }
    return worst;
  }

  FlowState state() const { return {flow_, cost_, beckmann(m_, std::span<const double>(flow_))}; }
  const std::vector<double>& flows() const { return flow_; }
  const std::vector<double>& costs() const { return cost_; }
  const std::vector<Bush>& bushes() const { return bushes_; }
  const Digraph& graph() const { return g_; }
  double tracked_beckmann() const { return beckmann_; }

 private:
  static double improvement_tol(double label) { return 1e-12 * std::max(1.0, std::abs(label)); }

  void refresh_order(Bush& b) const {
    if (!topological_order(g_, b, b.order)) throw std::logic_error("bush update created a cycle");
  }

  void refresh_costs(std::span<const ArcIndex> arcs) {
    for (ArcIndex a : arcs) {
      cost_[a] = m_.cost(a, flow_);
      if (const ArcIndex p = m_.partner(a); p != kNoArc) cost_[p] = m_.cost(p, flow_);
    }
  }

  bool reaches(const Bush& b, NodeIndex from, NodeIndex to) const {
    std::vector<char> seen(g_.num_nodes(), 0);
    std::vector<NodeIndex> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      const NodeIndex u = stack.back();
      stack.pop_back();
      if (u == to) return true;
      for (ArcIndex a : g_.out_arcs(u))
        if (b.contains[a] && !seen[g_.head(a)]) {
          seen[g_.head(a)] = 1;
          stack.push_back(g_.head(a));
        }
    }
    return false;
  }

  const Digraph& g_;
  const M& m_;
  std::vector<char> usable_;
  std::vector<Demand> demands_;
  SolverOptions opts_;
  std::vector<NodeIndex> origins_;
  std::vector<Bush> bushes_;
  std::vector<double> scale_;
  std::vector<double> flow_;
  std::vector<double> cost_;
  double beckmann_ = 0.0;
};

struct EquilibriumResult {
  FlowState state;
  GapMetrics metrics;
};

template <SymmetricCostModel M>
EquilibriumResult solve_equilibrium(const Digraph& g, const M& model, std::span<const char> usable,
                                    std::vector<Demand> demands, SolverOptions opts = {}) {
  BushSolver<M> solver(g, model, std::vector<char>(usable.begin(), usable.end()), std::move(demands), std::move(opts));
  auto metrics = solver.solve();
  return {solver.state(), std::move(metrics)};
}

}  // namespace railelec
