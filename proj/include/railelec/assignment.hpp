#pragma once

#include <span>
#include <string>
#include <vector>

#include "railelec/arc_costs.hpp"
#include "railelec/costmodel.hpp"
#include "railelec/equilibrium.hpp"
#include "railelec/network.hpp"

namespace railelec {

/// Origin-destination demand in physical node ids.
struct OdDemand {
  long origin = 0;
  long destination = 0;
  double tons_per_day = 0.0;
};

/// Everything the lower level needs, built once per scenario and shared by
/// every design evaluation.
struct AssignmentInstance {
  const RailNetwork* network = nullptr;
  ExpandedNetwork expanded;
  std::vector<LinkCostProfile> profiles;
  RailArcCosts costs;
  std::vector<Demand> demands;
  double tons_per_train = 1.0;
};

inline std::vector<Demand> expand_demands(const RailNetwork& net, const ExpandedNetwork& x, std::span<const OdDemand> od,
                                          double multiplier = 1.0) {
  std::vector<Demand> out;
  out.reserve(od.size());
  for (const auto& d : od) {
    if (!(d.tons_per_day >= 0.0) || !std::isfinite(d.tons_per_day))
      throw ValidationError("demand " + std::to_string(d.origin) + "->" + std::to_string(d.destination) +
                            " must be finite and >= 0");
    if (!net.has_node(d.origin) || !net.has_node(d.destination))
      throw ValidationError("demand " + std::to_string(d.origin) + "->" + std::to_string(d.destination) +
                            " references an unknown node");
    if (d.origin == d.destination || d.tons_per_day == 0.0) continue;
    out.push_back({x.ports[net.node_index(d.origin)].source, x.ports[net.node_index(d.destination)].sink,
                   d.tons_per_day * multiplier});
  }
  return out;
}

inline AssignmentInstance build_assignment(const RailNetwork& net, const TrainConsist& consist, const RateTable& rates,
                                           std::span<const OdDemand> od, double demand_multiplier = 1.0) {
  consist.validate();
  rates.validate();
  const SwitchingParams sw{switching_cost_per_train(rates, consist), consist.cargo_per_train_t()};
  auto x = expand(net, sw);
  auto profiles = link_cost_profiles(net, consist, rates);
  auto costs = RailArcCosts::from_network(x, profiles, rates.beta);
  auto demands = expand_demands(net, x, od, demand_multiplier);
  return {&net, std::move(x), std::move(profiles), std::move(costs), std::move(demands), consist.cargo_per_train_t()};
}

/// Equilibrium under one electrification mask (per physical link). Infeasible
/// demand is reported with physical node ids.
inline EquilibriumResult assign(const AssignmentInstance& inst, std::span<const char> electrified_links,
                                SolverOptions opts = {}) {
  const auto usable = apply_design(inst.expanded, electrified_links);
  try {
    return solve_equilibrium(inst.expanded.graph, inst.costs, usable, inst.demands, std::move(opts));
  } catch (const InfeasibleError& e) {
    const auto& nodes = inst.network->nodes();
    const long o = nodes[inst.expanded.nodes[e.origin()].physical_node].id;
    const long d = nodes[inst.expanded.nodes[e.destination()].physical_node].id;
    throw InfeasibleError("no usable route for demand " + std::to_string(o) + "->" + std::to_string(d), o, d);
  }
}

inline std::vector<char> no_electrification(const AssignmentInstance& inst) {
  return std::vector<char>(inst.expanded.num_links(), 0);
}

/// Tonnage-km carried on electric arcs over all traction tonnage-km, 0 when idle.
inline double electrified_tonnage_share(const RailNetwork& net, const ExpandedNetwork& x, std::span<const double> flows) {
  double electric = 0.0, total = 0.0;
  for (std::size_t i = 0; i < x.num_links(); ++i) {
    const double km = net.links()[i].length_km;
    electric += flows[x.pairs[i].electric] * km;
    total += (flows[x.pairs[i].electric] + flows[x.pairs[i].diesel]) * km;
  }
  return total > 0.0 ? electric / total : 0.0;
}

}  // namespace railelec
