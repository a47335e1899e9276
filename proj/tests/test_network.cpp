#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "railelec/network.hpp"

using namespace railelec;
using railelec::testing::link;
using railelec::testing::node;

namespace {

// Spherical law of cosines: an independent great-circle formula.
double great_circle_cosines(double lat1, double lon1, double lat2, double lon2) {
  const double k = std::numbers::pi / 180.0;
  const double c = std::sin(lat1 * k) * std::sin(lat2 * k) +
                   std::cos(lat1 * k) * std::cos(lat2 * k) * std::cos((lon2 - lon1) * k);
  return 6371.0 * std::acos(std::clamp(c, -1.0, 1.0));
}

// Walks every simple path from `from` to `to` and reports whether one uses
// only arcs of the given kind plus connectors.
bool has_single_mode_path(const ExpandedNetwork& x, NodeIndex from, NodeIndex to, ArcKind mode) {
  std::vector<NodeIndex> stack{from};
  std::vector<char> seen(x.graph.num_nodes(), 0);
  seen[from] = 1;
  while (!stack.empty()) {
    const NodeIndex u = stack.back();
    stack.pop_back();
    if (u == to) return true;
    for (ArcIndex a : x.graph.out_arcs(u)) {
      const auto k = x.arcs[a].kind;
      if (k != mode && k != ArcKind::Connector) continue;
      const NodeIndex v = x.graph.head(a);
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return false;
}

}  // namespace

TEST(ComputeAlpha, StraightTrackIsOne) {
  const auto a = node(1, 30.0, -95.0);
  const auto b = node(2, 30.9, -95.0);
  const double gc = great_circle_cosines(a.lat, a.lon, b.lat, b.lon);
  const auto r = compute_alpha(link(1, 1, 2, gc), a, b);
  EXPECT_NEAR(r.alpha, 1.0, 1e-9);
  EXPECT_FALSE(r.degenerate);
}

TEST(ComputeAlpha, RatioAgainstIndependentGreatCircle) {
  const auto a = node(1, 41.0, -87.0);
  const auto b = node(2, 41.5, -88.1);
  const double gc = great_circle_cosines(a.lat, a.lon, b.lat, b.lon);
  const auto r = compute_alpha(link(1, 1, 2, 1.2 * gc), a, b);
  EXPECT_NEAR(r.alpha, 1.2, 1e-9);
  EXPECT_NEAR(r.straight_line_km, gc, 1e-6);
}

TEST(ComputeAlpha, ShorterThanChordClampsToOne) {
  const auto a = node(1, 41.0, -87.0);
  const auto b = node(2, 41.5, -88.1);
  const double gc = great_circle_cosines(a.lat, a.lon, b.lat, b.lon);
  EXPECT_DOUBLE_EQ(compute_alpha(link(1, 1, 2, 0.99 * gc), a, b).alpha, 1.0);
}

TEST(ComputeAlpha, CoincidentEndpointsTakeNetworkMaximum) {
  RailNetwork net({node(1, 30, -95), node(2, 31, -95), node(3, 31, -95)},
                  {link(10, 1, 2, 200.0), link(11, 2, 3, 5.0)});
  const auto warnings = assign_alphas(net);
  ASSERT_EQ(warnings.size(), 1u);
  const double expected = 200.0 / geo::haversine_km(30, -95, 31, -95);
  EXPECT_NEAR(net.links()[0].alpha, expected, 1e-12);
  EXPECT_DOUBLE_EQ(net.links()[1].alpha, expected);
  for (const auto& l : net.links()) EXPECT_GE(l.alpha, 1.0);
}

TEST(RailNetwork, RejectsDuplicateAndDanglingIds) {
  EXPECT_THROW(RailNetwork({node(1, 0, 0), node(1, 0, 1)}, {}), ValidationError);
  EXPECT_THROW(RailNetwork({node(1, 0, 0), node(2, 0, 1)}, {link(5, 1, 2, 1), link(5, 2, 1, 1)}), ValidationError);
  EXPECT_THROW(RailNetwork({node(1, 0, 0)}, {link(5, 1, 9, 1)}), ValidationError);
}

TEST(RailNetwork, NonYardWithFiniteSwitchCostRejected) {
  auto n = node(1, 0, 0, false);
  n.switching_cost = 100.0;
  EXPECT_THROW(RailNetwork({n}, {}), ValidationError);
}

TEST(Expand, TwoYardsOneLink) {
  RailNetwork net({node(1, 30, -95, true), node(2, 31, -95, true)}, {link(7, 1, 2, 120.0)});
  const auto x = expand(net, {3800.0, 3800.0});
  EXPECT_EQ(x.count(ArcKind::DieselTraction), 1u);
  EXPECT_EQ(x.count(ArcKind::ElectricTraction), 1u);
  EXPECT_EQ(x.count(ArcKind::Switch), 4u);  // two crossings per yard
  const auto& pair = x.pairs[0];
  EXPECT_EQ(x.arcs[pair.diesel].partner, pair.electric);
  EXPECT_EQ(x.arcs[pair.electric].partner, pair.diesel);
  for (const auto& a : x.arcs)
    if (a.kind == ArcKind::Switch) {
      EXPECT_DOUBLE_EQ(a.fixed_cost, 1.0);
      EXPECT_FALSE(a.physical_link.has_value());
      EXPECT_EQ(a.partner, kNoArc);
    }
  const NodeIndex from = x.ports[0].source;
  const NodeIndex to = x.ports[1].sink;
  EXPECT_TRUE(has_single_mode_path(x, from, to, ArcKind::DieselTraction));
  EXPECT_TRUE(has_single_mode_path(x, from, to, ArcKind::ElectricTraction));
}

TEST(Expand, NoYardsNoSwitchArcs) {
  RailNetwork net({node(1, 30, -95), node(2, 31, -95)}, {link(7, 1, 2, 120.0)});
  const auto x = expand(net, {});
  EXPECT_EQ(x.count(ArcKind::DieselTraction) + x.count(ArcKind::ElectricTraction), 2u);
  EXPECT_EQ(x.count(ArcKind::Switch), 0u);
}

TEST(Expand, YardSpecificSwitchCostOverridesDefault) {
  auto y = node(1, 30, -95, true);
  y.switching_cost = 7600.0;
  RailNetwork net({y, node(2, 31, -95, true)}, {link(7, 1, 2, 120.0)});
  const auto x = expand(net, {3800.0, 100.0});
  for (const auto& a : x.arcs)
    if (a.kind == ArcKind::Switch) {
      EXPECT_DOUBLE_EQ(a.fixed_cost, *a.yard == 0 ? 76.0 : 38.0);
    }
}

TEST(Expand, ManyYardsEachGetSwitchArcs) {
  // Sized like the continental network's count of switching-capable nodes.
  std::vector<Node> nodes;
  std::vector<PhysicalLink> links;
  for (long i = 0; i < 600; ++i) nodes.push_back(node(i, 30.0 + 0.01 * i, -95.0, i < 461));
  for (long i = 0; i + 1 < 600; ++i) links.push_back(link(i, i, i + 1, 2.0));
  const auto x = expand(RailNetwork(nodes, links), {});
  EXPECT_EQ(x.yards.size(), 461u);
  EXPECT_EQ(x.count(ArcKind::Switch), 2u * 461u);
}

TEST(ApplyDesign, MasksFollowElectrifiedLinks) {
  std::vector<Node> nodes;
  std::vector<PhysicalLink> links;
  for (long i = 0; i < 10; ++i) nodes.push_back(node(i, 30.0 + 0.5 * i, -95.0, i % 3 == 0));
  for (long i = 0; i < 9; ++i) links.push_back(link(i, i, i + 1, 60.0));
  const auto x = expand(RailNetwork(nodes, links), {});

  std::vector<char> none(9, 0), all(9, 1), some(9, 0);
  some[3] = some[7] = 1;
  const auto m0 = apply_design(x, none);
  const auto m1 = apply_design(x, all);
  const auto m2 = apply_design(x, some);
  for (const auto& a : x.arcs) {
    const bool electric = a.kind == ArcKind::ElectricTraction;
    EXPECT_EQ(m0[a.id] != 0, !electric);
    EXPECT_TRUE(m1[a.id]);
    if (electric) EXPECT_EQ(m2[a.id] != 0, *a.physical_link == 3 || *a.physical_link == 7);
    else EXPECT_TRUE(m2[a.id]);
  }
  EXPECT_THROW(apply_design(x, std::vector<char>(8, 0)), ValidationError);
}

TEST(ApplyDesign, NonCandidateCannotBeElectrified) {
  RailNetwork net({node(1, 30, -95), node(2, 31, -95)}, {link(7, 1, 2, 120.0, 1000.0, false)});
  const auto x = expand(net, {});
  EXPECT_THROW(apply_design(x, std::vector<char>{1}), ValidationError);
}

TEST(NetworkProperties, ExpansionSizeMonotoneMasksAndAggregation) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    auto net = railelec::testing::random_network(rng, 6 + trial % 10, 60);
    const auto x = expand(net, {});
    const std::size_t links = net.links().size();
    EXPECT_EQ(x.count(ArcKind::DieselTraction) + x.count(ArcKind::ElectricTraction), 2 * links);
    EXPECT_EQ(x.count(ArcKind::Switch), 2 * net.yards().size());
    for (const auto& a : x.arcs)
      if (a.kind == ArcKind::Switch) {
        EXPECT_TRUE(net.nodes()[*a.yard].is_yard);
      }

    std::bernoulli_distribution coin(0.4);
    std::vector<char> small(links), large(links);
    for (std::size_t i = 0; i < links; ++i) {
      small[i] = coin(rng);
      large[i] = small[i] || coin(rng);
    }
    const auto ms = apply_design(x, small);
    const auto ml = apply_design(x, large);
    for (std::size_t a = 0; a < ms.size(); ++a)
      if (ms[a]) {
        EXPECT_TRUE(ml[a]);
      }

    std::uniform_real_distribution<double> flow(0.0, 100.0);
    std::vector<double> arc_flows(x.arcs.size());
    for (auto& f : arc_flows) f = flow(rng);
    const auto phys = aggregate(x, arc_flows);
    for (std::size_t i = 0; i < links; ++i) {
      EXPECT_EQ(phys.diesel[i], arc_flows[x.pairs[i].diesel]);
      EXPECT_EQ(phys.electric[i], arc_flows[x.pairs[i].electric]);
      EXPECT_EQ(phys.total[i], phys.diesel[i] + phys.electric[i]);
    }

    assign_alphas(net);
    for (const auto& l : net.links()) EXPECT_GE(l.alpha, 1.0);
  }
}
