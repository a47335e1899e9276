#pragma once

// Small hand-built and seeded random networks shared by the test suites.

#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "railelec/assignment.hpp"
#include "railelec/network.hpp"

namespace railelec::testing {

inline Node node(long id, double lat, double lon, bool yard = false) {
  Node n;
  n.id = id;
  n.lat = lat;
  n.lon = lon;
  n.is_yard = yard;
  return n;
}

inline PhysicalLink link(long id, long tail, long head, double length_km, double capacity = 1000.0,
                         bool candidate = true, double grade = 0.0) {
  PhysicalLink l;
  l.id = id;
  l.tail = tail;
  l.head = head;
  l.length_km = length_km;
  l.capacity_tpd = capacity;
  l.candidate = candidate;
  l.grade = grade;
  l.curve_radius_m = kInf;
  return l;
}

/// Roughly 0.9 degrees of latitude spacing, about 100 km.
inline double lat_of_row(int r) { return 30.0 + 0.9 * r; }
inline double lon_of_col(int c) { return -95.0 + 1.0 * c; }

/// rows x cols grid, links in both directions between 4-neighbours.
inline RailNetwork grid_network(int rows, int cols, const std::set<long>& yards, double capacity = 1000.0) {
  std::vector<Node> nodes;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const long id = r * cols + c;
      nodes.push_back(node(id, lat_of_row(r), lon_of_col(c), yards.count(id) > 0));
    }
  std::vector<PhysicalLink> links;
  long next = 0;
  auto connect = [&](long a, long b) {
    const double d = geo::haversine_km(nodes[a].lat, nodes[a].lon, nodes[b].lat, nodes[b].lon);
    links.push_back(link(next++, a, b, d * 1.1, capacity));
    links.push_back(link(next++, b, a, d * 1.1, capacity));
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const long id = r * cols + c;
      if (c + 1 < cols) connect(id, id + 1);
      if (r + 1 < rows) connect(id, id + cols);
    }
  return RailNetwork(std::move(nodes), std::move(links));
}

/// Seeded random connected network: a random spanning path plus chords, every
/// link present in both directions. `links_budget` caps the directed link count.
inline RailNetwork random_network(std::mt19937_64& rng, int num_nodes, int links_budget, double yard_fraction = 0.4) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Node> nodes;
  for (int i = 0; i < num_nodes; ++i)
    nodes.push_back(node(i, 30.0 + 5.0 * u01(rng), -100.0 + 5.0 * u01(rng), u01(rng) < yard_fraction));
  nodes[0].is_yard = true;
  nodes[num_nodes - 1].is_yard = true;
  std::vector<PhysicalLink> links;
  std::set<std::pair<int, int>> used;
  long next = 0;
  auto connect = [&](int a, int b) {
    if (a == b || used.count({std::min(a, b), std::max(a, b)})) return;
    if (static_cast<int>(links.size()) + 2 > links_budget) return;
    used.insert({std::min(a, b), std::max(a, b)});
    const double d = geo::haversine_km(nodes[a].lat, nodes[a].lon, nodes[b].lat, nodes[b].lon);
    const double len = std::max(1.0, d) * (1.0 + 0.5 * u01(rng));
    const double cap = 500.0 + 1500.0 * u01(rng);
    const double grade = 0.01 * (u01(rng) - 0.5);
    links.push_back(link(next++, a, b, len, cap, true, grade));
    links.push_back(link(next++, b, a, len, cap, true, -grade));
  };
  for (int i = 0; i + 1 < num_nodes; ++i) connect(i, i + 1);
  std::uniform_int_distribution<int> pick(0, num_nodes - 1);
  for (int tries = 0; tries < 4 * num_nodes; ++tries) connect(pick(rng), pick(rng));
  return RailNetwork(std::move(nodes), std::move(links));
}

struct ToyScenario {
  RailNetwork net;
  std::vector<OdDemand> od;
};

/// Random network plus yard-heavy random demand; alphas assigned.
inline ToyScenario toy_scenario(std::mt19937_64& rng, int num_nodes, int links_budget, int od_pairs, double tons,
                                double yard_fraction = 0.4) {
  ToyScenario s{random_network(rng, num_nodes, links_budget, yard_fraction), {}};
  assign_alphas(s.net);
  std::uniform_int_distribution<int> pick(0, num_nodes - 1);
  std::uniform_real_distribution<double> amount(0.3 * tons, tons);
  while (static_cast<int>(s.od.size()) < od_pairs) {
    const int o = pick(rng), d = pick(rng);
    if (o != d) s.od.push_back({s.net.nodes()[o].id, s.net.nodes()[d].id, amount(rng)});
  }
  return s;
}

}  // namespace railelec::testing
