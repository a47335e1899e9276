// Writes a seeded 20-node synthetic scenario (nodes, links, OD) to a directory.
//   make_synthetic <out-dir> [seed]

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>
#include <string>

#include "railelec/geo.hpp"
#include "railelec/io.hpp"

using namespace railelec;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic <out-dir> [seed]\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::mt19937_64 rng(argc > 2 ? std::stoull(argv[2]) : 2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::filesystem::create_directories(dir);

  // 4 x 5 jittered grid about 1.5 degrees apart.
  constexpr int rows = 4, cols = 5;
  std::vector<Node> nodes;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      Node n;
      n.id = 1 + r * cols + c;
      n.lat = 34.0 + 1.5 * r + 0.4 * (u01(rng) - 0.5);
      n.lon = -100.0 + 1.5 * c + 0.4 * (u01(rng) - 0.5);
      n.is_yard = (r + c) % 2 == 0 || u01(rng) < 0.15;
      nodes.push_back(n);
    }

  std::vector<PhysicalLink> links;
  long next = 1;
  auto connect = [&](int a, int b) {
    const auto& na = nodes[a];
    const auto& nb = nodes[b];
    const double km = geo::haversine_km(na.lat, na.lon, nb.lat, nb.lon) * (1.05 + 0.35 * u01(rng));
    const double grade = 0.012 * (u01(rng) - 0.5);
    const double capacity = 30000.0 + 30000.0 * u01(rng);
    const int signal = static_cast<int>(3.0 * u01(rng));
    const bool candidate = u01(rng) > 0.1;
    for (int dir = 0; dir < 2; ++dir) {
      PhysicalLink l;
      l.id = next++;
      l.tail = dir == 0 ? na.id : nb.id;
      l.head = dir == 0 ? nb.id : na.id;
      l.length_km = km;
      l.grade = dir == 0 ? grade : -grade;
      l.capacity_tpd = capacity;
      l.signal_class = signal;
      l.candidate = candidate;
      links.push_back(l);
    }
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      if (c + 1 < cols) connect(i, i + 1);
      if (r + 1 < rows) connect(i, i + cols);
      if (r + 1 < rows && c + 1 < cols && u01(rng) < 0.25) connect(i, i + cols + 1);
    }

  std::vector<OdDemand> od;
  std::set<std::pair<long, long>> seen;
  std::uniform_int_distribution<int> pick(0, rows * cols - 1);
  while (od.size() < 30) {
    const long o = nodes[pick(rng)].id, d = nodes[pick(rng)].id;
    if (o == d || !seen.insert({o, d}).second) continue;
    od.push_back({o, d, std::round(2000.0 + 10000.0 * u01(rng))});
  }

  io::write_nodes(dir / "nodes.csv", nodes);
  io::write_links(dir / "links.csv", links);
  io::write_od(dir / "od.csv", od);
  std::cout << "wrote " << nodes.size() << " nodes, " << links.size() << " links, " << od.size() << " OD pairs to "
            << dir << "\n";
  return 0;
}
