#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "railelec/assignment.hpp"
#include "railelec/corridors.hpp"
#include "railelec/costmodel.hpp"
#include "railelec/csv.hpp"
#include "railelec/design.hpp"
#include "railelec/equilibrium.hpp"
#include "railelec/error.hpp"
#include "railelec/network.hpp"

namespace railelec::io {

namespace fs = std::filesystem;

// ---- network ----

inline std::vector<Node> load_nodes(const fs::path& path) {
  const auto t = csv::Table::read(path.string());
  t.require({"id", "lat", "lon", "is_yard", "switching_cost"});
  std::vector<Node> nodes;
  for (std::size_t r = 0; r < t.size(); ++r) {
    Node n;
    n.id = t.integer(r, "id");
    n.lat = t.number(r, "lat");
    n.lon = t.number(r, "lon");
    n.is_yard = t.boolean(r, "is_yard");
    if (auto s = t.optional(r, "switching_cost")) n.switching_cost = csv::parse_double(*s, t.where(r, "switching_cost"));
    if (!(std::abs(n.lat) <= 90.0 && std::abs(n.lon) <= 180.0))
      throw ValidationError(t.where(r, "lat") + ": coordinates out of range");
    nodes.push_back(n);
  }
  return nodes;
}

inline std::vector<PhysicalLink> load_links(const fs::path& path) {
  const auto t = csv::Table::read(path.string());
  t.require({"id", "tail", "head", "length_km", "grade", "curve_radius_m", "capacity_tpd", "signal_class", "candidate"});
  std::vector<PhysicalLink> links;
  for (std::size_t r = 0; r < t.size(); ++r) {
    PhysicalLink l;
    l.id = t.integer(r, "id");
    l.tail = t.integer(r, "tail");
    l.head = t.integer(r, "head");
    l.length_km = t.number(r, "length_km");
    l.grade = t.number(r, "grade");
    l.curve_radius_m = t.optional(r, "curve_radius_m") ? t.number(r, "curve_radius_m") : 0.0;
    if (l.curve_radius_m < 0.0) throw ValidationError(t.where(r, "curve_radius_m") + ": must be >= 0");
    l.capacity_tpd = t.number(r, "capacity_tpd");
    l.signal_class = static_cast<int>(t.integer(r, "signal_class"));
    l.candidate = t.boolean(r, "candidate");
    auto opt = [&](const char* col) -> std::optional<double> {
      if (auto s = t.optional(r, col)) return csv::parse_double(*s, t.where(r, col));
      return std::nullopt;
    };
    l.desired_speed_mps = opt("desired_speed_mps");
    l.k_f = opt("k_f");
    l.k_a = opt("k_a");
    links.push_back(l);
  }
  return links;
}

struct NetworkLoad {
  RailNetwork network;
  std::vector<std::string> warnings;
};

/// Nodes plus links, validated, with circuity factors assigned.
inline NetworkLoad load_network(const fs::path& nodes, const fs::path& links) {
  NetworkLoad out{RailNetwork(load_nodes(nodes), load_links(links)), {}};
  out.warnings = assign_alphas(out.network);
  return out;
}

inline void write_nodes(const fs::path& path, const std::vector<Node>& nodes) {
  csv::Writer w(path.string());
  w.row("id", "lat", "lon", "is_yard", "switching_cost");
  for (const auto& n : nodes)
    w.row(n.id, n.lat, n.lon, n.is_yard ? 1 : 0, n.switching_cost ? csv::format_double(*n.switching_cost) : "");
}

inline void write_links(const fs::path& path, const std::vector<PhysicalLink>& links) {
  csv::Writer w(path.string());
  w.row("id", "tail", "head", "length_km", "grade", "curve_radius_m", "capacity_tpd", "signal_class", "candidate",
        "desired_speed_mps", "k_f", "k_a");
  auto opt = [](const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); };
  for (const auto& l : links)
    w.row(l.id, l.tail, l.head, l.length_km, l.grade, l.curve_radius_m, l.capacity_tpd, l.signal_class,
          l.candidate ? 1 : 0, opt(l.desired_speed_mps), opt(l.k_f), opt(l.k_a));
}

// ---- demand ----

inline std::vector<OdDemand> load_od(const fs::path& path) {
  const auto t = csv::Table::read(path.string());
  t.require({"origin", "destination", "tons_per_day"});
  std::vector<OdDemand> od;
  for (std::size_t r = 0; r < t.size(); ++r) {
    OdDemand d{t.integer(r, "origin"), t.integer(r, "destination"), t.number(r, "tons_per_day")};
    if (!(d.tons_per_day >= 0.0) || !std::isfinite(d.tons_per_day))
      throw ValidationError(t.where(r, "tons_per_day") + ": must be finite and >= 0");
    od.push_back(d);
  }
  return od;
}

inline void write_od(const fs::path& path, const std::vector<OdDemand>& od) {
  csv::Writer w(path.string());
  w.row("origin", "destination", "tons_per_day");
  for (const auto& d : od) w.row(d.origin, d.destination, d.tons_per_day);
}

// ---- expanded network and costs ----

inline const char* role_name(NodeRole r) {
  switch (r) {
    case NodeRole::Diesel: return "diesel";
    case NodeRole::Electric: return "electric";
    case NodeRole::Source: return "source";
    case NodeRole::Sink: return "sink";
  }
  return "?";
}

inline void write_expanded(const fs::path& path, const RailNetwork& net, const ExpandedNetwork& x) {
  csv::Writer w(path.string());
  w.row("arc_id", "kind", "tail_node", "tail_role", "head_node", "head_role", "physical_link", "partner",
        "fixed_cost_per_ton");
  for (const auto& a : x.arcs) {
    const auto& t = x.nodes[x.graph.tail(a.id)];
    const auto& h = x.nodes[x.graph.head(a.id)];
    w.row(a.id, to_string(a.kind), net.nodes()[t.physical_node].id, role_name(t.role), net.nodes()[h.physical_node].id,
          role_name(h.role), a.physical_link ? std::to_string(net.links()[*a.physical_link].id) : "",
          a.partner == kNoArc ? std::string() : std::to_string(a.partner), a.fixed_cost);
  }
}

inline void write_profiles(const fs::path& path, const RailNetwork& net, const std::vector<LinkCostProfile>& profiles,
                           const std::vector<double>& electrification) {
  csv::Writer w(path.string());
  w.row("link_id", "diesel_power_w", "diesel_speed_mps", "diesel_t0_hr", "diesel_fuel_cost_per_ton",
        "electric_power_w", "electric_speed_mps", "electric_t0_hr", "electric_fuel_cost_per_ton", "congestion_t0_hr",
        "congestion_cost_per_ton", "capacity_tpd", "electrification_cost_usd");
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    w.row(net.links()[i].id, p.diesel.power_w, p.diesel.speed_mps, p.diesel.t0_hr, p.diesel.fuel_cost_per_ton,
          p.electric.power_w, p.electric.speed_mps, p.electric.t0_hr, p.electric.fuel_cost_per_ton, p.congestion_t0_hr,
          p.congestion_cost_per_ton, p.capacity_tpd, electrification[i]);
  }
}

// ---- assignment output ----

struct ArcFlowRow {
  std::size_t arc_id = 0;
  std::string kind;
  std::optional<long> physical_link;
  double flow_tpd = 0.0;
  double cost_per_ton = 0.0;
};

inline void write_flows(const fs::path& path, const RailNetwork& net, const ExpandedNetwork& x, const FlowState& s) {
  csv::Writer w(path.string());
  w.row("arc_id", "kind", "physical_link", "flow_tpd", "cost_per_ton");
  for (const auto& a : x.arcs)
    w.row(a.id, to_string(a.kind), a.physical_link ? std::to_string(net.links()[*a.physical_link].id) : "",
          s.flow[a.id], s.cost[a.id]);
}

inline std::vector<ArcFlowRow> load_flows(const fs::path& path) {
  const auto t = csv::Table::read(path.string());
  t.require({"arc_id", "kind", "physical_link", "flow_tpd", "cost_per_ton"});
  std::vector<ArcFlowRow> rows;
  for (std::size_t r = 0; r < t.size(); ++r) {
    ArcFlowRow row;
    row.arc_id = static_cast<std::size_t>(t.integer(r, "arc_id"));
    row.kind = t.at(r, "kind");
    if (auto l = t.optional(r, "physical_link")) row.physical_link = csv::parse_long(*l, t.where(r, "physical_link"));
    row.flow_tpd = t.number(r, "flow_tpd");
    row.cost_per_ton = t.number(r, "cost_per_ton");
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_gap_trace(const fs::path& path, const GapMetrics& m) {
  csv::Writer w(path.string());
  w.row("iteration", "beckmann", "relative_gap", "seconds");
  for (const auto& g : m.trace) w.row(g.iteration, g.beckmann, g.relative_gap, g.seconds);
}

// ---- corridors and designs ----

inline void write_corridors(const fs::path& path, const RailNetwork& net, const std::vector<Corridor>& corridors,
                            const Genome* only = nullptr) {
  csv::Writer w(path.string());
  w.row("corridor_id", "yard_a", "yard_b", "length_km", "cost_usd", "link_ids");
  for (std::size_t i = 0; i < corridors.size(); ++i) {
    if (only && !(*only)[i]) continue;
    const auto& c = corridors[i];
    std::string ids;
    for (auto l : c.links) ids += (ids.empty() ? "" : ";") + std::to_string(net.links()[l].id);
    w.row(c.id, c.yard_a, c.yard_b, c.length_km, c.cost, ids);
  }
}

/// Corridors by link id; costs come from the file.
inline std::vector<Corridor> load_corridors(const fs::path& path, const RailNetwork& net) {
  const auto t = csv::Table::read(path.string());
  t.require({"corridor_id", "yard_a", "yard_b", "length_km", "cost_usd", "link_ids"});
  std::vector<Corridor> out;
  std::set<std::size_t> ids;
  for (std::size_t r = 0; r < t.size(); ++r) {
    Corridor c;
    c.id = static_cast<std::size_t>(t.integer(r, "corridor_id"));
    if (!ids.insert(c.id).second) throw ValidationError(t.where(r, "corridor_id") + ": duplicate corridor id");
    c.yard_a = t.integer(r, "yard_a");
    c.yard_b = t.integer(r, "yard_b");
    c.length_km = t.number(r, "length_km");
    c.cost = t.number(r, "cost_usd");
    for (const auto& f : csv::split(t.at(r, "link_ids"), ';')) {
      const long id = csv::parse_long(f, t.where(r, "link_ids"));
      if (!net.has_link(id)) throw ValidationError(t.where(r, "link_ids") + ": unknown link " + std::to_string(id));
      c.links.push_back(net.link_index(id));
      if (!net.links()[c.links.back()].candidate)
        throw ValidationError(t.where(r, "link_ids") + ": link " + std::to_string(id) + " is not a candidate");
    }
    if (c.links.empty()) throw ValidationError(t.where(r, "link_ids") + ": corridor has no links");
    out.push_back(std::move(c));
  }
  return out;
}

/// Genome from a design file listing selected corridor ids.
inline Genome load_design(const fs::path& path, const CorridorCatalog& cat) {
  const auto t = csv::Table::read(path.string());
  t.require({"corridor_id"});
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < cat.size(); ++i) pos[cat[i].id] = i;
  Genome g(cat.size(), 0);
  for (std::size_t r = 0; r < t.size(); ++r) {
    const auto id = static_cast<std::size_t>(t.integer(r, "corridor_id"));
    auto it = pos.find(id);
    if (it == pos.end()) throw ValidationError(t.where(r, "corridor_id") + ": unknown corridor " + std::to_string(id));
    g[it->second] = 1;
  }
  return g;
}

inline void write_history(const fs::path& path, const std::vector<GenerationRecord>& history) {
  csv::Writer w(path.string());
  w.row("generation", "best_cost", "mean_cost", "budget_used", "electrified_km");
  for (const auto& h : history) w.row(h.generation, h.best_cost, h.mean_cost, h.budget_used, h.electrified_km);
}

inline std::vector<GenerationRecord> load_history(const fs::path& path) {
  const auto t = csv::Table::read(path.string());
  t.require({"generation", "best_cost", "mean_cost", "budget_used", "electrified_km"});
  std::vector<GenerationRecord> out;
  for (std::size_t r = 0; r < t.size(); ++r)
    out.push_back({static_cast<int>(t.integer(r, "generation")), t.number(r, "best_cost"), t.number(r, "mean_cost"),
                   t.number(r, "budget_used"), t.number(r, "electrified_km")});
  return out;
}

// ---- GeoJSON ----

/// Per-link overlap of a design against a reference design.
enum class Overlap { None, Both, RunOnly, BaseOnly };

inline const char* to_string(Overlap o) {
  switch (o) {
    case Overlap::None: return "none";
    case Overlap::Both: return "both";
    case Overlap::RunOnly: return "run_only";
    case Overlap::BaseOnly: return "base_only";
  }
  return "?";
}

inline std::vector<Overlap> overlap_tags(std::span<const char> run, std::span<const char> base) {
  std::vector<Overlap> out(run.size());
  for (std::size_t i = 0; i < run.size(); ++i)
    out[i] = run[i] ? (base[i] ? Overlap::Both : Overlap::RunOnly) : (base[i] ? Overlap::BaseOnly : Overlap::None);
  return out;
}

struct GeoLink {
  long link_id = 0;
  long tail = 0, head = 0;
  bool candidate = false;
  bool electrified = false;
  double diesel_tpd = 0.0;
  double electric_tpd = 0.0;
  std::string overlap;
};

/// One LineString feature per physical link, in link order.
inline nlohmann::json geojson(const RailNetwork& net, std::span<const char> electrified, const PhysicalFlows* flows,
                              std::span<const Overlap> overlap = {}) {
  using nlohmann::json;
  json features = json::array();
  for (std::size_t i = 0; i < net.links().size(); ++i) {
    const auto& l = net.links()[i];
    const auto& a = net.tail_node(l);
    const auto& b = net.head_node(l);
    json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "LineString"}, {"coordinates", json::array({{a.lon, a.lat}, {b.lon, b.lat}})}};
    f["properties"] = {{"link_id", l.id},
                       {"tail", l.tail},
                       {"head", l.head},
                       {"length_km", l.length_km},
                       {"candidate", l.candidate},
                       {"electrified", electrified[i] != 0},
                       {"diesel_tpd", flows ? flows->diesel[i] : 0.0},
                       {"electric_tpd", flows ? flows->electric[i] : 0.0},
                       {"overlap", overlap.empty() ? to_string(electrified[i] ? Overlap::RunOnly : Overlap::None)
                                                   : to_string(overlap[i])}};
    features.push_back(std::move(f));
  }
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

inline void write_geojson(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << doc.dump(1) << '\n';
}

/// Structural problems in a link FeatureCollection; empty when valid.
inline std::vector<std::string> geojson_errors(const nlohmann::json& doc) {
  std::vector<std::string> err;
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") err.push_back("root is not a FeatureCollection");
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    err.push_back("features is not an array");
    return err;
  }
  std::set<long> ids;
  for (std::size_t k = 0; k < doc["features"].size(); ++k) {
    const auto& f = doc["features"][k];
    const std::string at = "feature " + std::to_string(k) + ": ";
    if (!f.is_object() || f.value("type", "") != "Feature") {
      err.push_back(at + "not a Feature");
      continue;
    }
    const auto& g = f.contains("geometry") ? f["geometry"] : nlohmann::json();
    if (!g.is_object() || g.value("type", "") != "LineString" || !g.contains("coordinates") ||
        !g["coordinates"].is_array() || g["coordinates"].size() < 2) {
      err.push_back(at + "geometry is not a LineString with two or more positions");
    } else {
      for (const auto& p : g["coordinates"])
        if (!p.is_array() || p.size() < 2 || !p[0].is_number() || !p[1].is_number() ||
            std::abs(p[0].get<double>()) > 180.0 || std::abs(p[1].get<double>()) > 90.0)
          err.push_back(at + "invalid position");
    }
    const auto& pr = f.contains("properties") ? f["properties"] : nlohmann::json();
    if (!pr.is_object()) {
      err.push_back(at + "missing properties");
      continue;
    }
    for (const char* k : {"link_id", "tail", "head"})
      if (!pr.contains(k) || !pr[k].is_number_integer()) err.push_back(at + "'" + k + "' must be an integer");
    for (const char* k : {"candidate", "electrified"})
      if (!pr.contains(k) || !pr[k].is_boolean()) err.push_back(at + "'" + k + "' must be a boolean");
    for (const char* k : {"length_km", "diesel_tpd", "electric_tpd"})
      if (!pr.contains(k) || !pr[k].is_number() || pr[k].get<double>() < 0.0)
        err.push_back(at + "'" + k + "' must be a number >= 0");
    static const std::set<std::string> tags{"none", "both", "run_only", "base_only"};
    if (!pr.contains("overlap") || !pr["overlap"].is_string() || !tags.count(pr["overlap"].get<std::string>()))
      err.push_back(at + "'overlap' must be one of none, both, run_only, base_only");
    if (pr.contains("link_id") && pr["link_id"].is_number_integer() && !ids.insert(pr["link_id"].get<long>()).second)
      err.push_back(at + "duplicate link_id");
    if (pr.contains("electrified") && pr["electrified"].is_boolean() && pr["electrified"].get<bool>() &&
        pr.contains("candidate") && pr["candidate"].is_boolean() && !pr["candidate"].get<bool>())
      err.push_back(at + "electrified link is not a candidate");
  }
  return err;
}

inline std::vector<GeoLink> load_geojson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  if (const auto err = geojson_errors(doc); !err.empty()) throw ValidationError(path.string() + ": " + err.front());
  std::vector<GeoLink> out;
  for (const auto& f : doc["features"]) {
    const auto& p = f["properties"];
    out.push_back({p["link_id"].get<long>(), p["tail"].get<long>(), p["head"].get<long>(), p["candidate"].get<bool>(),
                   p["electrified"].get<bool>(), p["diesel_tpd"].get<double>(), p["electric_tpd"].get<double>(),
                   p["overlap"].get<std::string>()});
  }
  return out;
}

}  // namespace railelec::io
