#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "railelec/railelec.hpp"

using namespace railelec;
using railelec::testing::link;
using railelec::testing::node;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("railelec_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Scenario parse(const std::string& text, const fs::path& base = "/data") {
  std::istringstream in(text);
  return parse_scenario(in, "test.cfg", base);
}

Scenario small_ga(Scenario s = {}) {
  s.ga.population = 8;
  s.ga.generations = 6;
  s.ga.seed = 3;
  s.solver.tol = 1e-7;
  return s;
}

/// Chain 1 -> 2 -> 3, all yards, 400 km then 300 km, one OD pair 1 -> 3.
struct Chain {
  RailNetwork net{{node(1, 30.0, -95.0, true), node(2, 33.0, -95.0, true), node(3, 35.5, -95.0, true)},
                  {link(10, 1, 2, 400.0, 20000.0), link(11, 2, 3, 300.0, 20000.0)}};
  std::vector<OdDemand> od{{1, 3, 5000.0}};
};

}  // namespace

// ---- configuration ----

TEST(Config, EmptyFileGivesDefaults) {
  const auto s = parse("");
  EXPECT_EQ(s.budget, 30e9);
  EXPECT_EQ(s.demand_multiplier, 1.0);
  EXPECT_EQ(s.ga.population, 64);
  EXPECT_EQ(s.ga.generations, 200);
  EXPECT_EQ(s.solver.tol, 1e-6);
  EXPECT_EQ(s.rates.curve_coefficient, 0.4536);
  EXPECT_EQ(s.corridor_metric, CorridorMetric::FreeFlowCost);
}

TEST(Config, ParsesValuesCommentsAndPaths) {
  const auto s = parse(
      "# scenario\n"
      "\n"
      "demand_multiplier = 1.25   # heavier year\n"
      "budget=2.4e10\n"
      "nodes = net/nodes.csv\n"
      "links = /abs/links.csv\n"
      "corridor_metric = length\n"
      "switching_mode = composed\n"
      "signal_cost_per_km = 1, 2.5, 3\n"
      "sweep_axis = opex\n"
      "sweep_values = 1.0,1.1,1.25\n"
      "interaction_newton = false\n"
      "seed = 42\n",
      "/data");
  EXPECT_EQ(s.demand_multiplier, 1.25);
  EXPECT_EQ(s.budget, 2.4e10);
  EXPECT_EQ(s.nodes, fs::path("/data/net/nodes.csv"));
  EXPECT_EQ(s.links, fs::path("/abs/links.csv"));
  EXPECT_EQ(s.corridor_metric, CorridorMetric::Length);
  EXPECT_EQ(s.rates.switching_mode, SwitchingMode::Composed);
  EXPECT_EQ(s.rates.signal_cost_per_km, (std::vector<double>{1.0, 2.5, 3.0}));
  EXPECT_EQ(s.sweep_axis, SweepAxis::Opex);
  EXPECT_EQ(s.sweep_values, (std::vector<double>{1.0, 1.1, 1.25}));
  EXPECT_FALSE(s.solver.interaction_newton);
  EXPECT_EQ(s.ga.seed, 42u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse("budget = -1\n"), ValidationError);
  EXPECT_THROW(parse("budget = 0\n"), ValidationError);
  EXPECT_THROW(parse("budgte = 5\n"), ValidationError);
  EXPECT_THROW(parse("demand_multiplier = 0\n"), ValidationError);
  EXPECT_THROW(parse("opex_multiplier = 5.5\n"), ValidationError);
  EXPECT_THROW(parse("electricity_multiplier = -0.1\n"), ValidationError);
  EXPECT_THROW(parse("budget 5\n"), ValidationError);
  EXPECT_THROW(parse("population = many\n"), ValidationError);
  EXPECT_THROW(parse("corridor_metric = speed\n"), ValidationError);
  EXPECT_THROW(parse("tol = 0\n"), ValidationError);
  EXPECT_THROW(parse("seed = -3\n"), ValidationError);
  try {
    parse("\n\nfoo = 1\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("test.cfg:3"), std::string::npos);
  }
}

TEST(Config, MultiplierBoundsAreInclusiveAtFive) {
  EXPECT_EQ(parse("electrification_multiplier = 5\n").electrification_multiplier, 5.0);
}

TEST(Config, RatesFileLoadsFirstAndConfigOverrides) {
  const auto dir = scratch("rates");
  {
    std::ofstream r(dir / "rates.cfg");
    r << "crew_rate = 80\ncargo_rate = 200\n";
    std::ofstream c(dir / "run.cfg");
    c << "cargo_rate = 250\nrates = rates.cfg\n";
  }
  const auto s = load_scenario(dir / "run.cfg");
  EXPECT_EQ(s.rates.crew_rate, 80.0);
  EXPECT_EQ(s.rates.cargo_rate, 250.0);
  EXPECT_THROW(load_scenario(dir / "missing.cfg"), ValidationError);
}

TEST(Config, EffectiveRatesAndAxisPoints) {
  auto s = parse("opex_multiplier = 1.2\nelectricity_multiplier = 1.1\n");
  const auto r = s.effective_rates();
  EXPECT_DOUBLE_EQ(r.crew_rate, s.rates.crew_rate * 1.2);
  EXPECT_DOUBLE_EQ(r.cargo_rate, s.rates.cargo_rate * 1.2);
  EXPECT_DOUBLE_EQ(r.fuel_cost_electric, s.rates.fuel_cost_electric * 1.1);
  EXPECT_EQ(r.fuel_cost_diesel, s.rates.fuel_cost_diesel);
  EXPECT_EQ(s.at(SweepAxis::Budget, 24e9).budget, 24e9);
  EXPECT_EQ(s.at(SweepAxis::Demand, 1.25).demand_multiplier, 1.25);
  EXPECT_EQ(s.at(SweepAxis::Electrification, 1.1).electrification_multiplier, 1.1);
  EXPECT_THROW(s.at(SweepAxis::Budget, -1.0), ValidationError);
}

TEST(Config, EveryListedKeyIsAccepted) {
  for (const auto& k : option_keys()) {
    if (k == "rates") continue;
    Scenario s;
    // Every key must parse some value; lists, enums and paths take strings.
    const std::string v = k == "corridor_metric"  ? "length"
                          : k == "switching_mode" ? "fixed"
                          : k == "sweep_axis"     ? "budget"
                          : k == "interaction_newton" ? "true"
                                                      : "1";
    EXPECT_NO_THROW(set_option(s, k, v)) << k;
  }
}

// ---- CSV round trips ----

TEST(Io, NetworkAndDemandRoundTrip) {
  const auto dir = scratch("network");
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    auto toy = railelec::testing::toy_scenario(rng, 10, 30, 6, 900.0);
    auto nodes = toy.net.nodes();
    auto links = toy.net.links();
    nodes[0].switching_cost = 1234.5;
    links[0].desired_speed_mps = 17.5;
    links[1].k_f = 1.3;
    links[1].curve_radius_m = 800.0;
    io::write_nodes(dir / "n.csv", nodes);
    io::write_links(dir / "l.csv", links);
    io::write_od(dir / "od.csv", toy.od);
    const auto ln = io::load_nodes(dir / "n.csv");
    const auto ll = io::load_links(dir / "l.csv");
    const auto lo = io::load_od(dir / "od.csv");
    ASSERT_EQ(ln.size(), nodes.size());
    for (std::size_t i = 0; i < ln.size(); ++i) {
      EXPECT_EQ(ln[i].id, nodes[i].id);
      EXPECT_EQ(ln[i].lat, nodes[i].lat);
      EXPECT_EQ(ln[i].lon, nodes[i].lon);
      EXPECT_EQ(ln[i].is_yard, nodes[i].is_yard);
      EXPECT_EQ(ln[i].switching_cost, nodes[i].switching_cost);
    }
    ASSERT_EQ(ll.size(), links.size());
    for (std::size_t i = 0; i < ll.size(); ++i) {
      EXPECT_EQ(ll[i].id, links[i].id);
      EXPECT_EQ(ll[i].tail, links[i].tail);
      EXPECT_EQ(ll[i].head, links[i].head);
      EXPECT_EQ(ll[i].length_km, links[i].length_km);
      EXPECT_EQ(ll[i].grade, links[i].grade);
      EXPECT_EQ(ll[i].curve_radius_m, links[i].curve_radius_m);
      EXPECT_EQ(ll[i].capacity_tpd, links[i].capacity_tpd);
      EXPECT_EQ(ll[i].candidate, links[i].candidate);
      EXPECT_EQ(ll[i].signal_class, links[i].signal_class);
      EXPECT_EQ(ll[i].desired_speed_mps, links[i].desired_speed_mps);
      EXPECT_EQ(ll[i].k_f, links[i].k_f);
      EXPECT_EQ(ll[i].k_a, links[i].k_a);
    }
    ASSERT_EQ(lo.size(), toy.od.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      EXPECT_EQ(lo[i].origin, toy.od[i].origin);
      EXPECT_EQ(lo[i].destination, toy.od[i].destination);
      EXPECT_EQ(lo[i].tons_per_day, toy.od[i].tons_per_day);
    }
  }
}

TEST(Io, LoaderErrorsNameFileAndLine) {
  const auto dir = scratch("errors");
  {
    std::ofstream n(dir / "n.csv");
    n << "id,lat,lon,is_yard,switching_cost\n1,30,-95,1,\n2,thirty,-95,0,\n";
  }
  try {
    io::load_nodes(dir / "n.csv");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("n.csv:3"), std::string::npos) << e.what();
  }
  {
    std::ofstream l(dir / "l.csv");
    l << "id,tail,head,length_km\n1,1,2,10\n";
  }
  EXPECT_THROW(io::load_links(dir / "l.csv"), ValidationError);
  {
    std::ofstream o(dir / "od.csv");
    o << "origin,destination,tons_per_day\n1,2,-5\n";
  }
  EXPECT_THROW(io::load_od(dir / "od.csv"), ValidationError);
}

TEST(Io, CorridorsDesignFlowsAndHistoryRoundTrip) {
  const auto dir = scratch("outputs");
  std::mt19937_64 rng(9);
  auto toy = railelec::testing::toy_scenario(rng, 12, 36, 8, 1500.0);
  Study study(small_ga(), toy.net, toy.od);
  const auto& cat = study.catalog();
  ASSERT_GE(cat.size(), 2u);

  io::write_corridors(dir / "c.csv", study.network(), cat.corridors());
  const auto back = io::load_corridors(dir / "c.csv", study.network());
  ASSERT_EQ(back.size(), cat.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, cat[i].id);
    EXPECT_EQ(back[i].yard_a, cat[i].yard_a);
    EXPECT_EQ(back[i].yard_b, cat[i].yard_b);
    EXPECT_EQ(back[i].links, cat[i].links);
    EXPECT_EQ(back[i].length_km, cat[i].length_km);
    EXPECT_EQ(back[i].cost, cat[i].cost);
  }

  Genome g(cat.size(), 0);
  g[0] = g[cat.size() - 1] = 1;
  io::write_corridors(dir / "best.csv", study.network(), cat.corridors(), &g);
  EXPECT_EQ(io::load_design(dir / "best.csv", cat), g);

  const auto p = study.problem();
  const auto r = p.solve(g);
  io::write_flows(dir / "f.csv", study.network(), study.instance().expanded, r.state);
  const auto rows = io::load_flows(dir / "f.csv");
  ASSERT_EQ(rows.size(), r.state.flow.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const auto& arc = study.instance().expanded.arcs[a];
    EXPECT_EQ(rows[a].arc_id, a);
    EXPECT_EQ(rows[a].kind, to_string(arc.kind));
    EXPECT_EQ(rows[a].flow_tpd, r.state.flow[a]);
    EXPECT_EQ(rows[a].cost_per_ton, r.state.cost[a]);
    EXPECT_EQ(rows[a].physical_link.has_value(), arc.physical_link.has_value());
    if (arc.physical_link) {
      EXPECT_EQ(*rows[a].physical_link, study.network().links()[*arc.physical_link].id);
    }
  }

  const std::vector<GenerationRecord> hist{{0, 10.5, 12.25, 3e9, 400.0}, {1, 9.75, 11.0, 2.5e9, 350.5}};
  io::write_history(dir / "h.csv", hist);
  const auto hb = io::load_history(dir / "h.csv");
  ASSERT_EQ(hb.size(), 2u);
  EXPECT_EQ(hb[1].generation, 1);
  EXPECT_EQ(hb[1].best_cost, 9.75);
  EXPECT_EQ(hb[1].electrified_km, 350.5);
}

TEST(Io, CorridorFileRejectsUnknownAndNonCandidateLinks) {
  const auto dir = scratch("badcorr");
  RailNetwork net({node(1, 30, -95, true), node(2, 31, -95, true)},
                  {link(1, 1, 2, 100), link(2, 2, 1, 100, 1000, false)});
  {
    std::ofstream c(dir / "c.csv");
    c << "corridor_id,yard_a,yard_b,length_km,cost_usd,link_ids\n0,1,2,100,5,1;99\n";
  }
  EXPECT_THROW(io::load_corridors(dir / "c.csv", net), ValidationError);
  {
    std::ofstream c(dir / "c.csv");
    c << "corridor_id,yard_a,yard_b,length_km,cost_usd,link_ids\n0,1,2,100,5,1;2\n";
  }
  EXPECT_THROW(io::load_corridors(dir / "c.csv", net), ValidationError);
}

TEST(Study, CorridorFileOverridesGenerationAndCostsAreRecomputed) {
  const auto dir = scratch("study_corr");
  Chain ch;
  {
    std::ofstream c(dir / "c.csv");
    c << "corridor_id,yard_a,yard_b,length_km,cost_usd,link_ids\n7,1,3,700,1,10;11\n";
  }
  auto cs = io::load_corridors(dir / "c.csv", ch.net);
  Study study(small_ga(), ch.net, ch.od, cs);
  ASSERT_EQ(study.catalog().size(), 1u);
  EXPECT_EQ(study.catalog()[0].id, 7u);
  const auto& costs = study.catalog().link_costs();
  EXPECT_DOUBLE_EQ(study.catalog()[0].cost, costs[0] + costs[1]);
}

// ---- GeoJSON ----

TEST(GeoJson, FlagsFeatureCountSchemaAndRoundTrip) {
  const auto dir = scratch("geojson");
  std::mt19937_64 rng(21);
  auto toy = railelec::testing::toy_scenario(rng, 10, 30, 6, 1200.0);
  Study study(small_ga(), toy.net, toy.od);
  const auto& cat = study.catalog();
  const auto& net = study.network();

  const Genome none(cat.size(), 0);
  const auto doc0 = io::geojson(net, cat.electrified_links(none), nullptr);
  EXPECT_TRUE(io::geojson_errors(doc0).empty());
  ASSERT_EQ(doc0["features"].size(), net.links().size());
  for (const auto& f : doc0["features"]) EXPECT_FALSE(f["properties"]["electrified"].get<bool>());

  Genome one(cat.size(), 0);
  one[0] = 1;
  const auto mask = cat.electrified_links(one);
  const auto flows = aggregate(study.instance().expanded, study.problem().solve(one).state.flow);
  const auto tags = io::overlap_tags(mask, cat.electrified_links(none));
  io::write_geojson(dir / "g.geojson", io::geojson(net, mask, &flows, tags));
  const auto back = io::load_geojson(dir / "g.geojson");
  ASSERT_EQ(back.size(), net.links().size());
  std::set<long> flagged, expected;
  for (auto l : cat[0].links) expected.insert(net.links()[l].id);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].link_id, net.links()[i].id);
    EXPECT_EQ(back[i].tail, net.links()[i].tail);
    EXPECT_EQ(back[i].candidate, net.links()[i].candidate);
    EXPECT_EQ(back[i].diesel_tpd, flows.diesel[i]);
    EXPECT_EQ(back[i].electric_tpd, flows.electric[i]);
    EXPECT_EQ(back[i].overlap, back[i].electrified ? "run_only" : "none");
    if (back[i].electrified) flagged.insert(back[i].link_id);
  }
  EXPECT_EQ(flagged, expected);
}

TEST(GeoJson, SchemaCheckRejectsMalformedDocuments) {
  RailNetwork net({node(1, 30, -95, true), node(2, 31, -95, true)}, {link(1, 1, 2, 100)});
  const std::vector<char> mask{1};
  const auto good = io::geojson(net, mask, nullptr);
  ASSERT_TRUE(io::geojson_errors(good).empty());

  auto bad = good;
  bad["type"] = "Feature";
  EXPECT_FALSE(io::geojson_errors(bad).empty());
  bad = good;
  bad["features"][0]["geometry"]["type"] = "Point";
  EXPECT_FALSE(io::geojson_errors(bad).empty());
  bad = good;
  bad["features"][0]["geometry"]["coordinates"][0][1] = 95.0;
  EXPECT_FALSE(io::geojson_errors(bad).empty());
  bad = good;
  bad["features"][0]["properties"].erase("electrified");
  EXPECT_FALSE(io::geojson_errors(bad).empty());
  bad = good;
  bad["features"][0]["properties"]["overlap"] = "maybe";
  EXPECT_FALSE(io::geojson_errors(bad).empty());
  bad = good;
  bad["features"][0]["properties"]["diesel_tpd"] = -1.0;
  EXPECT_FALSE(io::geojson_errors(bad).empty());
  bad = good;
  bad["features"].push_back(good["features"][0]);
  EXPECT_FALSE(io::geojson_errors(bad).empty());
}

TEST(GeoJson, OverlapTags) {
  const std::vector<char> run{1, 1, 0, 0}, base{1, 0, 1, 0};
  const auto t = io::overlap_tags(run, base);
  EXPECT_EQ(t, (std::vector<io::Overlap>{io::Overlap::Both, io::Overlap::RunOnly, io::Overlap::BaseOnly,
                                         io::Overlap::None}));
}

// ---- reports ----

TEST(Report, ZeroDesignHasZeroShares) {
  Chain ch;
  Study study(small_ga(), ch.net, ch.od);
  const auto p = study.problem();
  const auto rep = make_report(p, Genome(study.catalog().size(), 0));
  EXPECT_EQ(rep.line_mile_share, 0.0);
  EXPECT_EQ(rep.tonnage_share, 0.0);
  EXPECT_EQ(rep.budget_used, 0.0);
  EXPECT_EQ(rep.roi, 0.0);
  EXPECT_DOUBLE_EQ(rep.optimized_cost, rep.baseline_cost);
}

TEST(Report, FullyElectrifiedChainIsAllElectric) {
  Chain ch;
  // One corridor covering the whole route: yard 2 is dropped.
  ch.net = RailNetwork({node(1, 30.0, -95.0, true), node(2, 33.0, -95.0), node(3, 35.5, -95.0, true)},
                       {link(10, 1, 2, 400.0, 20000.0), link(11, 2, 3, 300.0, 20000.0)});
  Study study(small_ga(), ch.net, ch.od);
  ASSERT_EQ(study.catalog().size(), 1u);
  const auto rep = make_report(study.problem(), Genome{1});
  EXPECT_DOUBLE_EQ(rep.line_mile_share, 1.0);
  EXPECT_NEAR(rep.tonnage_share, 1.0, 1e-12);
  EXPECT_EQ(rep.corridors, (std::vector<std::size_t>{0}));
}

TEST(Report, HalfElectrifiedChainHandComputedShares) {
  Chain ch;
  Study study(small_ga(), ch.net, ch.od);
  const auto& cat = study.catalog();
  const auto& net = study.network();
  // Select the corridor made of link 10 only.
  Genome g(cat.size(), 0);
  for (std::size_t i = 0; i < cat.size(); ++i)
    if (cat[i].links == std::vector<std::size_t>{0}) g[i] = 1;
  ASSERT_EQ(std::count(g.begin(), g.end(), 1), 1);

  const auto& prof = study.instance().profiles;
  const double saving = (prof[0].diesel.fuel_cost_per_ton - prof[0].electric.fuel_cost_per_ton);
  const double swap = study.rates().switching_cost_per_train / study.scenario().consist.cargo_per_train_t();
  ASSERT_GT(saving, swap);  // so the whole demand runs electric on link 10 and switches at yard 2

  const auto p = study.problem();
  const auto rep = make_report(p, g);
  EXPECT_DOUBLE_EQ(rep.line_mile_share, 400.0 / 700.0);
  EXPECT_NEAR(rep.tonnage_share, 5000.0 * 400.0 / (5000.0 * 700.0), 1e-9);
  EXPECT_DOUBLE_EQ(rep.electrified_km, 400.0);
  EXPECT_NEAR(rep.baseline_cost - rep.optimized_cost, 5000.0 * (saving - swap), 1e-6 * rep.baseline_cost);
  EXPECT_DOUBLE_EQ(rep.roi, (rep.baseline_cost - rep.optimized_cost) / p.budget());
  EXPECT_EQ(net.links()[0].id, 10);
}

TEST(Report, ReportsCsvRoundTrip) {
  const auto dir = scratch("reports");
  RunReport r;
  r.axis = "demand";
  r.value = 1.25;
  r.budget = 3e10;
  r.demand_multiplier = 1.25;
  r.seed = 17;
  r.baseline_cost = 1.5e6;
  r.optimized_cost = 1.25e6;
  r.roi = (r.baseline_cost - r.optimized_cost) / r.budget;
  r.corridors = {2, 5, 9};
  r.line_mile_share = 0.132;
  r.tonnage_share = 0.155;
  write_reports(dir / "r.csv", {r, RunReport{}});
  const auto back = load_reports(dir / "r.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].axis, "demand");
  EXPECT_EQ(back[0].value, 1.25);
  EXPECT_EQ(back[0].seed, 17u);
  EXPECT_EQ(back[0].roi, r.roi);
  EXPECT_EQ(back[0].corridors, r.corridors);
  EXPECT_EQ(back[0].line_mile_share, 0.132);
  EXPECT_TRUE(back[1].corridors.empty());
  EXPECT_FALSE(format_report(r).empty());
}

// ---- sweeps ----

TEST(Sweep, CompareSelectionsIsExactSetAlgebra) {
  const std::set<std::string> a{"1", "2", "3"}, b{"2", "3", "4"}, sub{"2"};
  auto s = compare_selections(a, b);
  EXPECT_EQ(s.intersection, (std::vector<std::string>{"2", "3"}));
  EXPECT_EQ(s.run_only, (std::vector<std::string>{"1"}));
  EXPECT_EQ(s.base_only, (std::vector<std::string>{"4"}));
  EXPECT_EQ(s.relation, "not_nested");
  EXPECT_DOUBLE_EQ(s.jaccard, 0.5);
  EXPECT_EQ(compare_selections(sub, a).relation, "run_subset_base");
  EXPECT_EQ(compare_selections(a, sub).relation, "base_subset_run");
  EXPECT_EQ(compare_selections(a, a).relation, "equal");
  EXPECT_EQ(compare_selections({}, {}).jaccard, 1.0);
}

TEST(Sweep, SingleValueEqualsPlainRun) {
  std::mt19937_64 rng(33);
  auto toy = railelec::testing::toy_scenario(rng, 10, 30, 8, 2000.0);
  auto s = small_ga();
  Study study(s, toy.net, toy.od);
  s.budget = 0.3 * std::accumulate(study.catalog().link_costs().begin(), study.catalog().link_costs().end(), 0.0);
  Study plain(s, toy.net, toy.od);
  const auto run = optimize(plain).report;
  auto make = [&](const Scenario& sc) { return std::make_unique<Study>(sc, toy.net, toy.od); };
  const auto sw = sweep(s, SweepAxis::Budget, {s.budget}, make);
  ASSERT_EQ(sw.runs.size(), 1u);
  EXPECT_EQ(sw.runs[0].genome, run.genome);
  EXPECT_EQ(sw.runs[0].optimized_cost, run.optimized_cost);
  EXPECT_EQ(sw.overlap[0].relation, "equal");
  EXPECT_TRUE(sw.nested_chain);
}

TEST(Sweep, BudgetSweepOverlapMatchesDirectComparison) {
  std::mt19937_64 rng(34);
  auto toy = railelec::testing::toy_scenario(rng, 12, 36, 10, 2500.0);
  auto s = small_ga();
  Study probe(s, toy.net, toy.od);
  const auto& lc = probe.catalog().link_costs();
  s.budget = 0.25 * std::accumulate(lc.begin(), lc.end(), 0.0);
  auto make = [&](const Scenario& sc) { return std::make_unique<Study>(sc, toy.net, toy.od); };
  const std::vector<double> values{0.8 * s.budget, s.budget, 1.2 * s.budget};
  const auto sw = sweep(s, SweepAxis::Budget, values, make);
  ASSERT_EQ(sw.runs.size(), 3u);
  EXPECT_EQ(sw.base, 1u);
  std::vector<std::set<std::string>> keys;
  for (const auto& r : sw.runs) {
    EXPECT_LE(r.budget_used, r.budget);
    keys.push_back(selection_keys(probe.network(), probe.catalog(), r.genome));
  }
  for (std::size_t k = 0; k < 3; ++k) {
    std::set<std::string> inter, run_only, base_only;
    for (const auto& x : keys[k]) (keys[1].count(x) ? inter : run_only).insert(x);
    for (const auto& x : keys[1])
      if (!keys[k].count(x)) base_only.insert(x);
    const auto& o = sw.overlap[k];
    EXPECT_EQ(std::set<std::string>(o.intersection.begin(), o.intersection.end()), inter);
    EXPECT_EQ(std::set<std::string>(o.run_only.begin(), o.run_only.end()), run_only);
    EXPECT_EQ(std::set<std::string>(o.base_only.begin(), o.base_only.end()), base_only);
  }
  const bool nested = std::includes(keys[1].begin(), keys[1].end(), keys[0].begin(), keys[0].end()) &&
                      std::includes(keys[2].begin(), keys[2].end(), keys[1].begin(), keys[1].end());
  EXPECT_EQ(sw.nested_chain, nested);
  EXPECT_FALSE(format_sweep(sw).empty());
}

TEST(Sweep, DemandAxisRebuildsTheStudy) {
  std::mt19937_64 rng(35);
  auto toy = railelec::testing::toy_scenario(rng, 8, 24, 6, 1500.0);
  auto s = small_ga();
  s.ga.generations = 2;
  int built = 0;
  auto make = [&](const Scenario& sc) {
    ++built;
    return std::make_unique<Study>(sc, toy.net, toy.od);
  };
  const auto sw = sweep(s, SweepAxis::Demand, {1.0, 1.25}, make);
  EXPECT_EQ(built, 2);
  EXPECT_EQ(sw.runs[1].demand_multiplier, 1.25);
  EXPECT_GT(sw.runs[1].baseline_cost, sw.runs[0].baseline_cost);
}

TEST(Study, RunsAreReproducibleFromFilesConfigAndSeed) {
  const auto dir = scratch("repro");
  std::mt19937_64 rng(40);
  auto toy = railelec::testing::toy_scenario(rng, 10, 30, 8, 1500.0);
  io::write_nodes(dir / "nodes.csv", toy.net.nodes());
  io::write_links(dir / "links.csv", toy.net.links());
  io::write_od(dir / "od.csv", toy.od);
  {
    std::ofstream c(dir / "run.cfg");
    c << "nodes = nodes.csv\nlinks = links.csv\nod = od.csv\nbudget = 2e9\npopulation = 8\ngenerations = 4\nseed = 11\n";
  }
  const auto s = load_scenario(dir / "run.cfg");
  const auto a = optimize(*Study::load(s)).report;
  const auto b = optimize(*Study::load(s)).report;
  EXPECT_EQ(a.genome, b.genome);
  EXPECT_EQ(a.optimized_cost, b.optimized_cost);
  EXPECT_EQ(a.baseline_cost, b.baseline_cost);
}
