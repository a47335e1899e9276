#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "railelec/assignment.hpp"
#include "railelec/config.hpp"
#include "railelec/corridors.hpp"
#include "railelec/csv.hpp"
#include "railelec/design.hpp"
#include "railelec/io.hpp"

namespace railelec {

/// A scenario bound to its network, demand, assignment instance and corridor
/// catalog. Holds internal pointers, so it is neither copied nor moved.
class Study {
 public:
  Study(Scenario s, RailNetwork net, std::vector<OdDemand> od, std::optional<std::vector<Corridor>> corridors = {})
      : scenario_(std::move(s)), net_(std::move(net)), od_(std::move(od)) {
    scenario_.validate();
    auto alpha_warnings = assign_alphas(net_);
    warnings_.insert(warnings_.end(), alpha_warnings.begin(), alpha_warnings.end());
    rates_ = scenario_.effective_rates();
    inst_ = std::make_unique<AssignmentInstance>(
        build_assignment(net_, scenario_.consist, rates_, od_, scenario_.demand_multiplier));

    auto link_costs = electrification_costs(net_, rates_);
    for (auto& c : link_costs) c *= scenario_.electrification_multiplier;
    std::vector<double> km;
    for (const auto& l : net_.links()) km.push_back(l.length_km);
    std::vector<Corridor> cs;
    if (corridors) {
      cs = std::move(*corridors);
      for (auto& c : cs) c.cost = corridor_cost(c, link_costs);
    } else {
      auto set = candidate_corridors(net_, corridor_weights(net_, scenario_.corridor_metric, inst_->profiles), link_costs);
      cs = std::move(set.corridors);
      warnings_.insert(warnings_.end(), set.warnings.begin(), set.warnings.end());
    }
    catalog_ = std::make_unique<CorridorCatalog>(std::move(cs), std::move(link_costs), std::move(km));
  }

  /// Loads every file the scenario names.
  static std::unique_ptr<Study> load(const Scenario& s) {
    if (s.nodes.empty() || s.links.empty() || s.od.empty())
      throw ValidationError("scenario: 'nodes', 'links' and 'od' paths are required");
    RailNetwork net(io::load_nodes(s.nodes), io::load_links(s.links));
    std::optional<std::vector<Corridor>> cs;
    if (!s.corridors.empty()) cs = io::load_corridors(s.corridors, net);
    return std::make_unique<Study>(s, std::move(net), io::load_od(s.od), std::move(cs));
  }

  Study(const Study&) = delete;
  Study& operator=(const Study&) = delete;

  const Scenario& scenario() const { return scenario_; }
  const RailNetwork& network() const { return net_; }
  const std::vector<OdDemand>& od() const { return od_; }
  const RateTable& rates() const { return rates_; }
  const AssignmentInstance& instance() const { return *inst_; }
  const CorridorCatalog& catalog() const { return *catalog_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  DesignProblem problem(std::optional<double> budget = {}) const {
    return DesignProblem(*inst_, *catalog_, budget.value_or(scenario_.budget), scenario_.solver);
  }

 private:
  Scenario scenario_;
  RailNetwork net_;
  std::vector<OdDemand> od_;
  RateTable rates_;
  std::unique_ptr<AssignmentInstance> inst_;
  std::unique_ptr<CorridorCatalog> catalog_;
  std::vector<std::string> warnings_;
};

/// Outcome of one run, with the echo of the scenario values that shaped it.
struct RunReport {
  std::string axis = "budget";
  double value = 0.0;
  double budget = 0.0;
  double demand_multiplier = 1.0, opex_multiplier = 1.0, electrification_multiplier = 1.0, electricity_multiplier = 1.0;
  std::uint64_t seed = 0;

  double baseline_cost = 0.0;   // $/day with no electrification
  double optimized_cost = 0.0;  // $/day under the design
  double roi = 0.0;             // (baseline - optimized) / budget
  double budget_used = 0.0;
  double electrified_km = 0.0;
  double candidate_km = 0.0;
  double line_mile_share = 0.0;
  double tonnage_share = 0.0;
  double relative_gap = 0.0;
  std::vector<std::size_t> corridors;  // selected corridor ids, ascending

  // Not serialized.
  Genome genome;
  std::vector<char> electrified_links;
  PhysicalFlows flows;
};

/// Report for a fixed design: re-solves the design's equilibrium.
inline RunReport make_report(const DesignProblem& p, const Genome& g) {
  const auto& net = *p.instance().network;
  const auto r = p.solve(g);
  RunReport rep;
  rep.budget = p.budget();
  rep.baseline_cost = p.baseline().cost;
  rep.optimized_cost = total_system_cost(p.instance().costs, std::span<const double>(r.state.flow));
  rep.roi = rep.budget > 0.0 ? (rep.baseline_cost - rep.optimized_cost) / rep.budget : 0.0;
  rep.budget_used = p.catalog().union_cost(g);
  rep.electrified_km = p.catalog().electrified_km(g);
  rep.candidate_km = net.candidate_km();
  rep.line_mile_share = rep.candidate_km > 0.0 ? rep.electrified_km / rep.candidate_km : 0.0;
  rep.tonnage_share = electrified_tonnage_share(net, p.instance().expanded, r.state.flow);
  rep.relative_gap = r.metrics.relative_gap;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i]) rep.corridors.push_back(p.catalog()[i].id);
  std::sort(rep.corridors.begin(), rep.corridors.end());
  rep.genome = g;
  rep.electrified_links = p.catalog().electrified_links(g);
  rep.flows = aggregate(p.instance().expanded, r.state.flow);
  return rep;
}

inline void echo(RunReport& rep, const Scenario& s, SweepAxis axis, double value) {
  rep.axis = to_string(axis);
  rep.value = value;
  rep.demand_multiplier = s.demand_multiplier;
  rep.opex_multiplier = s.opex_multiplier;
  rep.electrification_multiplier = s.electrification_multiplier;
  rep.electricity_multiplier = s.electricity_multiplier;
  rep.seed = s.ga.seed;
}

struct OptimizeRun {
  RunReport report;
  EvolutionResult evolution;
};

inline OptimizeRun optimize(const Study& study, std::optional<double> budget = {},
                            const std::function<void(const GenerationRecord&)>& on_generation = {}) {
  const auto p = study.problem(budget);
  auto evo = evolve(p, study.scenario().ga, on_generation);
  auto rep = make_report(p, evo.best.genome);
  echo(rep, study.scenario(), SweepAxis::Budget, p.budget());
  return {std::move(rep), std::move(evo)};
}

/// Overlap of one run's selection against the base run's, compared by the
/// link content of each corridor so that runs with different catalogs agree.
struct OverlapStats {
  double value = 0.0;
  double base_value = 0.0;
  std::vector<std::string> intersection, run_only, base_only;
  std::string relation;  // equal, run_subset_base, base_subset_run, not_nested
  double jaccard = 1.0;
};

inline std::string corridor_key(const RailNetwork& net, const Corridor& c) {
  std::vector<long> ids;
  for (auto l : c.links) ids.push_back(net.links()[l].id);
  std::sort(ids.begin(), ids.end());
  std::string k;
  for (auto id : ids) k += (k.empty() ? "" : ";") + std::to_string(id);
  return k;
}

inline std::set<std::string> selection_keys(const RailNetwork& net, const CorridorCatalog& cat, const Genome& g) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i]) out.insert(corridor_key(net, cat[i]));
  return out;
}

inline OverlapStats compare_selections(const std::set<std::string>& run, const std::set<std::string>& base) {
  OverlapStats s;
  std::set_intersection(run.begin(), run.end(), base.begin(), base.end(), std::back_inserter(s.intersection));
  std::set_difference(run.begin(), run.end(), base.begin(), base.end(), std::back_inserter(s.run_only));
  std::set_difference(base.begin(), base.end(), run.begin(), run.end(), std::back_inserter(s.base_only));
  const std::size_t uni = s.intersection.size() + s.run_only.size() + s.base_only.size();
  s.jaccard = uni == 0 ? 1.0 : static_cast<double>(s.intersection.size()) / static_cast<double>(uni);
  if (s.run_only.empty() && s.base_only.empty()) s.relation = "equal";
  else if (s.run_only.empty()) s.relation = "run_subset_base";
  else if (s.base_only.empty()) s.relation = "base_subset_run";
  else s.relation = "not_nested";
  return s;
}

struct SweepResult {
  SweepAxis axis = SweepAxis::Budget;
  std::vector<RunReport> runs;        // in the order of the requested values
  std::size_t base = 0;               // index of the reference run
  std::vector<OverlapStats> overlap;  // per run, against the base run
  bool nested_chain = true;           // selections nested along ascending values
  std::vector<std::vector<char>> base_links;
};

inline double axis_value(const Scenario& s, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Budget: return s.budget;
    case SweepAxis::Demand: return s.demand_multiplier;
    case SweepAxis::Opex: return s.opex_multiplier;
    case SweepAxis::Electrification: return s.electrification_multiplier;
    case SweepAxis::Electricity: return s.electricity_multiplier;
  }
  return 0.0;
}

/// One full optimization per value. The base run is the one at the scenario's
/// own axis value when listed, otherwise the first. `make_study` builds a study
/// for a modified scenario; budget points share one study.
inline SweepResult sweep(const Scenario& scenario, SweepAxis axis, const std::vector<double>& values,
                         const std::function<std::unique_ptr<Study>(const Scenario&)>& make_study,
                         const std::function<void(const RunReport&)>& on_run = {}) {
  if (values.empty()) throw ValidationError("sweep: no values given");
  SweepResult out;
  out.axis = axis;
  std::vector<std::set<std::string>> keys;
  std::unique_ptr<Study> shared;
  if (axis == SweepAxis::Budget) shared = make_study(scenario);
  for (double v : values) {
    const Scenario s = scenario.at(axis, v);
    std::unique_ptr<Study> own;
    const Study& study = axis == SweepAxis::Budget ? *shared : *(own = make_study(s));
    auto run = optimize(study, s.budget).report;
    echo(run, s, axis, v);
    keys.push_back(selection_keys(study.network(), study.catalog(), run.genome));
    if (on_run) on_run(run);
    out.runs.push_back(std::move(run));
  }
  const double base_value = axis_value(scenario, axis);
  auto it = std::find(values.begin(), values.end(), base_value);
  out.base = it == values.end() ? 0 : static_cast<std::size_t>(it - values.begin());
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto st = compare_selections(keys[k], keys[out.base]);
    st.value = values[k];
    st.base_value = values[out.base];
    out.overlap.push_back(std::move(st));
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& lo = keys[order[k - 1]];
    const auto& hi = keys[order[k]];
    if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end())) out.nested_chain = false;
  }
  return out;
}

inline std::unique_ptr<Study> load_study(const Scenario& s) { return Study::load(s); }

// ---- output ----

inline std::string join_ids(const std::vector<std::size_t>& ids) {
  std::string s;
  for (auto id : ids) s += (s.empty() ? "" : ";") + std::to_string(id);
  return s;
}

inline void write_reports(const std::filesystem::path& path, const std::vector<RunReport>& runs) {
  csv::Writer w(path.string());
  w.row("axis", "value", "budget", "demand_multiplier", "opex_multiplier", "electrification_multiplier",
        "electricity_multiplier", "seed", "baseline_cost", "optimized_cost", "roi", "budget_used", "electrified_km",
        "candidate_km", "line_mile_share", "tonnage_share", "relative_gap", "corridor_ids");
  for (const auto& r : runs)
    w.row(r.axis, r.value, r.budget, r.demand_multiplier, r.opex_multiplier, r.electrification_multiplier,
          r.electricity_multiplier, r.seed, r.baseline_cost, r.optimized_cost, r.roi, r.budget_used, r.electrified_km,
          r.candidate_km, r.line_mile_share, r.tonnage_share, r.relative_gap, join_ids(r.corridors));
}

inline std::vector<RunReport> load_reports(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path.string());
  t.require({"axis", "value", "budget", "seed", "baseline_cost", "optimized_cost", "roi", "corridor_ids"});
  std::vector<RunReport> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    RunReport x;
    x.axis = t.at(r, "axis");
    x.value = t.number(r, "value");
    x.budget = t.number(r, "budget");
    x.demand_multiplier = t.number(r, "demand_multiplier");
    x.opex_multiplier = t.number(r, "opex_multiplier");
    x.electrification_multiplier = t.number(r, "electrification_multiplier");
    x.electricity_multiplier = t.number(r, "electricity_multiplier");
    x.seed = static_cast<std::uint64_t>(t.integer(r, "seed"));
    x.baseline_cost = t.number(r, "baseline_cost");
    x.optimized_cost = t.number(r, "optimized_cost");
    x.roi = t.number(r, "roi");
    x.budget_used = t.number(r, "budget_used");
    x.electrified_km = t.number(r, "electrified_km");
    x.candidate_km = t.number(r, "candidate_km");
    x.line_mile_share = t.number(r, "line_mile_share");
    x.tonnage_share = t.number(r, "tonnage_share");
    x.relative_gap = t.number(r, "relative_gap");
    if (auto ids = t.optional(r, "corridor_ids"))
      for (const auto& f : csv::split(*ids, ';'))
        x.corridors.push_back(static_cast<std::size_t>(csv::parse_long(f, t.where(r, "corridor_ids"))));
    out.push_back(std::move(x));
  }
  return out;
}

inline void write_overlap(const std::filesystem::path& path, const SweepResult& s) {
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (const auto& k : v) out += (out.empty() ? "" : " ") + k;
    return out;
  };
  csv::Writer w(path.string());
  w.row("value", "base_value", "relation", "jaccard", "n_intersection", "n_run_only", "n_base_only", "intersection",
        "run_only", "base_only");
  for (const auto& o : s.overlap)
    w.row(o.value, o.base_value, o.relation, o.jaccard, o.intersection.size(), o.run_only.size(), o.base_only.size(),
          join(o.intersection), join(o.run_only), join(o.base_only));
}

inline std::string format_report(const RunReport& r) {
  std::ostringstream o;
  o << std::setprecision(6);
  o << "budget            $" << r.budget << "\n"
    << "baseline cost     $" << r.baseline_cost << " per day\n"
    << "optimized cost    $" << r.optimized_cost << " per day\n"
    << "ROI               " << r.roi << " per day per $ of budget\n"
    << "budget used       $" << r.budget_used << "\n"
    << "electrified       " << r.electrified_km << " km of " << r.candidate_km << " candidate km ("
    << 100.0 * r.line_mile_share << "% by line length)\n"
    << "tonnage share     " << 100.0 * r.tonnage_share << "% of ton-km on electric traction\n"
    << "relative gap      " << r.relative_gap << "\n"
    << "corridors         " << (r.corridors.empty() ? std::string("(none)") : join_ids(r.corridors)) << "\n";
  return o.str();
}

inline std::string format_sweep(const SweepResult& s) {
  std::ostringstream o;
  o << std::setprecision(6);
  o << "sweep over " << to_string(s.axis) << ", base value " << s.runs[s.base].value << "\n";
  for (std::size_t k = 0; k < s.runs.size(); ++k) {
    const auto& r = s.runs[k];
    const auto& ov = s.overlap[k];
    o << "  " << r.value << ": cost " << r.optimized_cost << ", ROI " << r.roi << ", corridors " << r.corridors.size()
      << ", shared " << ov.intersection.size() << ", added " << ov.run_only.size() << ", dropped "
      << ov.base_only.size() << ", " << ov.relation << "\n";
  }
  o << "selections nested along ascending values: " << (s.nested_chain ? "yes" : "no") << "\n";
  return o.str();
}

}  // namespace railelec
