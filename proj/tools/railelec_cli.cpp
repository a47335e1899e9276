// Command-line front end: one subcommand per pipeline stage.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "railelec/railelec.hpp"

namespace fs = std::filesystem;
using namespace railelec;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<int> generations;
  std::optional<double> time_limit;
};

Scenario resolve(const Overrides& o) {
  Scenario s = load_scenario(o.config, false);
  if (o.seed) s.ga.seed = *o.seed;
  if (o.tol) s.solver.tol = *o.tol;
  if (o.out_dir) s.out_dir = *o.out_dir;
  if (o.threads) s.ga.threads = *o.threads;
  if (o.generations) s.ga.generations = *o.generations;
  if (o.time_limit) s.ga.time_limit_s = *o.time_limit;
  s.validate();
  fs::create_directories(s.out_dir);
  return s;
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

int cmd_transform(const Scenario& s) {
  auto loaded = io::load_network(s.nodes, s.links);
  warn(loaded.warnings);
  const SwitchingParams sw{switching_cost_per_train(s.effective_rates(), s.consist), s.consist.cargo_per_train_t()};
  const auto x = expand(loaded.network, sw);
  io::write_expanded(s.out_dir / "expanded_arcs.csv", loaded.network, x);
  std::cout << "expanded " << loaded.network.nodes().size() << " nodes and " << loaded.network.links().size()
            << " links into " << x.nodes.size() << " nodes and " << x.arcs.size() << " arcs ("
            << x.count(ArcKind::Switch) << " switch arcs at " << x.yards.size() << " yards)\n";
  return 0;
}

int cmd_costs(const Scenario& s) {
  auto loaded = io::load_network(s.nodes, s.links);
  warn(loaded.warnings);
  const auto rates = s.effective_rates();
  const auto profiles = link_cost_profiles(loaded.network, s.consist, rates);
  auto capital = electrification_costs(loaded.network, rates);
  for (auto& c : capital) c *= s.electrification_multiplier;
  io::write_profiles(s.out_dir / "link_costs.csv", loaded.network, profiles, capital);
  std::cout << "wrote cost profiles for " << profiles.size() << " links\n";
  return 0;
}

int cmd_corridors(const Scenario& s) {
  const auto study = Study::load(s);
  warn(study->warnings());
  io::write_corridors(s.out_dir / "corridors.csv", study->network(), study->catalog().corridors());
  std::cout << study->catalog().size() << " candidate corridors\n";
  return 0;
}

int cmd_assign(const Scenario& s, const std::string& design) {
  const auto study = Study::load(s);
  warn(study->warnings());
  Genome g(study->catalog().size(), 0);
  if (!design.empty()) g = io::load_design(design, study->catalog());
  const auto r = assign(study->instance(), study->catalog().electrified_links(g), s.solver);
  io::write_flows(s.out_dir / "flows.csv", study->network(), study->instance().expanded, r.state);
  io::write_gap_trace(s.out_dir / "gap_trace.csv", r.metrics);
  std::cout << "total cost $" << total_system_cost(study->instance().costs, std::span<const double>(r.state.flow))
            << " per day, relative gap " << r.metrics.relative_gap << " after " << r.metrics.iterations
            << " iterations" << (r.metrics.converged ? "" : " (not converged)") << "\n";
  return 0;
}

void emit_run(const Study& study, const RunReport& rep, const fs::path& dir, const std::string& stem,
              std::span<const io::Overlap> tags = {}) {
  io::write_geojson(dir / (stem + ".geojson"), io::geojson(study.network(), rep.electrified_links, &rep.flows, tags));
}

int cmd_optimize(const Scenario& s) {
  const auto study = Study::load(s);
  warn(study->warnings());
  auto run = optimize(*study, {}, [](const GenerationRecord& g) {
    if (g.generation % 10 == 0) std::cerr << "generation " << g.generation << ": best $" << g.best_cost << "\n";
  });
  io::write_history(s.out_dir / "ga_history.csv", run.evolution.history);
  io::write_corridors(s.out_dir / "best_design.csv", study->network(), study->catalog().corridors(),
                      &run.report.genome);
  emit_run(*study, run.report, s.out_dir, "best_design");
  write_reports(s.out_dir / "results.csv", {run.report});
  const auto text = format_report(run.report);
  write_text(s.out_dir / "report.txt", text);
  std::cout << text;
  return 0;
}

int cmd_sweep(Scenario s, const std::string& axis, const std::vector<double>& values) {
  if (!axis.empty()) set_option(s, "sweep_axis", axis, "--axis");
  if (!values.empty()) s.sweep_values = values;
  if (s.sweep_values.empty()) s.sweep_values = {axis_value(s, s.sweep_axis)};
  const auto result = sweep(s, s.sweep_axis, s.sweep_values, load_study, [](const RunReport& r) {
    std::cerr << r.axis << " = " << r.value << ": cost $" << r.optimized_cost << "\n";
  });
  write_reports(s.out_dir / "sweep_results.csv", result.runs);
  write_overlap(s.out_dir / "sweep_overlap.csv", result);
  const auto study = load_study(s);
  const auto& base = result.runs[result.base].electrified_links;
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    const auto tags = io::overlap_tags(result.runs[k].electrified_links, base);
    emit_run(*study, result.runs[k], s.out_dir, "sweep_" + std::to_string(k), tags);
  }
  const auto text = format_sweep(result);
  write_text(s.out_dir / "sweep.txt", text);
  std::cout << text;
  return 0;
}

int cmd_report(const Scenario& s, const std::string& design) {
  const auto study = Study::load(s);
  warn(study->warnings());
  const fs::path path = design.empty() ? s.out_dir / "best_design.csv" : fs::path(design);
  const auto p = study->problem();
  auto rep = make_report(p, io::load_design(path, study->catalog()));
  echo(rep, s, SweepAxis::Budget, s.budget);
  write_reports(s.out_dir / "report.csv", {rep});
  emit_run(*study, rep, s.out_dir, "network");
  const auto text = format_report(rep);
  write_text(s.out_dir / "report.txt", text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget-constrained rail electrification planning"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("-c,--config", o.config, "Scenario config file")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--tol", o.tol, "Relative gap tolerance");
  app.add_option("--out-dir", o.out_dir, "Output directory");
  app.add_option("--threads", o.threads, "Fitness evaluation threads");
  app.add_option("--generations", o.generations, "GA generation cap");
  app.add_option("--time-limit", o.time_limit, "GA wall-clock cap in seconds, 0 for none");

  std::string design, axis;
  std::vector<double> values;
  auto* transform = app.add_subcommand("transform", "Write the mode-expanded network");
  auto* costs = app.add_subcommand("costs", "Write per-link cost profiles");
  auto* corridors = app.add_subcommand("corridors", "Write candidate corridors");
  auto* assign_cmd = app.add_subcommand("assign", "Solve one equilibrium assignment");
  assign_cmd->add_option("--design", design, "Design CSV of selected corridor ids (default: none electrified)");
  auto* optimize_cmd = app.add_subcommand("optimize", "Search for the best design under the budget");
  auto* sweep_cmd = app.add_subcommand("sweep", "Optimize at several values of one parameter");
  sweep_cmd->add_option("--axis", axis, "budget, demand, opex, electrification or electricity");
  sweep_cmd->add_option("--values", values, "Axis values")->delimiter(',');
  auto* report_cmd = app.add_subcommand("report", "Report shares and ROI for a saved design");
  report_cmd->add_option("--design", design, "Design CSV (default: <out-dir>/best_design.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Scenario s = resolve(o);
    if (*transform) return cmd_transform(s);
    if (*costs) return cmd_costs(s);
    if (*corridors) return cmd_corridors(s);
    if (*assign_cmd) return cmd_assign(s, design);
    if (*optimize_cmd) return cmd_optimize(s);
    if (*sweep_cmd) return cmd_sweep(s, axis, values);
    if (*report_cmd) return cmd_report(s, design);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
