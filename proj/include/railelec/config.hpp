#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "railelec/corridors.hpp"
#include "railelec/costmodel.hpp"
#include "railelec/csv.hpp"
#include "railelec/design.hpp"
#include "railelec/equilibrium.hpp"
#include "railelec/error.hpp"

namespace railelec {

enum class SweepAxis { Budget, Demand, Opex, Electrification, Electricity };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Budget: return "budget";
    case SweepAxis::Demand: return "demand";
    case SweepAxis::Opex: return "opex";
    case SweepAxis::Electrification: return "electrification";
    case SweepAxis::Electricity: return "electricity";
  }
  return "?";
}

/// Everything one run needs. Relative paths are resolved against the
/// directory of the config file that named them.
struct Scenario {
  std::filesystem::path nodes, links, od, corridors;
  std::filesystem::path out_dir = "out";

  double budget = 30e9;
  double demand_multiplier = 1.0;
  double opex_multiplier = 1.0;             // crew and cargo time rates
  double electrification_multiplier = 1.0;  // capital cost per link
  double electricity_multiplier = 1.0;      // electric energy price

  TrainConsist consist;
  RateTable rates;
  GAConfig ga;
  SolverOptions solver;
  CorridorMetric corridor_metric = CorridorMetric::FreeFlowCost;

  SweepAxis sweep_axis = SweepAxis::Budget;
  std::vector<double> sweep_values;  // absolute budgets or multipliers, by axis

  static constexpr double kMaxMultiplier = 5.0;

  /// Rates with the opex and electricity multipliers folded in.
  RateTable effective_rates() const {
    RateTable r = rates;
    r.crew_rate *= opex_multiplier;
    r.cargo_rate *= opex_multiplier;
    r.fuel_cost_electric *= electricity_multiplier;
    return r;
  }

  /// Copy with one axis value applied.
  Scenario at(SweepAxis axis, double value) const {
    Scenario s = *this;
    switch (axis) {
      case SweepAxis::Budget: s.budget = value; break;
      case SweepAxis::Demand: s.demand_multiplier = value; break;
      case SweepAxis::Opex: s.opex_multiplier = value; break;
      case SweepAxis::Electrification: s.electrification_multiplier = value; break;
      case SweepAxis::Electricity: s.electricity_multiplier = value; break;
    }
    s.validate();
    return s;
  }

  void validate() const {
    if (!(budget > 0.0) || !std::isfinite(budget)) throw ValidationError("scenario: budget must be a finite value > 0");
    auto mult = [](double v, const char* k) {
      if (!(v > 0.0 && v <= kMaxMultiplier))
        throw ValidationError(std::string("scenario: ") + k + " must lie in (0, 5]");
    };
    mult(demand_multiplier, "demand_multiplier");
    mult(opex_multiplier, "opex_multiplier");
    mult(electrification_multiplier, "electrification_multiplier");
    mult(electricity_multiplier, "electricity_multiplier");
    if (!(solver.tol > 0.0)) throw ValidationError("scenario: tol must be > 0");
    if (solver.max_iter < 1) throw ValidationError("scenario: max_iter must be >= 1");
    consist.validate();
    rates.validate();
    ga.validate();
  }
};

namespace config_detail {

using Setter = std::function<void(Scenario&, const std::string& value, const std::string& where,
                                  const std::filesystem::path& base)>;

inline double num(const std::string& v, const std::string& where) { return csv::parse_double(v, where); }
inline long integer(const std::string& v, const std::string& where) { return csv::parse_long(v, where); }

inline std::vector<double> list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  for (const auto& f : csv::split(v)) out.push_back(num(f, where));
  return out;
}

inline const std::map<std::string, Setter, std::less<>>& setters() {
  using P = std::filesystem::path;
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto path = [&t](const char* key, P Scenario::*member) {
      t[key] = [member](Scenario& s, const std::string& v, const std::string&, const P& base) {
        const P p(v);
        s.*member = p.is_absolute() ? p : base / p;
      };
    };
    auto dbl = [&t](const char* key, auto getter) {
      t[key] = [getter](Scenario& s, const std::string& v, const std::string& w, const P&) { getter(s) = num(v, w); };
    };
    auto int_ = [&t](const char* key, auto getter) {
      t[key] = [getter](Scenario& s, const std::string& v, const std::string& w, const P&) {
        getter(s) = static_cast<std::remove_reference_t<decltype(getter(s))>>(integer(v, w));
      };
    };

    path("nodes", &Scenario::nodes);
    path("links", &Scenario::links);
    path("od", &Scenario::od);
    path("corridors", &Scenario::corridors);
    path("out_dir", &Scenario::out_dir);

    dbl("budget", [](Scenario& s) -> double& { return s.budget; });
    dbl("demand_multiplier", [](Scenario& s) -> double& { return s.demand_multiplier; });
    dbl("opex_multiplier", [](Scenario& s) -> double& { return s.opex_multiplier; });
    dbl("electrification_multiplier", [](Scenario& s) -> double& { return s.electrification_multiplier; });
    dbl("electricity_multiplier", [](Scenario& s) -> double& { return s.electricity_multiplier; });

    dbl("tol", [](Scenario& s) -> double& { return s.solver.tol; });
    int_("max_iter", [](Scenario& s) -> int& { return s.solver.max_iter; });
    t["interaction_newton"] = [](Scenario& s, const std::string& v, const std::string& w, const P&) {
      s.solver.interaction_newton = csv::parse_bool(v, w);
    };
    t["corridor_metric"] = [](Scenario& s, const std::string& v, const std::string& w, const P&) {
      if (v == "cost") s.corridor_metric = CorridorMetric::FreeFlowCost;
      else if (v == "length") s.corridor_metric = CorridorMetric::Length;
      else throw ValidationError(w + ": expected 'cost' or 'length'");
    };

    t["seed"] = [](Scenario& s, const std::string& v, const std::string& w, const P&) {
      const long seed = integer(v, w);
      if (seed < 0) throw ValidationError(w + ": seed must be >= 0");
      s.ga.seed = static_cast<std::uint64_t>(seed);
    };
    int_("threads", [](Scenario& s) -> int& { return s.ga.threads; });
    int_("population", [](Scenario& s) -> int& { return s.ga.population; });
    int_("generations", [](Scenario& s) -> int& { return s.ga.generations; });
    int_("elites", [](Scenario& s) -> int& { return s.ga.elites; });
    dbl("crossover", [](Scenario& s) -> double& { return s.ga.crossover; });
    dbl("mutation", [](Scenario& s) -> double& { return s.ga.mutation; });
    dbl("greedy_fraction", [](Scenario& s) -> double& { return s.ga.greedy_fraction; });
    dbl("greedy_keep", [](Scenario& s) -> double& { return s.ga.greedy_keep; });
    dbl("time_limit_s", [](Scenario& s) -> double& { return s.ga.time_limit_s; });

    t["sweep_axis"] = [](Scenario& s, const std::string& v, const std::string& w, const P&) {
      for (auto a : {SweepAxis::Budget, SweepAxis::Demand, SweepAxis::Opex, SweepAxis::Electrification,
                     SweepAxis::Electricity})
        if (v == to_string(a)) {
          s.sweep_axis = a;
          return;
        }
      throw ValidationError(w + ": unknown sweep axis '" + v + "'");
    };
    t["sweep_values"] = [](Scenario& s, const std::string& v, const std::string& w, const P&) {
      s.sweep_values = list(v, w);
    };

    int_("locomotives", [](Scenario& s) -> int& { return s.consist.locomotives; });
    int_("railcars", [](Scenario& s) -> int& { return s.consist.railcars; });
    dbl("loco_mass_t", [](Scenario& s) -> double& { return s.consist.loco_mass_t; });
    dbl("car_tare_t", [](Scenario& s) -> double& { return s.consist.car_tare_t; });
    dbl("car_cargo_t", [](Scenario& s) -> double& { return s.consist.car_cargo_t; });
    int_("loco_axles", [](Scenario& s) -> int& { return s.consist.loco_axles; });
    int_("car_axles", [](Scenario& s) -> int& { return s.consist.car_axles; });
    dbl("loco_drag_k", [](Scenario& s) -> double& { return s.consist.loco_drag_k; });
    dbl("car_drag_k", [](Scenario& s) -> double& { return s.consist.car_drag_k; });

#define RAILELEC_RATE(name) dbl(#name, [](Scenario& s) -> double& { return s.rates.name; })
    RAILELEC_RATE(crew_rate);
    RAILELEC_RATE(cargo_rate);
    RAILELEC_RATE(fuel_cost_diesel);
    RAILELEC_RATE(fuel_cost_electric);
    RAILELEC_RATE(eta_diesel);
    RAILELEC_RATE(eta_electric);
    RAILELEC_RATE(k_f);
    RAILELEC_RATE(k_a);
    RAILELEC_RATE(bearing_a);
    RAILELEC_RATE(bearing_b);
    RAILELEC_RATE(flange_loco);
    RAILELEC_RATE(flange_car);
    RAILELEC_RATE(gravity);
    RAILELEC_RATE(curve_coefficient);
    RAILELEC_RATE(incidental_brake_grade);
    RAILELEC_RATE(beta);
    RAILELEC_RATE(desired_speed_mps);
    RAILELEC_RATE(min_radius_m);
    RAILELEC_RATE(max_radius_m);
    RAILELEC_RATE(throttle_min_fraction);
    RAILELEC_RATE(diesel_power_per_loco_w);
    RAILELEC_RATE(electric_power_per_loco_w);
    RAILELEC_RATE(ocs_min);
    RAILELEC_RATE(ocs_max);
    RAILELEC_RATE(substation_min);
    RAILELEC_RATE(substation_max);
    RAILELEC_RATE(transmission_min);
    RAILELEC_RATE(transmission_max);
    RAILELEC_RATE(public_works_min);
    RAILELEC_RATE(public_works_max);
    RAILELEC_RATE(switching_cost_per_train);
    RAILELEC_RATE(switching_hours);
    RAILELEC_RATE(switching_crew);
    RAILELEC_RATE(switching_electric_power_fraction);
    RAILELEC_RATE(ppi_capital);
    RAILELEC_RATE(ppi_opex);
    RAILELEC_RATE(ppi_energy);
#undef RAILELEC_RATE
    int_("throttle_notches", [](Scenario& s) -> int& { return s.rates.throttle_notches; });
    t["signal_cost_per_km"] = [](Scenario& s, const std::string& v, const std::string& w, const P&) {
      s.rates.signal_cost_per_km = list(v, w);
    };
    t["switching_mode"] = [](Scenario& s, const std::string& v, const std::string& w, const P&) {
      if (v == "fixed") s.rates.switching_mode = SwitchingMode::Fixed;
      else if (v == "composed") s.rates.switching_mode = SwitchingMode::Composed;
      else throw ValidationError(w + ": expected 'fixed' or 'composed'");
    };
    return t;
  }();
  return table;
}

struct Entry {
  std::string key, value, where;
};

inline std::vector<Entry> parse_lines(std::istream& in, const std::string& name) {
  std::vector<Entry> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = csv::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = name + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) throw ValidationError(where + ": expected 'key = value'");
    Entry e{std::string(csv::trim(body.substr(0, eq))), std::string(csv::trim(body.substr(eq + 1))), where};
    if (e.key.empty()) throw ValidationError(where + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace config_detail

/// Applies one `key = value` setting; unknown keys are rejected.
inline void set_option(Scenario& s, const std::string& key, const std::string& value, const std::string& where = "option",
                       const std::filesystem::path& base = {}) {
  const auto& table = config_detail::setters();
  auto it = table.find(key);
  if (it == table.end()) throw ValidationError(where + ": unknown key '" + key + "'");
  it->second(s, value, where + " '" + key + "'", base);
}

/// All recognised keys, sorted.
inline std::vector<std::string> option_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : config_detail::setters()) keys.push_back(k);
  keys.emplace_back("rates");
  std::sort(keys.begin(), keys.end());
  return keys;
}

/// Parses a config stream. A `rates = file` entry loads that file first, so
/// keys in this stream override it.
inline Scenario parse_scenario(std::istream& in, const std::string& name, const std::filesystem::path& base,
                               bool validate = true) {
  auto entries = config_detail::parse_lines(in, name);
  Scenario s;
  for (const auto& e : entries) {
    if (e.key != "rates") continue;
    const std::filesystem::path p = std::filesystem::path(e.value).is_absolute() ? std::filesystem::path(e.value) : base / e.value;
    std::ifstream rf(p);
    if (!rf) throw ValidationError(e.where + ": cannot open rates file '" + p.string() + "'");
    for (const auto& r : config_detail::parse_lines(rf, p.string())) {
      if (r.key == "rates") throw ValidationError(r.where + ": rates files cannot nest");
      set_option(s, r.key, r.value, r.where, p.parent_path());
    }
  }
  for (const auto& e : entries)
    if (e.key != "rates") set_option(s, e.key, e.value, e.where, base);
  if (validate) s.validate();
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& path, bool validate = true) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  return parse_scenario(in, path.string(), path.parent_path(), validate);
}

}  // namespace railelec
