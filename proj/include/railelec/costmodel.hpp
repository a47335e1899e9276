#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "railelec/error.hpp"
#include "railelec/network.hpp"

namespace railelec {

inline constexpr double kKgPerTon = 1000.0;  // metric tons throughout
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kCurveChordM = 15.24;

enum class Traction { Diesel, Electric };

inline const char* to_string(Traction t) { return t == Traction::Diesel ? "diesel" : "electric"; }

/// Representative train unit: identical locomotives and identical railcars.
struct TrainConsist {
  int locomotives = 2;
  int railcars = 100;
  double loco_mass_t = 190.0;
  double car_tare_t = 30.0;
  double car_cargo_t = 90.0;
  int loco_axles = 6;
  int car_axles = 4;
  double loco_drag_k = 1.56;  // N s^2/m^2, 1.56 conventional, 2.06 otherwise
  double car_drag_k = 1.56;

  double car_gross_t() const { return car_tare_t + car_cargo_t; }
  double train_mass_t() const { return locomotives * loco_mass_t + railcars * car_gross_t(); }
  double cargo_per_train_t() const { return railcars * car_cargo_t; }
  int vehicles() const { return locomotives + railcars; }

  void validate() const {
    if (locomotives < 0 || railcars < 0) throw ValidationError("consist: vehicle counts must be >= 0");
    if (loco_mass_t < 0 || car_tare_t < 0 || car_cargo_t < 0) throw ValidationError("consist: masses must be >= 0");
    if (loco_axles < 0 || car_axles < 0) throw ValidationError("consist: axle counts must be >= 0");
    if (loco_drag_k < 0 || car_drag_k < 0) throw ValidationError("consist: drag coefficients must be >= 0");
  }
};

enum class SwitchingMode { Fixed, Composed };

/// Every monetary and physical rate used by the cost formulas.
struct RateTable {
  double crew_rate = 100.0;   // $/hr
  double cargo_rate = 300.0;  // $/hr
  double fuel_cost_diesel = 2.2e-8;     // $/J of fuel energy
  double fuel_cost_electric = 1.94e-8;  // $/J at the wire
  double eta_diesel = 0.35;
  double eta_electric = 0.85;

  double k_f = 1.0;
  double k_a = 1.0;
  double bearing_a = 2.9;          // N/ton
  double bearing_b = 97.3;         // N per axle
  double flange_loco = 0.329;      // N s/(m ton)
  double flange_car = 0.494;       // N s/(m ton)
  double gravity = 9.80665;        // m/s^2
  double curve_coefficient = 0.4536;
  double incidental_brake_grade = 0.001;
  double beta = 4.0;

  double desired_speed_mps = 25.0;
  double min_radius_m = 300.0;
  double max_radius_m = 1.0e5;

  int throttle_notches = 8;
  double throttle_min_fraction = 0.05;
  double diesel_power_per_loco_w = 3.3e6;
  double electric_power_per_loco_w = 6.0e6;

  // Electrification capital, $ per km. Placeholders: the source publishes
  // these only in an external repository.
  double ocs_min = 200e3, ocs_max = 400e3;
  double substation_min = 80e3, substation_max = 160e3;
  double transmission_min = 50e3, transmission_max = 100e3;
  double public_works_min = 30e3, public_works_max = 120e3;
  std::vector<double> signal_cost_per_km = {20e3, 50e3, 100e3};

  double switching_cost_per_train = 3800.0;
  SwitchingMode switching_mode = SwitchingMode::Fixed;
  double switching_hours = 1.5;
  double switching_crew = 6.0;
  double switching_electric_power_fraction = 0.10;

  double ppi_capital = 1.0;
  double ppi_opex = 1.0;
  double ppi_energy = 1.0;

  double time_rate() const { return (crew_rate + cargo_rate) * ppi_opex; }
  double fuel_cost(Traction t) const {
    return (t == Traction::Diesel ? fuel_cost_diesel : fuel_cost_electric) * ppi_energy;
  }
  double efficiency(Traction t) const { return t == Traction::Diesel ? eta_diesel : eta_electric; }

  void validate() const {
    auto nonneg = [](double v, const char* k) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string("rates: '") + k + "' must be a finite value >= 0");
    };
    nonneg(crew_rate, "crew_rate");
    nonneg(cargo_rate, "cargo_rate");
    nonneg(fuel_cost_diesel, "fuel_cost_diesel");
    nonneg(fuel_cost_electric, "fuel_cost_electric");
    nonneg(k_f, "k_f");
    nonneg(k_a, "k_a");
    nonneg(switching_cost_per_train, "switching_cost_per_train");
    for (double v : {ocs_min, ocs_max, substation_min, substation_max, transmission_min, transmission_max,
                     public_works_min, public_works_max})
      nonneg(v, "electrification component");
    for (double v : signal_cost_per_km) nonneg(v, "signal_cost_per_km");
    if (!(eta_diesel > 0.0 && eta_diesel <= 1.0) || !(eta_electric > 0.0 && eta_electric <= 1.0))
      throw ValidationError("rates: efficiencies must lie in (0, 1]");
    if (!(beta > 1.0)) throw ValidationError("rates: beta must exceed 1");
    if (!(desired_speed_mps > 0.0)) throw ValidationError("rates: desired_speed_mps must be positive");
    if (!(min_radius_m > kCurveChordM && max_radius_m >= min_radius_m))
      throw ValidationError("rates: need 15.24 < min_radius_m <= max_radius_m");
    if (throttle_notches < 1) throw ValidationError("rates: throttle_notches must be >= 1");
    if (!(throttle_min_fraction > 0.0 && throttle_min_fraction <= 1.0))
      throw ValidationError("rates: throttle_min_fraction must lie in (0, 1]");
    if (!(diesel_power_per_loco_w > 0.0 && electric_power_per_loco_w > 0.0))
      throw ValidationError("rates: locomotive power must be positive");
    if (!(ppi_capital > 0.0 && ppi_opex > 0.0 && ppi_energy > 0.0)) throw ValidationError("rates: ppi factors must be positive");
  }
};

/// Discrete power levels in watts, strictly increasing.
struct ThrottleTable {
  std::vector<double> power_w;

  static ThrottleTable uniform(double max_power_w, int notches, double min_fraction) {
    ThrottleTable t;
    for (int k = 0; k < notches; ++k) {
      const double f = notches == 1 ? 1.0 : min_fraction + (1.0 - min_fraction) * k / (notches - 1);
      t.power_w.push_back(f * max_power_w);
    }
    t.validate();
    return t;
  }

  static ThrottleTable for_traction(Traction tr, const TrainConsist& c, const RateTable& r) {
    const double per_loco = tr == Traction::Diesel ? r.diesel_power_per_loco_w : r.electric_power_per_loco_w;
    return uniform(per_loco * std::max(1, c.locomotives), r.throttle_notches, r.throttle_min_fraction);
  }

  double min_power() const { return power_w.front(); }
  double max_power() const { return power_w.back(); }

  void validate() const {
    if (power_w.empty()) throw ValidationError("throttle table is empty");
    if (!(power_w.front() > 0.0)) throw ValidationError("throttle powers must be positive");
    for (std::size_t i = 1; i < power_w.size(); ++i)
      if (!(power_w[i] > power_w[i - 1])) throw ValidationError("throttle powers must be strictly increasing");
  }
};

/// Track properties entering the resistance formula.
struct TrackSegment {
  double length_km = 1.0;
  double grade = 0.0;
  double curve_radius_m = kInf;
  double k_f = 1.0;
  double k_a = 1.0;
};

// ---- resistance components (newtons) ----

inline double bearing_resistance(const TrainConsist& c, const RateTable& r = {}) {
  return c.locomotives * (r.bearing_a * c.loco_mass_t + r.bearing_b * c.loco_axles) +
         c.railcars * (r.bearing_a * c.car_gross_t() + r.bearing_b * c.car_axles);
}

inline double flange_resistance(double v, const TrainConsist& c, double k_f, const RateTable& r = {}) {
  return k_f * v * (r.flange_loco * c.locomotives + r.flange_car * c.railcars);
}

inline double air_resistance(double v, const TrainConsist& c, double k_a) {
  return k_a * v * v * (c.locomotives * c.loco_drag_k + c.railcars * c.car_drag_k);
}

inline double grade_resistance(double mass_t, double grade, const RateTable& r = {}) {
  return mass_t * kKgPerTon * r.gravity * grade;
}

inline double curve_resistance(double mass_t, double radius_m, const RateTable& r = {}) {
  if (std::isinf(radius_m)) return 0.0;
  if (!(radius_m > kCurveChordM)) throw ValidationError("curve radius must exceed 15.24 m");
  return r.curve_coefficient * mass_t * kKgPerTon * r.gravity * std::asin(kCurveChordM / radius_m);
}

inline double inertial_resistance(double mass_t, double accel_mps2 = 0.0) { return mass_t * kKgPerTon * accel_mps2; }

inline double incidental_brake(double mass_t, const RateTable& r = {}) {
  return r.incidental_brake_grade * mass_t * kKgPerTon * r.gravity;
}

/// Bearing, flange, air, grade and curve terms: everything except brake and inertia.
inline double running_resistance(const TrackSegment& s, const TrainConsist& c, double v, const RateTable& r) {
  const double m = c.train_mass_t();
  return bearing_resistance(c, r) + flange_resistance(v, c, s.k_f, r) + air_resistance(v, c, s.k_a) +
         grade_resistance(m, s.grade, r) + curve_resistance(m, s.curve_radius_m, r);
}

/// Grade below which minimum throttle would push the train past its desired
/// speed even with incidental braking.
inline double brake_threshold_grade(const TrackSegment& s, const TrainConsist& c, const RateTable& r,
                                    double min_power_w, double v_desired) {
  TrackSegment flat = s;
  flat.grade = 0.0;
  const double m = c.train_mass_t();
  const double other = running_resistance(flat, c, v_desired, r) + incidental_brake(m, r);
  return (min_power_w / v_desired - other) / (m * kKgPerTon * r.gravity);
}

inline double brake_resistance(const TrackSegment& s, const TrainConsist& c, const RateTable& r,
                               double min_power_w, double v_desired) {
  const double m = c.train_mass_t();
  if (m <= 0.0) return 0.0;
  const double threshold = std::min(0.0, brake_threshold_grade(s, c, r, min_power_w, v_desired));
  if (s.grade >= threshold) return incidental_brake(m, r);
  return min_power_w / v_desired - running_resistance(s, c, v_desired, r);
}

inline double total_resistance(const TrackSegment& s, const TrainConsist& c, double v, const RateTable& r,
                               double brake_n, double accel_mps2 = 0.0) {
  return running_resistance(s, c, v, r) + brake_n + inertial_resistance(c.train_mass_t(), accel_mps2);
}

struct PowerSpeed {
  double power_w = 0.0;
  double speed_mps = 0.0;
  double t0_hr = 0.0;
  std::size_t notch = 0;
  bool power_limited = false;
};

/// Picks the lowest notch that reaches the desired speed, otherwise the top
/// notch at the speed where R(v) v equals its power.
inline PowerSpeed solve_power_speed(const TrackSegment& s, const TrainConsist& c, const RateTable& r,
                                    const ThrottleTable& throttle, double v_desired) {
  if (!(v_desired > 0.0)) throw ValidationError("solve_power_speed: desired speed must be positive");
  throttle.validate();
  const double brake = brake_resistance(s, c, r, throttle.min_power(), v_desired);
  auto demand = [&](double v) { return total_resistance(s, c, v, r, brake) * v; };
  const double at_desired = demand(v_desired);
  const double seconds = s.length_km * 1000.0;
  for (std::size_t k = 0; k < throttle.power_w.size(); ++k) {
    if (at_desired <= throttle.power_w[k])
      return {throttle.power_w[k], v_desired, seconds / v_desired / kSecondsPerHour, k, false};
  }
  const double p = throttle.max_power();
  double lo = std::min(0.1, v_desired);
  double hi = v_desired;
  if (demand(lo) >= p) throw ValidationError("link is impassable: no throttle notch sustains positive speed");
  for (int it = 0; it < 200 && hi - lo > 1e-8; ++it) {
    const double mid = 0.5 * (lo + hi);
    (demand(mid) < p ? lo : hi) = mid;
  }
  // hi sits on the side where demand >= p; lo keeps demand < p. Take the
  // endpoint with the smaller residual.
  const double v = std::abs(demand(lo) - p) <= std::abs(demand(hi) - p) ? lo : hi;
  return {p, v, seconds / v / kSecondsPerHour, throttle.power_w.size() - 1, true};
}

// ---- link performance ----

inline double congestion_time(double t0, double flow, double capacity, double beta = 4.0) {
  return t0 * (1.0 + std::pow(flow / capacity, beta));
}

struct TractionProfile {
  double power_w = 0.0;
  double speed_mps = 0.0;
  double t0_hr = 0.0;
  double fuel_cost_per_ton = 0.0;  // separable part, $/ton
};

/// Precomputed cost-function coefficients for one physical link.
struct LinkCostProfile {
  TractionProfile diesel;
  TractionProfile electric;
  double congestion_t0_hr = 0.0;        // free-flow time shared by both traction arcs
  double congestion_cost_per_ton = 0.0; // free-flow time cost, $/ton
  double capacity_tpd = 1.0;
  double tons_per_train = 1.0;

  const TractionProfile& traction(Traction t) const { return t == Traction::Diesel ? diesel : electric; }
};

/// Cost per ton on one traction arc: the shared congestion part over the pair's
/// summed flow plus that traction's fixed fuel part.
inline double generalized_cost(const LinkCostProfile& p, double x_diesel, double x_electric, Traction t,
                               double beta = 4.0) {
  if (x_diesel < 0.0 || x_electric < 0.0) throw ValidationError("generalized_cost: flows must be >= 0");
  const double shared = p.congestion_cost_per_ton * (1.0 + std::pow((x_diesel + x_electric) / p.capacity_tpd, beta));
  return shared + p.traction(t).fuel_cost_per_ton;
}

inline TractionProfile traction_profile(const TrackSegment& s, const TrainConsist& c, const RateTable& r,
                                        Traction t, double v_desired) {
  const auto throttle = ThrottleTable::for_traction(t, c, r);
  const auto ps = solve_power_speed(s, c, r, throttle, v_desired);
  const double energy_j = ps.power_w / r.efficiency(t) * ps.t0_hr * kSecondsPerHour;
  return {ps.power_w, ps.speed_mps, ps.t0_hr, energy_j * r.fuel_cost(t) / c.cargo_per_train_t()};
}

struct AlphaRange {
  double min = 1.0;
  double max = 1.0;

  static AlphaRange of(const RailNetwork& net) {
    AlphaRange a{kInf, -kInf};
    for (const auto& l : net.links()) {
      a.min = std::min(a.min, l.alpha);
      a.max = std::max(a.max, l.alpha);
    }
    if (net.links().empty()) a = {1.0, 1.0};
    return a;
  }

  /// Terrain difficulty in [0, 1]; zero when the network is uniform.
  double lambda(double alpha) const {
    if (!(max > min)) return 0.0;
    return std::clamp((alpha - min) / (max - min), 0.0, 1.0);
  }
};

inline double radius_from_alpha(double alpha, const AlphaRange& range, const RateTable& r) {
  return r.max_radius_m - range.lambda(alpha) * (r.max_radius_m - r.min_radius_m);
}

inline TrackSegment track_segment(const PhysicalLink& l, const AlphaRange& range, const RateTable& r) {
  TrackSegment s;
  s.length_km = l.length_km;
  s.grade = l.grade;
  s.curve_radius_m = l.curve_radius_m > 0.0 ? l.curve_radius_m : radius_from_alpha(l.alpha, range, r);
  s.k_f = l.k_f.value_or(r.k_f);
  s.k_a = l.k_a.value_or(r.k_a);
  return s;
}

inline LinkCostProfile link_cost_profile(const PhysicalLink& l, const AlphaRange& range, const TrainConsist& c,
                                         const RateTable& r) {
  if (!(c.cargo_per_train_t() > 0.0)) throw ValidationError("consist carries no cargo; per-ton costs undefined");
  const auto seg = track_segment(l, range, r);
  const double v = l.desired_speed_mps.value_or(r.desired_speed_mps);
  LinkCostProfile p;
  try {
    p.diesel = traction_profile(seg, c, r, Traction::Diesel, v);
    p.electric = traction_profile(seg, c, r, Traction::Electric, v);
  } catch (const ValidationError& e) {
    throw ValidationError("link " + std::to_string(l.id) + ": " + e.what());
  }
  p.congestion_t0_hr = p.diesel.t0_hr;
  p.congestion_cost_per_ton = p.congestion_t0_hr * r.time_rate() / c.cargo_per_train_t();
  p.capacity_tpd = l.capacity_tpd;
  p.tons_per_train = c.cargo_per_train_t();
  return p;
}

inline std::vector<LinkCostProfile> link_cost_profiles(const RailNetwork& net, const TrainConsist& c,
                                                       const RateTable& r) {
  c.validate();
  r.validate();
  const auto range = AlphaRange::of(net);
  std::vector<LinkCostProfile> out;
  out.reserve(net.links().size());
  for (const auto& l : net.links()) out.push_back(link_cost_profile(l, range, c, r));
  return out;
}

// ---- capital and switching ----

inline double electrification_cost(const PhysicalLink& l, const RateTable& r, double alpha_min, double alpha_max) {
  const AlphaRange range{alpha_min, alpha_max};
  const double lambda = range.lambda(l.alpha);
  const double hi = r.ocs_max + r.substation_max + r.transmission_max + r.public_works_max;
  const double lo = r.ocs_min + r.substation_min + r.transmission_min + r.public_works_min;
  if (l.signal_class < 0 || static_cast<std::size_t>(l.signal_class) >= r.signal_cost_per_km.size())
    throw ValidationError("link " + std::to_string(l.id) + ": unknown signal class " + std::to_string(l.signal_class));
  const double signal = r.signal_cost_per_km[l.signal_class];
  return l.length_km * (lambda * hi + (1.0 - lambda) * lo + signal) * r.ppi_capital;
}

inline std::vector<double> electrification_costs(const RailNetwork& net, const RateTable& r) {
  const auto range = AlphaRange::of(net);
  std::vector<double> out;
  out.reserve(net.links().size());
  for (const auto& l : net.links()) out.push_back(electrification_cost(l, r, range.min, range.max));
  return out;
}

/// $ per train for one locomotive swap.
inline double switching_cost_per_train(const RateTable& r, const TrainConsist& c) {
  if (r.switching_mode == SwitchingMode::Fixed) return r.switching_cost_per_train;
  const double seconds = r.switching_hours * kSecondsPerHour;
  const auto diesel = ThrottleTable::for_traction(Traction::Diesel, c, r);
  const double electric_max = r.electric_power_per_loco_w * std::max(1, c.locomotives);
  const double energy = seconds * (diesel.min_power() / r.eta_diesel * r.fuel_cost(Traction::Diesel) +
                                   r.switching_electric_power_fraction * electric_max / r.eta_electric *
                                       r.fuel_cost(Traction::Electric));
  return r.switching_hours * (r.switching_crew * r.crew_rate + r.cargo_rate) * r.ppi_opex + energy;
}

inline double switching_cost_per_ton(const RateTable& r, const TrainConsist& c) {
  if (!(c.cargo_per_train_t() > 0.0)) throw ValidationError("consist carries no cargo; per-ton costs undefined");
  return switching_cost_per_train(r, c) / c.cargo_per_train_t();
}

}  // namespace railelec
