#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "railelec/costmodel.hpp"
#include "railelec/error.hpp"
#include "railelec/graph.hpp"
#include "railelec/network.hpp"

namespace railelec {

/// Arc cost mapping whose Jacobian is symmetric and couples each arc with at
/// most one partner. Arcs sharing a coupling form a group; a group's potential
/// is the line integral of its costs from zero flow, and the sum of all group
/// potentials is the Beckmann objective. Group functions take the group leader,
/// the lower index of the pair (or the arc itself when uncoupled).
template <class M>
concept SymmetricCostModel = requires(const M& m, ArcIndex a, std::span<const double> x, double d) {
  { m.num_arcs() } -> std::convertible_to<std::size_t>;
  { m.partner(a) } -> std::convertible_to<ArcIndex>;
  { m.cost(a, x) } -> std::convertible_to<double>;
  { m.own_derivative(a, x) } -> std::convertible_to<double>;
  { m.cross_derivative(a, x) } -> std::convertible_to<double>;
  { m.group_potential(a, x) } -> std::convertible_to<double>;
  { m.group_potential_change(a, x, d, d) } -> std::convertible_to<double>;
};

template <SymmetricCostModel M>
ArcIndex group_leader(const M& m, ArcIndex a) {
  const ArcIndex p = m.partner(a);
  return p != kNoArc && p < a ? p : a;
}

/// b^n - a^n for integer n >= 1 written as (b - a) times a positive sum, so a
/// small step does not cancel against the large powers.
inline double power_difference(double a, double delta, int n) {
  const double b = a + delta;
  double sum = 0.0;
  double bp = 1.0;
  for (int k = 0; k < n; ++k) {
    sum += bp * std::pow(a, n - 1 - k);
    bp *= b;
  }
  return delta * sum;
}

/// Rail traction costs: each traction arc of link i costs
///   C_i (1 + (X_i / u_i)^beta) + F_arc,   X_i = x_diesel + x_electric,
/// switch arcs cost a fixed F, connectors cost nothing.
class RailArcCosts {
 public:
  struct ArcTerm {
    long pair = -1;  // index into pairs, -1 when separable
    double fixed = 0.0;
  };
  struct PairTerm {
    ArcIndex diesel = kNoArc;
    ArcIndex electric = kNoArc;
    double congestion = 0.0;  // C_i, $/ton at free flow
    double capacity = 1.0;    // u_i, tons/day
  };

  RailArcCosts(std::vector<ArcTerm> arcs, std::vector<PairTerm> pairs, double beta)
      : arcs_(std::move(arcs)), pairs_(std::move(pairs)), beta_(beta) {
    if (!(beta_ > 1.0)) throw ValidationError("RailArcCosts: beta must exceed 1");
    integer_exponent_ = std::floor(beta_) == beta_ && beta_ < 64.0;
    partner_.assign(arcs_.size(), kNoArc);
    for (const auto& p : pairs_) {
      if (!(p.capacity > 0.0) || p.congestion < 0.0) throw ValidationError("RailArcCosts: bad pair term");
      partner_.at(p.diesel) = p.electric;
      partner_.at(p.electric) = p.diesel;
    }
  }

  static RailArcCosts from_network(const ExpandedNetwork& x, std::span<const LinkCostProfile> profiles,
                                   double beta) {
    if (profiles.size() != x.num_links()) throw ValidationError("RailArcCosts: one profile per link required");
    std::vector<ArcTerm> arcs(x.arcs.size());
    std::vector<PairTerm> pairs(x.num_links());
    for (std::size_t i = 0; i < x.num_links(); ++i) {
      const auto& p = profiles[i];
      pairs[i] = {x.pairs[i].diesel, x.pairs[i].electric, p.congestion_cost_per_ton, p.capacity_tpd};
      arcs[x.pairs[i].diesel] = {static_cast<long>(i), p.diesel.fuel_cost_per_ton};
      arcs[x.pairs[i].electric] = {static_cast<long>(i), p.electric.fuel_cost_per_ton};
    }
    for (const auto& a : x.arcs)
      if (a.kind == ArcKind::Switch) arcs[a.id] = {-1, a.fixed_cost};
    return RailArcCosts(std::move(arcs), std::move(pairs), beta);
  }

  std::size_t num_arcs() const { return arcs_.size(); }
  ArcIndex partner(ArcIndex a) const { return partner_[a]; }
  double beta() const { return beta_; }
  double fixed(ArcIndex a) const { return arcs_[a].fixed; }

  double pair_flow(const PairTerm& p, std::span<const double> x) const { return x[p.diesel] + x[p.electric]; }

  /// Shared congestion part c'(X) of arc a; zero for separable arcs.
  double congestion(ArcIndex a, std::span<const double> x) const {
    if (arcs_[a].pair < 0) return 0.0;
    const auto& p = pairs_[arcs_[a].pair];
    return p.congestion * (1.0 + ratio_pow(pair_flow(p, x) / p.capacity));
  }

  double cost(ArcIndex a, std::span<const double> x) const { return congestion(a, x) + arcs_[a].fixed; }

  double own_derivative(ArcIndex a, std::span<const double> x) const { return congestion_slope(a, x); }
  double cross_derivative(ArcIndex a, std::span<const double> x) const { return congestion_slope(a, x); }

  double group_potential(ArcIndex leader, std::span<const double> x) const {
    const auto& t = arcs_[leader];
    if (t.pair < 0) return t.fixed * x[leader];
    const auto& p = pairs_[t.pair];
    const double big_x = pair_flow(p, x);
    const double integral =
        p.congestion * (big_x + big_x * ratio_pow(big_x / p.capacity) / (beta_ + 1.0));
    return integral + arcs_[p.diesel].fixed * x[p.diesel] + arcs_[p.electric].fixed * x[p.electric];
  }

  double group_potential_change(ArcIndex leader, std::span<const double> x, double d_leader,
                                double d_partner) const {
    const auto& t = arcs_[leader];
    if (t.pair < 0) return t.fixed * d_leader;
    const auto& p = pairs_[t.pair];
    const double d_diesel = leader == p.diesel ? d_leader : d_partner;
    const double d_electric = leader == p.diesel ? d_partner : d_leader;
    const double x0 = pair_flow(p, x);
    const double delta = d_diesel + d_electric;
    double power_part = 0.0;
    if (integer_exponent_) {
      const int n = static_cast<int>(beta_) + 1;
      power_part = power_difference(x0, delta, n) / std::pow(p.capacity, beta_) / (beta_ + 1.0);
    } else {
      const double x1 = x0 + delta;
      power_part = (x1 * ratio_pow(x1 / p.capacity) - x0 * ratio_pow(x0 / p.capacity)) / (beta_ + 1.0);
    }
    return p.congestion * (delta + power_part) + arcs_[p.diesel].fixed * d_diesel +
           arcs_[p.electric].fixed * d_electric;
  }

 private:
  double ratio_pow(double r) const {
    if (beta_ == 4.0) {
      const double r2 = r * r;
      return r2 * r2;
    }
    return std::pow(r, beta_);
  }

  double congestion_slope(ArcIndex a, std::span<const double> x) const {
    if (arcs_[a].pair < 0) return 0.0;
    const auto& p = pairs_[arcs_[a].pair];
    const double r = pair_flow(p, x) / p.capacity;
    return p.congestion * beta_ * std::pow(r, beta_ - 1.0) / p.capacity;
  }

  std::vector<ArcTerm> arcs_;
  std::vector<PairTerm> pairs_;
  std::vector<ArcIndex> partner_;
  double beta_ = 4.0;
  bool integer_exponent_ = true;
};

}  // namespace railelec
