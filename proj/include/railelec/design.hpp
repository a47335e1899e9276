#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "railelec/assignment.hpp"
#include "railelec/corridors.hpp"
#include "railelec/error.hpp"

namespace railelec {

/// One bit per candidate corridor.
using Genome = std::vector<char>;

/// Corridors plus per-link capital costs; answers every budget question about
/// a genome. Shared links are charged once.
class CorridorCatalog {
 public:
  CorridorCatalog(std::vector<Corridor> corridors, std::vector<double> link_costs, std::vector<double> link_km)
      : corridors_(std::move(corridors)), link_costs_(std::move(link_costs)), link_km_(std::move(link_km)) {
    if (link_costs_.size() != link_km_.size()) throw ValidationError("catalog: cost and length vectors differ in size");
    for (const auto& c : corridors_)
      for (auto l : c.links)
        if (l >= link_costs_.size()) throw ValidationError("catalog: corridor references an unknown link");
  }

  std::size_t size() const { return corridors_.size(); }
  std::size_t num_links() const { return link_costs_.size(); }
  const std::vector<Corridor>& corridors() const { return corridors_; }
  const Corridor& operator[](std::size_t i) const { return corridors_[i]; }
  const std::vector<double>& link_costs() const { return link_costs_; }

  std::vector<char> electrified_links(const Genome& g) const {
    check(g);
    std::vector<char> mask(link_costs_.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g[i])
        for (auto l : corridors_[i].links) mask[l] = 1;
    return mask;
  }

  double union_cost(const Genome& g) const {
    const auto mask = electrified_links(g);
    double total = 0.0;
    for (std::size_t l = 0; l < mask.size(); ++l)
      if (mask[l]) total += link_costs_[l];
    return total;
  }

  double electrified_km(const Genome& g) const {
    const auto mask = electrified_links(g);
    double km = 0.0;
    for (std::size_t l = 0; l < mask.size(); ++l)
      if (mask[l]) km += link_km_[l];
    return km;
  }

  void check(const Genome& g) const {
    if (g.size() != corridors_.size())
      throw ValidationError("design has " + std::to_string(g.size()) + " bits for " + std::to_string(corridors_.size()) +
                            " corridors");
  }

 private:
  std::vector<Corridor> corridors_;
  std::vector<double> link_costs_;
  std::vector<double> link_km_;
};

struct CatalogBuild {
  CorridorCatalog catalog;
  std::vector<std::string> warnings;
};

/// Electrification costs per link (scaled by `cost_multiplier`) and the
/// candidate corridors over them.
inline CatalogBuild build_catalog(const RailNetwork& net, const RateTable& rates,
                                  std::span<const LinkCostProfile> profiles, CorridorMetric metric,
                                  double cost_multiplier = 1.0) {
  auto costs = electrification_costs(net, rates);
  for (auto& c : costs) c *= cost_multiplier;
  auto set = candidate_corridors(net, corridor_weights(net, metric, profiles), costs);
  std::vector<double> km;
  for (const auto& l : net.links()) km.push_back(l.length_km);
  return {CorridorCatalog(std::move(set.corridors), std::move(costs), std::move(km)), std::move(set.warnings)};
}

/// Drops selected corridors, lowest score first, until the union cost fits.
/// Ties remove the costlier corridor, then the higher index.
inline Genome repair(Genome g, const CorridorCatalog& cat, double budget, std::span<const double> scores) {
  cat.check(g);
  if (scores.size() != cat.size()) throw ValidationError("repair: one score per corridor required");
  while (cat.union_cost(g) > budget) {
    std::optional<std::size_t> worst;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g[i]) continue;
      if (!worst) {
        worst = i;
        continue;
      }
      const std::size_t w = *worst;
      if (scores[i] < scores[w] || (scores[i] == scores[w] && cat[i].cost >= cat[w].cost)) worst = i;
    }
    if (!worst) break;  // nothing selected; only possible with a negative budget
    g[*worst] = 0;
  }
  return g;
}

struct GAConfig {
  int population = 64;
  int generations = 200;
  double crossover = 0.9;
  double mutation = -1.0;  // per bit; negative means 1 / corridors
  int elites = 2;
  std::uint64_t seed = 1;
  int threads = 1;
  double greedy_fraction = 0.25;  // share of randomized-greedy individuals in the seed population
  double greedy_keep = 0.7;       // chance a randomized greedy pass takes an affordable corridor
  double time_limit_s = 0.0;      // 0 = no limit

  void validate() const {
    if (population < 2) throw ValidationError("ga: population must be >= 2");
    if (generations < 0) throw ValidationError("ga: generations must be >= 0");
    auto prob = [](double p, const char* k) {
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string("ga: ") + k + " must lie in [0, 1]");
    };
    prob(crossover, "crossover");
    if (mutation >= 0.0) prob(mutation, "mutation");
    prob(greedy_fraction, "greedy_fraction");
    prob(greedy_keep, "greedy_keep");
    if (elites < 0 || elites > population) throw ValidationError("ga: elites must lie in [0, population]");
    if (threads < 1) throw ValidationError("ga: threads must be >= 1");
    if (time_limit_s < 0.0) throw ValidationError("ga: time limit must be >= 0");
  }
};

struct EvaluatedDesign {
  Genome genome;
  double cost = kInf;  // total system cost, $/day; +inf when the assignment is infeasible
  double electrified_share = 0.0;
  double gap = 0.0;
  double budget_used = 0.0;
  double electrified_km = 0.0;
  bool feasible = false;
};

struct GenerationRecord {
  int generation = 0;
  double best_cost = kInf;
  double mean_cost = kInf;
  double budget_used = 0.0;
  double electrified_km = 0.0;
};

struct EvolutionResult {
  EvaluatedDesign best;
  std::vector<GenerationRecord> history;
  std::size_t evaluations = 0;  // distinct genomes solved
};

/// Upper-level problem: evaluate designs by equilibrium assignment under a budget.
class DesignProblem {
 public:
  DesignProblem(const AssignmentInstance& inst, CorridorCatalog catalog, double budget, SolverOptions solver = {})
      : inst_(inst), catalog_(std::move(catalog)), budget_(budget), solver_(std::move(solver)) {
    if (!(budget_ >= 0.0)) throw ValidationError("budget must be >= 0");
    if (catalog_.num_links() != inst_.expanded.num_links())
      throw ValidationError("catalog and network disagree on the number of links");
    solver_.on_shift = nullptr;
    // Electric arcs never add connectivity, so an infeasible baseline means
    // every design is infeasible; let the error reach the caller.
    const Genome empty(catalog_.size(), 0);
    const auto r = assign(inst_, catalog_.electrified_links(empty), solver_);
    baseline_ = summarize(empty, r);
    base_flow_ = aggregate(inst_.expanded, r.state.flow).total;
    compute_scores();
  }

  const CorridorCatalog& catalog() const { return catalog_; }
  const AssignmentInstance& instance() const { return inst_; }
  double budget() const { return budget_; }
  const EvaluatedDesign& baseline() const { return baseline_; }
  const std::vector<double>& baseline_link_flows() const { return base_flow_; }
  const std::vector<double>& repair_scores() const { return scores_; }
  const std::vector<double>& densities() const { return density_; }

  /// Total system cost of one design; thread-safe.
  EvaluatedDesign evaluate(const Genome& g) const {
    try {
      return summarize(g, assign(inst_, catalog_.electrified_links(g), solver_));
    } catch (const InfeasibleError&) {
      EvaluatedDesign e;
      e.genome = g;
      e.budget_used = catalog_.union_cost(g);
      e.electrified_km = catalog_.electrified_km(g);
      return e;
    }
  }

  /// Equilibrium flows of one design, for reporting.
  EquilibriumResult solve(const Genome& g) const { return assign(inst_, catalog_.electrified_links(g), solver_); }

  Genome repair(Genome g) const { return railelec::repair(std::move(g), catalog_, budget_, scores_); }

 private:
  EvaluatedDesign summarize(const Genome& g, const EquilibriumResult& r) const {
    EvaluatedDesign e;
    e.genome = g;
    e.budget_used = catalog_.union_cost(g);
    e.electrified_km = catalog_.electrified_km(g);
    e.cost = total_system_cost(inst_.costs, std::span<const double>(r.state.flow));
    e.electrified_share = electrified_tonnage_share(*inst_.network, inst_.expanded, r.state.flow);
    e.gap = r.metrics.relative_gap;
    e.feasible = true;
    return e;
  }

  void compute_scores() {
    const auto& links = inst_.network->links();
    scores_.assign(catalog_.size(), 0.0);
    density_.assign(catalog_.size(), 0.0);
    for (std::size_t i = 0; i < catalog_.size(); ++i) {
      const auto& c = catalog_[i];
      double saving = 0.0, ton_km = 0.0;
      for (auto l : c.links) {
        const auto& p = inst_.profiles[l];
        saving += (p.diesel.fuel_cost_per_ton - p.electric.fuel_cost_per_ton) * base_flow_[l];
        ton_km += base_flow_[l] * links[l].length_km;
      }
      scores_[i] = c.cost > 0.0 ? saving / c.cost : (saving > 0.0 ? kInf : 0.0);
      density_[i] = c.cost > 0.0 ? ton_km / c.cost : (ton_km > 0.0 ? kInf : 0.0);
    }
  }

  const AssignmentInstance& inst_;
  CorridorCatalog catalog_;
  double budget_;
  SolverOptions solver_;
  EvaluatedDesign baseline_;
  std::vector<double> base_flow_;
  std::vector<double> scores_;
  std::vector<double> density_;
};

/// Corridor indices by descending baseline tonnage-km per dollar, ties by index.
inline std::vector<std::size_t> density_order(const DesignProblem& p) {
  std::vector<std::size_t> order(p.catalog().size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& d = p.densities();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
  return order;
}

/// Walks the density ranking and takes each corridor that still fits; with
/// `keep < 1` an affordable corridor is taken only with that probability.
template <class Rng>
Genome greedy_design(const DesignProblem& p, double keep, Rng& rng) {
  Genome g(p.catalog().size(), 0);
  std::bernoulli_distribution take(keep);
  for (std::size_t i : density_order(p)) {
    g[i] = 1;
    if (p.catalog().union_cost(g) > p.budget() || (keep < 1.0 && !take(rng))) g[i] = 0;
  }
  return g;
}

/// Empty design, pure greedy, randomized greedy share, then random fill; all repaired.
template <class Rng>
std::vector<Genome> seed_population(const DesignProblem& p, const GAConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = p.catalog().size();
  std::vector<Genome> pop;
  pop.push_back(Genome(n, 0));
  if (static_cast<int>(pop.size()) < cfg.population) pop.push_back(greedy_design(p, 1.0, rng));
  const int greedy = static_cast<int>(cfg.greedy_fraction * cfg.population);
  for (int k = 0; k < greedy && static_cast<int>(pop.size()) < cfg.population; ++k)
    pop.push_back(greedy_design(p, cfg.greedy_keep, rng));
  std::bernoulli_distribution bit(0.5);
  while (static_cast<int>(pop.size()) < cfg.population) {
    Genome g(n);
    for (auto& b : g) b = bit(rng);
    pop.push_back(p.repair(std::move(g)));
  }
  return pop;
}

/// Evaluates genomes in parallel, remembering every result by genome.
class FitnessCache {
 public:
  explicit FitnessCache(const DesignProblem& p, int threads = 1) : p_(p), threads_(std::max(1, threads)) {}

  std::vector<EvaluatedDesign> evaluate(const std::vector<Genome>& genomes) {
    std::vector<Genome> todo;
    for (const auto& g : genomes)
      if (!cache_.count(g) && std::find(todo.begin(), todo.end(), g) == todo.end()) todo.push_back(g);
    std::vector<EvaluatedDesign> results(todo.size());
    std::size_t next = 0;
    std::mutex m;
    std::exception_ptr failure;
    auto worker = [&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(m);
          if (next >= todo.size() || failure) return;
          i = next++;
        }
        try {
          results[i] = p_.evaluate(todo[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          failure = std::current_exception();
        }
      }
    };
    const int workers = std::min<int>(threads_, static_cast<int>(todo.size()));
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], std::move(results[i]));
    std::vector<EvaluatedDesign> out;
    out.reserve(genomes.size());
    for (const auto& g : genomes) out.push_back(cache_.at(g));
    return out;
  }

  std::size_t size() const { return cache_.size(); }

 private:
  const DesignProblem& p_;
  int threads_;
  std::map<Genome, EvaluatedDesign> cache_;
};

namespace detail {

/// Strict ordering for selection: cost, then fewer bits, then genome order.
inline bool better(const EvaluatedDesign& a, const EvaluatedDesign& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  const auto ones = [](const Genome& g) { return std::count(g.begin(), g.end(), 1); };
  if (ones(a.genome) != ones(b.genome)) return ones(a.genome) < ones(b.genome);
  return a.genome < b.genome;
}

inline GenerationRecord summarize(int gen, const EvaluatedDesign& best, const std::vector<EvaluatedDesign>& pop) {
  double sum = 0.0;
  int finite = 0;
  for (const auto& e : pop)
    if (std::isfinite(e.cost)) {
      sum += e.cost;
      ++finite;
    }
  return {gen, best.cost, finite ? sum / finite : kInf, best.budget_used, best.electrified_km};
}

}  // namespace detail

/// Generational GA: tournament of two, uniform crossover, bit-flip mutation,
/// repair, elitism. Deterministic for a fixed seed regardless of thread count.
inline EvolutionResult evolve(const DesignProblem& p, const GAConfig& cfg,
                              std::function<void(const GenerationRecord&)> on_generation = nullptr) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = p.catalog().size();
  const double mutation = cfg.mutation >= 0.0 ? cfg.mutation : (n ? 1.0 / static_cast<double>(n) : 0.0);

  FitnessCache cache(p, cfg.threads);
  auto pop = cache.evaluate(seed_population(p, cfg, rng));
  EvolutionResult out;
  out.best = *std::min_element(pop.begin(), pop.end(), detail::better);
  out.history.push_back(detail::summarize(0, out.best, pop));
  if (on_generation) on_generation(out.history.back());

  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    if (cfg.time_limit_s > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > cfg.time_limit_s)
      break;
    auto ranked = pop;
    std::stable_sort(ranked.begin(), ranked.end(), detail::better);
    std::vector<Genome> next;
    for (int e = 0; e < cfg.elites; ++e) next.push_back(ranked[e].genome);
    auto tournament = [&]() -> const Genome& {
      const std::size_t a = pick(rng), b = pick(rng);
      return detail::better(pop[b], pop[a]) ? pop[b].genome : pop[a].genome;
    };
    while (static_cast<int>(next.size()) < cfg.population) {
      const Genome& mom = tournament();
      const Genome& dad = tournament();
      Genome child = mom;
      if (u01(rng) < cfg.crossover)
        for (std::size_t i = 0; i < n; ++i)
          if (u01(rng) < 0.5) child[i] = dad[i];
      for (std::size_t i = 0; i < n; ++i)
        if (u01(rng) < mutation) child[i] = !child[i];
      next.push_back(p.repair(std::move(child)));
    }
    pop = cache.evaluate(next);
    for (const auto& e : pop)
      if (detail::better(e, out.best)) out.best = e;
    out.history.push_back(detail::summarize(gen, out.best, pop));
    if (on_generation) on_generation(out.history.back());
  }
  out.evaluations = cache.size();
  return out;
}

/// Exhaustive search over every budget-feasible design; at most 20 corridors.
inline EvaluatedDesign brute_force(const DesignProblem& p, int threads = 1) {
  const std::size_t n = p.catalog().size();
  if (n > 20) throw ValidationError("brute_force: at most 20 corridors, got " + std::to_string(n));
  std::vector<Genome> feasible;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Genome g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = (mask >> i) & 1u;
    if (p.catalog().union_cost(g) <= p.budget()) feasible.push_back(std::move(g));
  }
  FitnessCache cache(p, threads);
  const auto all = cache.evaluate(feasible);
  return *std::min_element(all.begin(), all.end(), detail::better);
}

}  // namespace railelec
