#pragma once
// SHADE blocks alternating with local search on the incumbent, restarting the
// population after repeated non-improving steps.

#include <cmath>

#include "fenestra/optimize/local_search.hpp"
#include "fenestra/optimize/shade.hpp"

namespace fenestra::opt {

struct HybridConfig {
  std::size_t pop_size = 60;
  std::size_t memory_size = 50;
  double p_max = 0.2;
  std::size_t shade_generations = 50;  // generations per SHADE block
  LocalSearchConfig ls;
  double restart_threshold = 1e-4;
  std::size_t restart_patience = 3;  // consecutive non-improving steps
};

inline void validate(const HybridConfig& c) {
  if (c.pop_size < 4) throw ValidationError("hybrid pop_size must be at least 4");
  if (c.memory_size == 0 || c.shade_generations == 0 || c.restart_patience == 0)
    throw ValidationError("hybrid memory size, phase length and patience must be positive");
  if (!(c.restart_threshold > 0) || !(c.ls.eps > 0)) throw ValidationError("hybrid thresholds must be positive");
}

inline void to_json(json& j, const HybridConfig& c) {
  j = json{{"pop_size", c.pop_size},
           {"H", c.memory_size},
           {"p_max", c.p_max},
           {"shade_generations", c.shade_generations},
           {"local_search", c.ls},
           {"restart_threshold", c.restart_threshold},
           {"restart_patience", c.restart_patience}};
}
inline void from_json(const json& j, HybridConfig& c) {
  c.pop_size = j.value("pop_size", c.pop_size);
  c.memory_size = j.value("H", c.memory_size);
  c.p_max = j.value("p_max", c.p_max);
  c.shade_generations = j.value("shade_generations", c.shade_generations);
  if (j.contains("local_search")) j.at("local_search").get_to(c.ls);
  c.restart_threshold = j.value("restart_threshold", c.restart_threshold);
  c.restart_patience = j.value("restart_patience", c.restart_patience);
}

inline bool improved(double before, double after, double threshold) {
  if (!(after < before)) return false;
  if (!std::isfinite(before)) return true;
  const double scale = std::max(std::abs(before), 1e-12);
  return (before - after) / scale > threshold;
}

template <Problem P>
RunRecord hybrid_run(const HybridConfig& cfg, P& problem, std::size_t budget, std::uint64_t seed,
                     BudgetMode mode = BudgetMode::CacheMisses) {
  validate(cfg);
  if (budget < cfg.pop_size) throw ValidationError("hybrid budget must be at least pop_size");
  Rng rng(seed);
  Evaluator<P> ev(problem, budget, mode);
  ShadeMemory mem(cfg.memory_size);
  Population pop = random_population(ev, cfg.pop_size, rng);
  std::size_t stale = 0;
  std::size_t restarts = 0;

  // One alternation is a SHADE block followed by local search on the best.
  while (!ev.exhausted()) {
    const double before = pop.best();
    for (std::size_t g = 0; g < cfg.shade_generations && !ev.exhausted(); ++g) shade_step(pop, mem, ev, rng, cfg.p_max);
    if (!ev.exhausted()) {
      const std::size_t b = pop.best_index();
      auto ls = local_search(ev, pop.x[b], pop.f[b], cfg.ls);
      if (ls.f < pop.f[b]) {
        pop.x[b] = std::move(ls.x);
        pop.f[b] = ls.f;
      }
    }
    stale = improved(before, pop.best(), cfg.restart_threshold) ? 0 : stale + 1;
    if (stale >= cfg.restart_patience && !ev.exhausted()) {
      // The global best stays in the evaluator; the population starts over.
      pop = random_population(ev, cfg.pop_size, rng);
      mem.reset();
      stale = 0;
      ++restarts;
    }
  }
  RunRecord r;
  r.algorithm = "hybrid";
  r.seed = seed;
  r.config = cfg;
  r.restarts = restarts;
  ev.fill(r);
  return r;
}

}  // namespace fenestra::opt
