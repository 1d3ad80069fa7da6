#pragma once
// Generational real-coded GA: tournament selection, BLX-alpha crossover,
// Gaussian mutation and elitism.

#include <algorithm>
#include <random>

#include "fenestra/optimize/problem.hpp"

namespace fenestra::opt {

struct GAConfig {
  std::size_t pop_size = 60;
  double blx_alpha = 0.5;
  double crossover_prob = 0.9;
  double mutation_prob = 0.01;  // per gene
  double mutation_sigma = 0.1;  // fraction of the variable range
  std::size_t tournament = 2;
  std::size_t elitism = 1;
};

inline void validate(const GAConfig& c) {
  for (double p : {c.crossover_prob, c.mutation_prob})
    if (p < 0 || p > 1) throw ValidationError("GA probabilities must be in [0,1]");
  if (c.pop_size < 2 || c.tournament == 0 || c.elitism > c.pop_size) throw ValidationError("bad GA population settings");
}

inline void to_json(json& j, const GAConfig& c) {
  j = json{{"pop_size", c.pop_size},       {"blx_alpha", c.blx_alpha},         {"crossover_prob", c.crossover_prob},
           {"mutation_prob", c.mutation_prob}, {"mutation_sigma", c.mutation_sigma}, {"tournament", c.tournament},
           {"elitism", c.elitism}};
}
inline void from_json(const json& j, GAConfig& c) {
  c.pop_size = j.value("pop_size", c.pop_size);
  c.blx_alpha = j.value("blx_alpha", c.blx_alpha);
  c.crossover_prob = j.value("crossover_prob", c.crossover_prob);
  c.mutation_prob = j.value("mutation_prob", c.mutation_prob);
  c.mutation_sigma = j.value("mutation_sigma", c.mutation_sigma);
  c.tournament = j.value("tournament", c.tournament);
  c.elitism = j.value("elitism", c.elitism);
}

/// BLX-alpha: each gene drawn uniformly from the parents' interval widened by alpha on both sides.
inline Vec blx_crossover(const Vec& a, const Vec& b, double alpha, Rng& rng) {
  Vec c(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double lo = std::min(a[j], b[j]);
    const double hi = std::max(a[j], b[j]);
    const double ext = alpha * (hi - lo);
    c[j] = hi - lo > 0 ? std::uniform_real_distribution<double>(lo - ext, hi + ext)(rng) : lo;
  }
  return c;
}

inline std::size_t tournament_select(const Population& pop, std::size_t k, Rng& rng) {
  std::uniform_int_distribution<std::size_t> u(0, pop.size() - 1);
  std::size_t best = u(rng);
  for (std::size_t t = 1; t < k; ++t) {
    const std::size_t c = u(rng);
    if (pop.f[c] < pop.f[best]) best = c;
  }
  return best;
}

template <Problem P>
RunRecord ga_run(const GAConfig& cfg, P& problem, std::size_t budget, std::uint64_t seed,
                 BudgetMode mode = BudgetMode::CacheMisses) {
  validate(cfg);
  if (budget < cfg.pop_size) throw ValidationError("GA budget must be at least pop_size");
  Rng rng(seed);
  Evaluator<P> ev(problem, budget, mode);
  const auto& lo = ev.lower();
  const auto& hi = ev.upper();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Population pop = random_population(ev, cfg.pop_size, rng);

  while (!ev.exhausted()) {
    std::vector<std::size_t> order(pop.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pop.f[a] < pop.f[b]; });

    Population next;
    for (std::size_t e = 0; e < cfg.elitism; ++e) {
      next.x.push_back(pop.x[order[e]]);
      next.f.push_back(pop.f[order[e]]);
    }
    std::vector<Vec> children;
    while (next.size() + children.size() < cfg.pop_size) {
      const Vec& a = pop.x[tournament_select(pop, cfg.tournament, rng)];
      const Vec& b = pop.x[tournament_select(pop, cfg.tournament, rng)];
      Vec c1 = a, c2 = b;
      if (u01(rng) < cfg.crossover_prob) {
        c1 = blx_crossover(a, b, cfg.blx_alpha, rng);
        c2 = blx_crossover(a, b, cfg.blx_alpha, rng);
      }
      for (Vec* c : {&c1, &c2}) {
        for (std::size_t j = 0; j < c->size(); ++j)
          if (u01(rng) < cfg.mutation_prob)
            (*c)[j] += std::normal_distribution<double>(0.0, cfg.mutation_sigma * (hi[j] - lo[j]))(rng);
        clamp_to(*c, lo, hi);
      }
      children.push_back(std::move(c1));
      if (next.size() + children.size() < cfg.pop_size) children.push_back(std::move(c2));
    }
    const auto fc = ev.evaluate_batch(children);
    for (std::size_t i = 0; i < children.size(); ++i) {
      next.x.push_back(std::move(children[i]));
      next.f.push_back(fc[i]);
    }
    pop = std::move(next);
  }
  RunRecord r;
  r.algorithm = "ga";
  r.seed = seed;
  r.config = cfg;
  ev.fill(r);
  return r;
}

}  // namespace fenestra::opt
