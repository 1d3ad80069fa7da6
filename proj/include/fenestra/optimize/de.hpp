#pragma once
// Classic differential evolution, rand/1/bin.

#include <random>

#include "fenestra/optimize/problem.hpp"

namespace fenestra::opt {

struct DEConfig {
  std::size_t pop_size = 60;
  double f = 0.8;
  double cr = 0.5;
};

inline void to_json(json& j, const DEConfig& c) { j = json{{"pop_size", c.pop_size}, {"F", c.f}, {"CR", c.cr}}; }
inline void from_json(const json& j, DEConfig& c) {
  c.pop_size = j.value("pop_size", c.pop_size);
  c.f = j.value("F", c.f);
  c.cr = j.value("CR", c.cr);
}

/// One generation. Trial vectors are built serially, evaluated as a batch and
/// selected greedily; parents survive ties.
template <class E>
void de_step(Population& pop, E& ev, double f, double cr, Rng& rng) {
  const std::size_t n = pop.size();
  if (n < 4) throw ValidationError("differential evolution needs at least 4 individuals");
  const std::size_t d = ev.dimension();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> ud(0, d - 1);
  std::vector<Vec> trials(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r1 = pick_other(n, rng, {i});
    const std::size_t r2 = pick_other(n, rng, {i, r1});
    const std::size_t r3 = pick_other(n, rng, {i, r1, r2});
    const std::size_t jrand = ud(rng);
    Vec t = pop.x[i];
    for (std::size_t j = 0; j < d; ++j)
      if (j == jrand || u01(rng) < cr) t[j] = pop.x[r1][j] + f * (pop.x[r2][j] - pop.x[r3][j]);
    clamp_to(t, ev.lower(), ev.upper());
    trials[i] = std::move(t);
  }
  const auto ft = ev.evaluate_batch(trials);
  for (std::size_t i = 0; i < n; ++i) {
    if (ft[i] <= pop.f[i]) {
      pop.x[i] = std::move(trials[i]);
      pop.f[i] = ft[i];
    }
  }
}

template <Problem P>
RunRecord de_run(const DEConfig& cfg, P& problem, std::size_t budget, std::uint64_t seed,
                 BudgetMode mode = BudgetMode::CacheMisses) {
  Rng rng(seed);
  Evaluator<P> ev(problem, budget, mode);
  Population pop = random_population(ev, cfg.pop_size, rng);
  while (!ev.exhausted()) de_step(pop, ev, cfg.f, cfg.cr, rng);
  RunRecord r;
  r.algorithm = "de";
  r.seed = seed;
  r.config = cfg;
  ev.fill(r);
  return r;
}

}  // namespace fenestra::opt
