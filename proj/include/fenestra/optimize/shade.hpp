#pragma once
// Success-history based adaptive differential evolution (current-to-pbest/1/bin
// with an external archive and historical F/CR memory).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fenestra/optimize/problem.hpp"

namespace fenestra::opt {

struct ShadeConfig {
  std::size_t pop_size = 60;
  std::size_t memory_size = 50;
  double p_max = 0.2;
};

inline void to_json(json& j, const ShadeConfig& c) {
  j = json{{"pop_size", c.pop_size}, {"H", c.memory_size}, {"p_max", c.p_max}};
}
inline void from_json(const json& j, ShadeConfig& c) {
  c.pop_size = j.value("pop_size", c.pop_size);
  c.memory_size = j.value("H", c.memory_size);
  c.p_max = j.value("p_max", c.p_max);
}

struct ShadeMemory {
  std::vector<double> m_f;
  std::vector<double> m_cr;
  std::size_t next = 0;
  std::vector<Vec> archive;

  explicit ShadeMemory(std::size_t h = 50) : m_f(h, 0.5), m_cr(h, 0.5) {}
  std::size_t size() const { return m_f.size(); }
  void reset() {
    std::fill(m_f.begin(), m_f.end(), 0.5);
    std::fill(m_cr.begin(), m_cr.end(), 0.5);
    next = 0;
    archive.clear();
  }
};

/// Records the successful parameters of one generation into the next memory
/// slot. Weights are the fitness improvements.
inline void shade_update_memory(ShadeMemory& mem, const std::vector<double>& s_f, const std::vector<double>& s_cr,
                                const std::vector<double>& delta) {
  if (s_f.empty()) return;
  double wsum = std::accumulate(delta.begin(), delta.end(), 0.0);
  std::vector<double> w(delta.size());
  for (std::size_t k = 0; k < delta.size(); ++k) w[k] = wsum > 0 ? delta[k] / wsum : 1.0 / delta.size();
  double num = 0, den = 0, cr = 0;
  for (std::size_t k = 0; k < s_f.size(); ++k) {
    num += w[k] * s_f[k] * s_f[k];
    den += w[k] * s_f[k];
    cr += w[k] * s_cr[k];
  }
  mem.m_f[mem.next] = den > 0 ? num / den : mem.m_f[mem.next];
  mem.m_cr[mem.next] = cr;
  mem.next = (mem.next + 1) % mem.size();
}

template <class E>
void shade_step(Population& pop, ShadeMemory& mem, E& ev, Rng& rng, double p_max = 0.2) {
  const std::size_t n = pop.size();
  if (n < 4) throw ValidationError("SHADE needs at least 4 individuals");
  const std::size_t d = ev.dimension();
  const auto& lo = ev.lower();
  const auto& hi = ev.upper();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> uh(0, mem.size() - 1);
  std::uniform_int_distribution<std::size_t> ud(0, d - 1);
  const double p_min = std::min(p_max, 2.0 / static_cast<double>(n));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return pop.f[a] < pop.f[b]; });

  std::vector<Vec> trials(n);
  std::vector<double> fi(n), cri(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = uh(rng);
    double f;
    do {
      f = std::cauchy_distribution<double>(mem.m_f[r], 0.1)(rng);
    } while (f <= 0);
    fi[i] = std::min(f, 1.0);
    cri[i] = std::clamp(std::normal_distribution<double>(mem.m_cr[r], 0.1)(rng), 0.0, 1.0);

    const double p = std::uniform_real_distribution<double>(p_min, p_max)(rng);
    const std::size_t top = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(p * n)), 2, n);
    const std::size_t pbest = order[std::uniform_int_distribution<std::size_t>(0, top - 1)(rng)];
    const std::size_t r1 = pick_other(n, rng, {i});
    // r2 comes from population plus archive, distinct from i and r1.
    const std::size_t pool = n + mem.archive.size();
    std::size_t r2;
    do {
      r2 = std::uniform_int_distribution<std::size_t>(0, pool - 1)(rng);
    } while (r2 == i || r2 == r1);
    const Vec& x2 = r2 < n ? pop.x[r2] : mem.archive[r2 - n];

    const std::size_t jrand = ud(rng);
    Vec t = pop.x[i];
    for (std::size_t j = 0; j < d; ++j) {
      if (j != jrand && u01(rng) >= cri[i]) continue;
      double v = pop.x[i][j] + fi[i] * (pop.x[pbest][j] - pop.x[i][j]) + fi[i] * (pop.x[r1][j] - x2[j]);
      if (v < lo[j]) v = (lo[j] + pop.x[i][j]) / 2.0;
      if (v > hi[j]) v = (hi[j] + pop.x[i][j]) / 2.0;
      t[j] = v;
    }
    trials[i] = std::move(t);
  }

  const auto ft = ev.evaluate_batch(trials);
  std::vector<double> s_f, s_cr, delta;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(ft[i] <= pop.f[i])) continue;
    if (ft[i] < pop.f[i]) {
      mem.archive.push_back(pop.x[i]);
      s_f.push_back(fi[i]);
      s_cr.push_back(cri[i]);
      delta.push_back(std::abs(pop.f[i] - ft[i]));
    }
    pop.x[i] = std::move(trials[i]);
    pop.f[i] = ft[i];
  }
  while (mem.archive.size() > n) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, mem.archive.size() - 1)(rng);
    mem.archive[k] = std::move(mem.archive.back());
    mem.archive.pop_back();
  }
  // Infinite improvements (first finite value after +inf) carry no usable weight.
  for (auto& dl : delta)
    if (!std::isfinite(dl)) dl = 0;
  shade_update_memory(mem, s_f, s_cr, delta);
}

template <Problem P>
RunRecord shade_run(const ShadeConfig& cfg, P& problem, std::size_t budget, std::uint64_t seed,
                    BudgetMode mode = BudgetMode::CacheMisses) {
  Rng rng(seed);
  Evaluator<P> ev(problem, budget, mode);
  ShadeMemory mem(cfg.memory_size);
  Population pop = random_population(ev, cfg.pop_size, rng);
  while (!ev.exhausted()) shade_step(pop, mem, ev, rng, cfg.p_max);
  RunRecord r;
  r.algorithm = "shade";
  r.seed = seed;
  r.config = cfg;
  ev.fill(r);
  return r;
}

}  // namespace fenestra::opt
