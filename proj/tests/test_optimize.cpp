#include <gtest/gtest.h>

#include "support.hpp"

using namespace fenestra;
using namespace fenestra::opt;
namespace ft = fenestra::testing;

namespace {

FunctionProblem quadratic(std::size_t d, double lo = -5, double hi = 5) {
  return FunctionProblem("quadratic", Vec(d, lo), Vec(d, hi), [](std::span<const double> x) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * x[i] * x[i];
    return s;
  });
}

void expect_monotone_trace(const RunRecord& r) {
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].best, r.trace[i - 1].best);
    EXPECT_GE(r.trace[i].eval, r.trace[i - 1].eval);
  }
  EXPECT_DOUBLE_EQ(r.trace.back().best, r.best_fitness);
}

void expect_within_bounds(const RunRecord& r, const FunctionProblem& p) {
  for (std::size_t j = 0; j < r.best_x.size(); ++j) {
    EXPECT_GE(r.best_x[j], p.lower()[j]);
    EXPECT_LE(r.best_x[j], p.upper()[j]);
  }
}

std::shared_ptr<const DesignSpace> bundled_space() {
  static const auto s = std::make_shared<const DesignSpace>(ft::bundled_catalog(), ft::bundled_building(), Scenario::S1);
  return s;
}

/// Cheap stand-in for the simulator driven by the design geometry.
SimulationResult fake_simulation(const CanonicalDesign& d) {
  SimulationResult r;
  double area = 0, ua = 0;
  for (const auto& w : d.windows) {
    area += w.area();
    ua += w.area() * window_u(w);
  }
  r.edh = 20 + ua;
  r.edc = 5 + area;
  r.nct = 400 + 10 * area;
  r.q_sol_jul = area / 10;
  return r;
}

}  // namespace

TEST(DE, IdenticalPopulationStaysPut) {
  auto p = quadratic(4);
  Evaluator<FunctionProblem> ev(p, 1000);
  Population pop;
  const Vec x{1.0, -2.0, 0.5, 3.0};
  for (int i = 0; i < 10; ++i) {
    pop.x.push_back(x);
    pop.f.push_back(ev.evaluate(x));
  }
  Rng rng(1);
  de_step(pop, ev, 0.8, 0.5, rng);
  for (const auto& xi : pop.x) EXPECT_EQ(xi, x);
}

TEST(DE, GreedySelectionNeverWorsens) {
  auto p = quadratic(6);
  Evaluator<FunctionProblem> ev(p, 100000);
  Rng rng(2);
  auto pop = random_population(ev, 20, rng);
  for (int g = 0; g < 30; ++g) {
    const auto before = pop.f;
    de_step(pop, ev, 0.8, 0.5, rng);
    for (std::size_t i = 0; i < pop.size(); ++i) EXPECT_LE(pop.f[i], before[i]);
  }
  EXPECT_THROW(
      [&] {
        Population tiny;
        tiny.x.assign(3, Vec(6, 0.0));
        tiny.f.assign(3, 0.0);
        de_step(tiny, ev, 0.8, 0.5, rng);
      }(),
      ValidationError);
}

TEST(Shade, MemoryUpdateIsWeightedLehmerMean) {
  ShadeMemory mem(3);
  shade_update_memory(mem, {0.5, 1.0}, {0.2, 0.8}, {1.0, 3.0});
  EXPECT_NEAR(mem.m_f[0], (0.25 * 0.25 + 0.75 * 1.0) / (0.25 * 0.5 + 0.75 * 1.0), 1e-12);
  EXPECT_NEAR(mem.m_cr[0], 0.25 * 0.2 + 0.75 * 0.8, 1e-12);
  EXPECT_EQ(mem.next, 1u);
  EXPECT_DOUBLE_EQ(mem.m_f[1], 0.5);
}

TEST(Shade, EmptySuccessLeavesMemory) {
  ShadeMemory mem(2);
  shade_update_memory(mem, {}, {}, {});
  EXPECT_EQ(mem.next, 0u);
  EXPECT_DOUBLE_EQ(mem.m_f[0], 0.5);
}

TEST(Shade, SlotsWrapAndReset) {
  ShadeMemory mem(2);
  for (int i = 0; i < 3; ++i) shade_update_memory(mem, {0.9}, {0.1}, {1.0});
  EXPECT_EQ(mem.next, 1u);
  EXPECT_DOUBLE_EQ(mem.m_f[1], 0.9);
  mem.archive.push_back({1.0});
  mem.reset();
  EXPECT_TRUE(mem.archive.empty());
  EXPECT_EQ(mem.next, 0u);
  EXPECT_DOUBLE_EQ(mem.m_cr[1], 0.5);
}

TEST(Shade, StepKeepsPointsInBoundsAndNeverWorsens) {
  auto p = quadratic(5, -1, 1);
  Evaluator<FunctionProblem> ev(p, 100000);
  Rng rng(3);
  ShadeMemory mem(10);
  auto pop = random_population(ev, 20, rng);
  for (int g = 0; g < 40; ++g) {
    const auto before = pop.f;
    shade_step(pop, mem, ev, rng, 0.2);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      EXPECT_LE(pop.f[i], before[i]);
      for (double v : pop.x[i]) {
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
      }
    }
    EXPECT_LE(mem.archive.size(), pop.size());
  }
}

TEST(LocalSearch, FiniteDifferenceGradient) {
  auto f = [](const Vec& x) { return x[0] * x[0] + 2 * x[1] * x[1]; };
  const Vec x{1.0, 1.0};
  const auto g = fd_gradient(f, x, Vec{-5, -5}, Vec{5, 5}, 1e-6, f(x));
  EXPECT_NEAR(g[0], 2.0, 1e-5);
  EXPECT_NEAR(g[1], 4.0, 1e-5);
  // One-sided at the upper bound.
  const Vec at_hi{5.0, 0.0};
  const auto gb = fd_gradient(f, at_hi, Vec{-5, -5}, Vec{5, 5}, 1e-6, f(at_hi));
  EXPECT_NEAR(gb[0], 10.0, 1e-4);
}

TEST(LocalSearch, ConvergesOnQuadratic) {
  auto p = quadratic(3);
  Evaluator<FunctionProblem> ev(p, 10000);
  const Vec x0{3.0, -2.0, 1.0};
  const double f0 = ev.evaluate(x0);
  const auto r = local_search(ev, x0, f0);
  EXPECT_LT(r.f, 1e-6);
  EXPECT_LE(r.calls, LocalSearchConfig{}.max_evals);
}

TEST(LocalSearch, RespectsCallLimit) {
  auto p = quadratic(10);
  Evaluator<FunctionProblem> ev(p, 10000);
  const Vec x0(10, 4.0);
  LocalSearchConfig cfg;
  cfg.max_evals = 7;
  const auto r = local_search(ev, x0, ev.evaluate(x0), cfg);
  EXPECT_LE(r.calls, 7u);
  EXPECT_LE(ev.calls(), 8u);
}

TEST(GA, BlxChildInExtendedInterval) {
  Rng rng(5);
  const Vec a{0.0, 1.0, -2.0}, b{1.0, 1.0, 2.0};
  for (int i = 0; i < 1000; ++i) {
    const Vec c = blx_crossover(a, b, 0.5, rng);
    EXPECT_GE(c[0], -0.5);
    EXPECT_LE(c[0], 1.5);
    EXPECT_DOUBLE_EQ(c[1], 1.0);
    EXPECT_GE(c[2], -4.0);
    EXPECT_LE(c[2], 4.0);
  }
}

TEST(GA, TournamentPrefersFitter) {
  Population pop;
  pop.x.assign(2, Vec{0.0});
  pop.f = {1.0, 2.0};
  Rng rng(6);
  int first = 0;
  for (int i = 0; i < 2000; ++i) first += tournament_select(pop, 2, rng) == 0;
  EXPECT_NEAR(first / 2000.0, 0.75, 0.04);
}

TEST(GA, NoVariationMeansNoProgress) {
  auto p = quadratic(4);
  GAConfig cfg;
  cfg.crossover_prob = 0;
  cfg.mutation_prob = 0;
  const auto r = ga_run(cfg, p, 600, 7);
  // Only the initial population can improve the best; later points repeat it.
  ASSERT_FALSE(r.trace.empty());
  for (const auto& t : r.trace) {
    if (t.eval > cfg.pop_size) {
      EXPECT_EQ(t.best, r.best_fitness);
    }
  }
  double initial_best = std::numeric_limits<double>::infinity();
  for (const auto& t : r.trace)
    if (t.eval <= cfg.pop_size) initial_best = std::min(initial_best, t.best);
  EXPECT_EQ(initial_best, r.best_fitness);
  EXPECT_EQ(r.evaluations, 600u);
  cfg.crossover_prob = 1.5;
  EXPECT_THROW(ga_run(cfg, p, 600, 7), ValidationError);
}

TEST(Hybrid, BudgetOfOnePopulation) {
  auto p = quadratic(5);
  const auto r = hybrid_run(HybridConfig{}, p, 60, 1);
  EXPECT_EQ(r.evaluations, 60u);
  EXPECT_TRUE(std::isfinite(r.best_fitness));
  EXPECT_THROW(hybrid_run(HybridConfig{}, p, 59, 1), ValidationError);
}

TEST(Hybrid, FlatFunctionTriggersRestart) {
  FunctionProblem flat("flat", Vec(3, -1), Vec(3, 1), [](std::span<const double>) { return 1.0; });
  HybridConfig cfg;
  cfg.pop_size = 10;
  cfg.shade_generations = 5;
  const auto r = hybrid_run(cfg, flat, 2000, 2);
  EXPECT_GT(r.restarts, 0u);
  EXPECT_EQ(r.evaluations, 2000u);
}

TEST(Hybrid, ImprovementThreshold) {
  EXPECT_TRUE(improved(1.0, 0.5, 1e-4));
  EXPECT_FALSE(improved(1.0, 0.99999, 1e-4));
  EXPECT_FALSE(improved(1.0, 1.0, 1e-4));
  EXPECT_TRUE(improved(std::numeric_limits<double>::infinity(), 3.0, 1e-4));
}

TEST(Algorithms, TracesBoundsAndReproducibility) {
  auto p = shifted_sphere(5);
  for (const std::string algo : {"de", "ga", "shade", "hybrid"}) {
    auto run = [&](std::uint64_t seed) {
      if (algo == "de") return de_run(DEConfig{}, p, 3000, seed);
      if (algo == "ga") return ga_run(GAConfig{}, p, 3000, seed);
      if (algo == "shade") return shade_run(ShadeConfig{}, p, 3000, seed);
      return hybrid_run(HybridConfig{}, p, 3000, seed);
    };
    const auto a = run(11), b = run(11);
    SCOPED_TRACE(algo);
    expect_monotone_trace(a);
    expect_within_bounds(a, p);
    EXPECT_EQ(a.evaluations, 3000u);
    EXPECT_EQ(a.best_x, b.best_x);
    EXPECT_DOUBLE_EQ(a.best_fitness, b.best_fitness);
  }
}

TEST(Algorithms, HybridSolvesSphere) {
  auto p = shifted_sphere(10);
  const auto r = hybrid_run(HybridConfig{}, p, 10000, 3);
  EXPECT_LT(r.best_fitness, 1e-6);
}

TEST(Benchmarks, ShiftMovesTheOptimum) {
  auto s = shifted_sphere(4);
  auto r = shifted_rastrigin(4);
  EXPECT_GT(s.evaluate(Vec(4, 0.0)).fitness, 0.0);
  EXPECT_GT(r.evaluate(Vec(4, 0.0)).fitness, 0.0);
  EXPECT_EQ(benchmark_by_name("sphere", 4).evaluate(Vec(4, 1.0)).fitness, s.evaluate(Vec(4, 1.0)).fitness);
  EXPECT_THROW(benchmark_by_name("ackley", 3), ValidationError);
}

TEST(FenestrationProblem, ChargesEachDistinctDesignOnce) {
  auto space = bundled_space();
  FenestrationProblem prob(space, fake_simulation, location_preset(Location::Madrid));
  Rng rng(4);
  std::vector<Vec> xs;
  for (int i = 0; i < 30; ++i) xs.push_back(space->random_genome(rng).values);
  for (int i = 0; i < 10; ++i) xs.push_back(xs[static_cast<std::size_t>(i)]);
  std::set<std::string> keys;
  std::size_t consumed = 0;
  for (const auto& x : xs) {
    keys.insert(space->canonicalize(Genome{x}).key);
    consumed += prob.evaluate(x).consumed;
  }
  EXPECT_EQ(prob.charged(), keys.size());
  EXPECT_EQ(prob.simulations(), keys.size());
  EXPECT_EQ(consumed, keys.size());
  EXPECT_EQ(prob.cache_hits(), xs.size() - keys.size());
  const auto ranked = prob.ranked_evaluations();
  ASSERT_EQ(ranked.size(), keys.size());
  for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_LE(ranked[i - 1].breakdown.total, ranked[i].breakdown.total);
}

TEST(FenestrationProblem, BudgetCountsSimulations) {
  auto space = bundled_space();
  FenestrationProblem prob(space, fake_simulation, location_preset(Location::Madrid));
  const auto r = hybrid_run(HybridConfig{}, prob, 300, 5);
  EXPECT_EQ(r.evaluations, 300u);
  EXPECT_EQ(prob.simulations(), 300u);
  EXPECT_EQ(prob.charged(), 300u);
}

TEST(FenestrationProblem, FailuresBecomeEvaluationErrors) {
  auto space = bundled_space();
  FenestrationProblem prob(space, [](const CanonicalDesign&) -> SimulationResult { throw std::runtime_error("down"); },
                           location_preset(Location::Madrid));
  Rng rng(8);
  const auto x = space->random_genome(rng).values;
  EXPECT_THROW(prob.evaluate(x), EvaluationError);
}

TEST(FenestrationProblem, ThreadedPrefetchMatchesSerial) {
  auto space = bundled_space();
  FenestrationProblem serial(space, fake_simulation, location_preset(Location::Madrid));
  FenestrationProblem threaded(space, fake_simulation, location_preset(Location::Madrid), 4);
  const auto a = hybrid_run(HybridConfig{}, serial, 240, 9);
  const auto b = hybrid_run(HybridConfig{}, threaded, 240, 9);
  EXPECT_EQ(a.best_x, b.best_x);
  EXPECT_DOUBLE_EQ(a.best_fitness, b.best_fitness);
  EXPECT_EQ(serial.charged(), threaded.charged());
}
