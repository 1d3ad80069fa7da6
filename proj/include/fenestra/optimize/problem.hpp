#pragma once
// Problem concept, evaluation budget and run records shared by all optimizers.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenestra/error.hpp"

namespace fenestra::opt {

using nlohmann::json;
using Vec = std::vector<double>;
using Rng = std::mt19937_64;

struct EvalOutcome {
  double fitness = 0;
  bool consumed = true;  // false when served without a new simulation
};

template <class P>
concept Problem = requires(P& p, std::span<const double> x) {
  { p.dimension() } -> std::convertible_to<std::size_t>;
  { p.lower() } -> std::convertible_to<Vec>;
  { p.upper() } -> std::convertible_to<Vec>;
  { p.evaluate(x) } -> std::same_as<EvalOutcome>;
};

/// Problems that can warm their cache for a batch before serial evaluation.
/// `max_new` bounds how many budget-consuming evaluations may be started.
template <class P>
concept Prefetching = requires(P& p, const std::vector<Vec>& batch, std::size_t max_new) { p.prefetch(batch, max_new); };

enum class BudgetMode { CacheMisses, AllCalls };
NLOHMANN_JSON_SERIALIZE_ENUM(BudgetMode, {{BudgetMode::CacheMisses, "cache_misses"}, {BudgetMode::AllCalls, "all_calls"}})

struct TracePoint {
  std::size_t eval = 0;
  double best = 0;
};

struct RunRecord {
  std::string algorithm;
  std::uint64_t seed = 0;
  json config;
  Vec best_x;
  double best_fitness = std::numeric_limits<double>::infinity();
  std::vector<TracePoint> trace;
  std::size_t evaluations = 0;  // budget units consumed
  std::size_t calls = 0;        // fitness calls including cache hits
  std::size_t restarts = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t budget = 0;
};

inline json to_json_value(const RunRecord& r) {
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({t.eval, t.best});
  return json{{"algorithm", r.algorithm}, {"seed", r.seed},       {"config", r.config},
              {"best_x", r.best_x},       {"best_fitness", r.best_fitness},
              {"trace", trace},           {"evaluations", r.evaluations}, {"calls", r.calls},
              {"restarts", r.restarts},   {"cache_hits", r.cache_hits},   {"cache_misses", r.cache_misses},
              {"budget", r.budget}};
}

inline RunRecord run_record_from_json(const json& j) {
  RunRecord r;
  try {
    j.at("algorithm").get_to(r.algorithm);
    j.at("seed").get_to(r.seed);
    r.config = j.value("config", json::object());
    j.at("best_x").get_to(r.best_x);
    j.at("best_fitness").get_to(r.best_fitness);
    for (const auto& t : j.at("trace")) r.trace.push_back({t.at(0).get<std::size_t>(), t.at(1).get<double>()});
    j.at("evaluations").get_to(r.evaluations);
    r.calls = j.value("calls", r.evaluations);
    r.restarts = j.value("restarts", std::size_t{0});
    r.cache_hits = j.value("cache_hits", std::size_t{0});
    r.cache_misses = j.value("cache_misses", std::size_t{0});
    j.at("budget").get_to(r.budget);
  } catch (const json::exception& e) {
    throw ParseError(std::string("run record: ") + e.what());
  }
  return r;
}

/// Wraps a problem with budget accounting and best-so-far tracking.
template <Problem P>
class Evaluator {
 public:
  Evaluator(P& problem, std::size_t budget, BudgetMode mode = BudgetMode::CacheMisses, std::size_t call_cap = 0)
      : p_(problem),
        budget_(budget),
        mode_(mode),
        call_cap_(call_cap ? call_cap : std::max<std::size_t>(budget * 50, 1000)),
        lo_(problem.lower()),
        hi_(problem.upper()) {}

  std::size_t dimension() const { return lo_.size(); }
  const Vec& lower() const { return lo_; }
  const Vec& upper() const { return hi_; }
  bool exhausted() const { return used_ >= budget_ || calls_ >= call_cap_; }
  std::size_t used() const { return used_; }
  std::size_t calls() const { return calls_; }
  std::size_t budget() const { return budget_; }
  double best() const { return best_f_; }
  const Vec& best_x() const { return best_x_; }
  const std::vector<TracePoint>& trace() const { return trace_; }

  double evaluate(std::span<const double> x) {
    const EvalOutcome o = p_.evaluate(x);
    ++calls_;
    if (mode_ == BudgetMode::AllCalls || o.consumed) ++used_;
    if (o.fitness < best_f_) {
      best_f_ = o.fitness;
      best_x_.assign(x.begin(), x.end());
      trace_.push_back({used_, best_f_});
    }
    return o.fitness;
  }

  void prefetch(const std::vector<Vec>& batch) {
    if constexpr (Prefetching<P>) {
      const std::size_t left = std::min(budget_ - std::min(used_, budget_), call_cap_ - std::min(calls_, call_cap_));
      if (left > 0) p_.prefetch(batch, left);
    }
  }

  /// Evaluates `batch` in order until the budget runs out; unevaluated entries get +inf.
  std::vector<double> evaluate_batch(const std::vector<Vec>& batch) {
    prefetch(batch);
    std::vector<double> f(batch.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < batch.size() && !exhausted(); ++i) f[i] = evaluate(batch[i]);
    return f;
  }

  void fill(RunRecord& r) const {
    r.best_x = best_x_;
    r.best_fitness = best_f_;
    r.trace = trace_;
    if (!trace_.empty() && trace_.back().eval != used_) r.trace.push_back({used_, best_f_});
    r.evaluations = used_;
    r.calls = calls_;
    r.budget = budget_;
  }

 private:
  P& p_;
  std::size_t budget_;
  BudgetMode mode_;
  std::size_t call_cap_;
  Vec lo_, hi_;
  std::size_t used_ = 0;
  std::size_t calls_ = 0;
  double best_f_ = std::numeric_limits<double>::infinity();
  Vec best_x_;
  std::vector<TracePoint> trace_;
};

struct Population {
  std::vector<Vec> x;
  std::vector<double> f;
  std::size_t size() const { return x.size(); }
  std::size_t best_index() const {
    return static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  }
  double best() const { return f.empty() ? std::numeric_limits<double>::infinity() : f[best_index()]; }
};

inline Vec uniform_point(const Vec& lo, const Vec& hi, Rng& rng) {
  Vec x(lo.size());
  for (std::size_t j = 0; j < lo.size(); ++j) x[j] = std::uniform_real_distribution<double>(lo[j], hi[j])(rng);
  return x;
}

template <class E>
Population random_population(E& ev, std::size_t n, Rng& rng) {
  Population pop;
  for (std::size_t i = 0; i < n; ++i) pop.x.push_back(uniform_point(ev.lower(), ev.upper(), rng));
  pop.f = ev.evaluate_batch(pop.x);
  return pop;
}

inline void clamp_to(Vec& x, const Vec& lo, const Vec& hi) {
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], lo[j], hi[j]);
}

/// Distinct random indices from [0, n) excluding `exclude`.
inline std::size_t pick_other(std::size_t n, Rng& rng, std::initializer_list<std::size_t> exclude) {
  std::uniform_int_distribution<std::size_t> u(0, n - 1);
  while (true) {
    const std::size_t k = u(rng);
    if (std::find(exclude.begin(), exclude.end(), k) == exclude.end()) return k;
  }
}

}  // namespace fenestra::opt
