#pragma once
// The window-design problem as seen by the optimizers: genome -> canonical
// design -> simulation -> fitness, memoized on the canonical key.

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <set>
#include <thread>
#include <unordered_set>

#include "fenestra/encoding.hpp"
#include "fenestra/fitness.hpp"
#include "fenestra/optimize/problem.hpp"
#include "fenestra/thermal.hpp"

namespace fenestra::opt {

struct Evaluation {
  CanonicalDesign design;
  FitnessBreakdown breakdown;
};

using SimulateFn = std::function<SimulationResult(const CanonicalDesign&)>;

inline SimulateFn builtin_backend(std::shared_ptr<const Simulator> sim) {
  return [sim = std::move(sim)](const CanonicalDesign& d) { return sim->simulate(d); };
}

class FenestrationProblem {
 public:
  FenestrationProblem(std::shared_ptr<const DesignSpace> space, SimulateFn simulate, FitnessConfig fitness,
                      std::size_t threads = 1)
      : space_(std::move(space)),
        simulate_(std::move(simulate)),
        fitness_(std::move(fitness)),
        threads_(std::max<std::size_t>(threads, 1)),
        lo_(space_->layout().lower()),
        hi_(space_->layout().upper()) {
    validate(fitness_);
  }

  std::size_t dimension() const { return lo_.size(); }
  Vec lower() const { return lo_; }
  Vec upper() const { return hi_; }
  const DesignSpace& space() const { return *space_; }
  const FitnessConfig& fitness() const { return fitness_; }

  /// Budget is charged the first time a canonical key is requested, whether
  /// or not a prefetch already computed it.
  EvalOutcome evaluate(std::span<const double> x) {
    CanonicalDesign design = space_->canonicalize(Genome{Vec(x.begin(), x.end())});
    const bool fresh = charged_.insert(design.key).second;
    if (!fresh) ++hits_;
    return {lookup(std::move(design)).breakdown.total, fresh};
  }

  /// Fully evaluated design for a genome (served from the cache when possible).
  Evaluation evaluate_design(std::span<const double> x) {
    return lookup(space_->canonicalize(Genome{Vec(x.begin(), x.end())}));
  }

  /// Computes up to `max_new` uncharged designs of `batch` concurrently.
  /// Failures are left for the serial pass to report.
  void prefetch(const std::vector<Vec>& batch, std::size_t max_new) {
    if (threads_ <= 1) return;
    std::vector<CanonicalDesign> todo;
    std::set<std::string> seen;
    for (const auto& x : batch) {
      if (todo.size() >= max_new) break;
      auto d = space_->canonicalize(Genome{x});
      if (charged_.count(d.key) || cache_.contains(d.key) || !seen.insert(d.key).second) continue;
      todo.push_back(std::move(d));
    }
    if (todo.size() < 2) return;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < todo.size();) {
        try {
          lookup(todo[i]);
        } catch (const Error&) {
        }
      }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(threads_, todo.size()); ++t) pool.emplace_back(worker);
    worker();
  }

  std::size_t charged() const { return charged_.size(); }
  std::size_t cache_hits() const { return hits_; }
  std::size_t simulations() const { return cache_.misses(); }

  /// Every distinct design evaluated so far, best fitness first; ties keep key order.
  std::vector<Evaluation> ranked_evaluations() const {
    std::vector<Evaluation> out;
    for (auto& [key, ev] : cache_.snapshot())
      if (charged_.count(key)) out.push_back(ev);
    std::stable_sort(out.begin(), out.end(), [](const Evaluation& a, const Evaluation& b) {
      if (a.breakdown.total != b.breakdown.total) return a.breakdown.total < b.breakdown.total;
      return a.design.key < b.design.key;
    });
    return out;
  }

 private:
  Evaluation lookup(CanonicalDesign design) {
    const std::string key = design.key;
    return cache_
        .get_or_compute(key,
                        [&] {
                          try {
                            const SimulationResult r = simulate_(design);
                            return Evaluation{design, total_fitness(r, design, space_->building(), fitness_)};
                          } catch (const EvaluationError&) {
                            throw;
                          } catch (const std::exception& e) {
                            throw EvaluationError(key, e.what());
                          }
                        })
        .value;
  }

  std::shared_ptr<const DesignSpace> space_;
  SimulateFn simulate_;
  FitnessConfig fitness_;
  std::size_t threads_;
  Vec lo_, hi_;
  EvalCache<Evaluation> cache_;
  std::unordered_set<std::string> charged_;
  std::size_t hits_ = 0;
};

}  // namespace fenestra::opt
