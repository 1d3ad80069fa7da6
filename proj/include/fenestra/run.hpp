#pragma once
// Executes a configured campaign and writes its artifacts.

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>

#include "fenestra/analysis/campaign.hpp"
#include "fenestra/config.hpp"
#include "fenestra/external.hpp"
#include "fenestra/io/files.hpp"
#include "fenestra/optimize/de.hpp"
#include "fenestra/optimize/fenestration.hpp"
#include "fenestra/optimize/ga.hpp"
#include "fenestra/optimize/hybrid.hpp"
#include "fenestra/optimize/shade.hpp"
#include "fenestra/weather.hpp"

namespace fenestra {

template <opt::Problem P>
opt::RunRecord run_algorithm(Algorithm algo, const nlohmann::json& cfg, P& problem, std::size_t budget,
                             std::uint64_t seed, opt::BudgetMode mode = opt::BudgetMode::CacheMisses) {
  try {
    switch (algo) {
      case Algorithm::Hybrid: return opt::hybrid_run(cfg.get<opt::HybridConfig>(), problem, budget, seed, mode);
      case Algorithm::Shade: return opt::shade_run(cfg.get<opt::ShadeConfig>(), problem, budget, seed, mode);
      case Algorithm::DE: return opt::de_run(cfg.get<opt::DEConfig>(), problem, budget, seed, mode);
      case Algorithm::GA: return opt::ga_run(cfg.get<opt::GAConfig>(), problem, budget, seed, mode);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("algorithm_config: ") + e.what());
  }
  throw ConfigError("unknown algorithm");
}

/// Everything shared read-only by the runs of a campaign.
struct CampaignInputs {
  BuildingModel building;
  std::shared_ptr<const DesignSpace> space;
  opt::SimulateFn simulate;
};

inline CampaignInputs load_inputs(const RunConfig& c) {
  const Catalog catalog = load_catalog(c.catalog);
  CampaignInputs in;
  in.building = load_building(c.building);
  in.space = std::make_shared<const DesignSpace>(catalog, in.building, c.scenario);
  if (c.evaluator == EvaluatorKind::External) {
    in.simulate = [b = in.building, weather = c.weather.string(), ext = c.external](const CanonicalDesign& d) {
      return external_evaluate(d, b, weather, ext);
    };
  } else {
    const GainSchedule schedule = c.schedule ? load_gain_schedule(*c.schedule) : default_gain_schedule();
    auto climate = std::make_shared<const Climate>(parse_epw(c.weather), in.building);
    in.simulate = opt::builtin_backend(std::make_shared<const Simulator>(climate, in.building, schedule, c.simulation));
  }
  return in;
}

inline analysis::CampaignRun run_one(const RunConfig& c, const CampaignInputs& in, std::size_t index) {
  opt::FenestrationProblem problem(in.space, in.simulate, c.fitness, c.threads);
  analysis::CampaignRun run;
  run.record = run_algorithm(c.algorithm, c.algorithm_config, problem, c.budget, c.seeds.at(index), c.budget_mode);
  run.record.cache_hits = problem.cache_hits();
  run.record.cache_misses = problem.charged();
  analysis::collect_top(run, problem, static_cast<int>(index + 1), c.top_k);
  return run;
}

using ProgressFn = std::function<void(std::size_t run, const opt::RunRecord&)>;

/// Runs are independent; `parallel` workers take them in index order and
/// results land in their own slots, so output does not depend on scheduling.
inline analysis::Campaign run_campaign(const RunConfig& c, std::size_t parallel = 1, const ProgressFn& progress = {}) {
  validate(c);
  const CampaignInputs in = load_inputs(c);
  analysis::Campaign camp;
  camp.location = nlohmann::json(c.location).get<std::string>();
  camp.scenario = c.scenario;
  camp.top_k = c.top_k;
  camp.fields = analysis::solution_fields(*in.space);
  camp.runs.resize(c.runs);

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < c.runs;) {
      try {
        camp.runs[i] = run_one(c, in, i);
        if (progress) {
          std::lock_guard lock(mu);
          progress(i, camp.runs[i].record);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = c.runs;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(std::max<std::size_t>(parallel, 1), c.runs); ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return camp;
}

inline analysis::DemandLimits demand_limits(Location loc) {
  return {heating_satisfaction(loc), cooling_satisfaction(loc)};
}

/// Solution file read by `inspect`: the design plus its evaluation.
inline nlohmann::json solution_document(const analysis::SolutionRow& row, const opt::Evaluation& e,
                                        const BuildingModel& b, const std::string& location, Scenario scenario) {
  return {{"id", row.id},
          {"location", location},
          {"scenario", scenario},
          {"design", design_to_json(e.design, b)},
          {"breakdown", breakdown_to_json(e.breakdown)}};
}

/// Writes manifest, per-run records, solution tables and the convergence and
/// robustness exports under `c.output_dir`. Returns the selected best row id.
inline std::string write_campaign(const analysis::Campaign& camp, const RunConfig& c, const BuildingModel& b) {
  namespace fs = std::filesystem;
  const fs::path dir = c.output_dir;
  std::vector<opt::RunRecord> records;
  nlohmann::json run_files = nlohmann::json::array();
  for (std::size_t i = 0; i < camp.runs.size(); ++i) {
    const auto& run = camp.runs[i];
    records.push_back(run.record);
    char name[32];
    std::snprintf(name, sizeof name, "run_%02zu.json", i + 1);
    nlohmann::json j = opt::to_json_value(run.record);
    if (!run.top.empty())
      j["best_design"] = solution_document(run.top.front(), run.designs.front(), b, camp.location, camp.scenario);
    io::write_json(dir / "runs" / name, j);
    run_files.push_back(std::string("runs/") + name);
  }
  const auto table = camp.solutions();
  io::write_atomic(dir / "solutions.csv", analysis::solutions_csv(table));
  io::write_json(dir / "solutions.json", analysis::table_to_json(table));
  io::write_atomic(dir / "convergence.csv", analysis::convergence_csv(analysis::convergence_export(records)));
  std::string best_id;
  if (camp.runs.size() >= 2)
    io::write_atomic(dir / "robustness.csv", analysis::robustness_csv(analysis::robustness_export(camp)));
  if (!table.rows.empty()) {
    const auto& best = analysis::select_best(table, demand_limits(c.location));
    best_id = best.id;
    for (const auto& run : camp.runs)
      for (std::size_t k = 0; k < run.top.size(); ++k)
        if (run.top[k].id == best.id)
          io::write_json(dir / "best_solution.json",
                         solution_document(run.top[k], run.designs[k], b, camp.location, camp.scenario));
  }
  io::write_json(dir / "manifest.json", {{"location", camp.location},
                                         {"scenario", camp.scenario},
                                         {"runs", camp.runs.size()},
                                         {"top_k", camp.top_k},
                                         {"budget", c.budget},
                                         {"config", run_config_to_json(c)},
                                         {"run_files", run_files},
                                         {"best_solution", best_id},
                                         {"sigma", "population"}});
  return best_id;
}

}  // namespace fenestra
