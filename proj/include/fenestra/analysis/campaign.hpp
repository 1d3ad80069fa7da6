#pragma once
// Multi-run campaigns: convergence bands across runs and the per-variable
// agreement of each run's best design.

#include <map>
#include <string>
#include <vector>

#include "fenestra/analysis/solutions.hpp"
#include "fenestra/analysis/stats.hpp"
#include "fenestra/encoding.hpp"
#include "fenestra/optimize/fenestration.hpp"
#include "fenestra/optimize/problem.hpp"

namespace fenestra::analysis {

struct CampaignRun {
  opt::RunRecord record;
  std::vector<SolutionRow> top;           // best first; top.front() is the run's best design
  std::vector<opt::Evaluation> designs;  // parallel to `top`
};

struct Campaign {
  std::string location;
  Scenario scenario = Scenario::S1;
  std::size_t top_k = 10;
  std::vector<FieldSpec> fields;
  std::vector<CampaignRun> runs;

  SolutionTable solutions() const {
    SolutionTable t{fields, {}};
    for (const auto& r : runs) t.rows.insert(t.rows.end(), r.top.begin(), r.top.end());
    return t;
  }
};

inline FieldKind field_kind(DimKind k) {
  switch (k) {
    case DimKind::Width:
    case DimKind::Height:
    case DimKind::Reflectance: return FieldKind::Continuous;
    case DimKind::OverhangDepth:
    case DimKind::OverhangExtLeft:
    case DimKind::OverhangExtRight:
    case DimKind::FinLeftDepth:
    case DimKind::FinRightDepth:
    case DimKind::FinExtTop: return FieldKind::Shading;
    default: return FieldKind::Discrete;
  }
}

inline std::vector<FieldSpec> solution_fields(const DesignSpace& space) {
  std::vector<FieldSpec> f;
  for (const auto& d : space.layout().dims) f.push_back({d.name, field_kind(d.kind)});
  return f;
}

inline SolutionRow make_solution_row(const opt::Evaluation& e, const DesignSpace& space, int run, int rank) {
  SolutionRow r;
  char id[32];
  std::snprintf(id, sizeof id, "r%02d-%02d", run, rank);
  r.id = id;
  r.run = run;
  r.rank = rank;
  const auto& b = e.breakdown;
  r.fitness = b.total;
  r.edh = b.result.edh;
  r.edc = b.result.edc;
  r.nct = b.result.nct;
  r.q_sol_jul = b.result.q_sol_jul;
  r.p_solar = b.penalties.solar;
  r.p_window_u = b.penalties.window_u;
  r.p_k = b.penalties.k;
  r.p_min_glazing = b.penalties.min_glazing;
  r.wwr = b.metrics.wwr;
  r.k = b.metrics.k;
  r.window_area_m2 = b.metrics.window_area_m2;
  r.shading_area_m2 = b.metrics.shading_area_m2;
  r.values = space.canonical_values(e.design);
  r.key = e.design.key;
  return r;
}

/// Fills `run.top` with the `k` best distinct designs the problem evaluated.
inline void collect_top(CampaignRun& run, const opt::FenestrationProblem& p, int run_index, std::size_t k) {
  auto ranked = p.ranked_evaluations();
  if (ranked.size() > k) ranked.resize(k);
  run.top.clear();
  for (std::size_t i = 0; i < ranked.size(); ++i)
    run.top.push_back(make_solution_row(ranked[i], p.space(), run_index, static_cast<int>(i + 1)));
  run.designs = std::move(ranked);
}

// ---------------------------------------------------------------------------
// Convergence

struct ConvergenceRow {
  std::size_t eval = 0;
  double q05 = 0, q25 = 0, median = 0, q75 = 0, q95 = 0;
};

/// Distribution across runs of the best-so-far fitness at every evaluation
/// index where all runs have a value.
inline std::vector<ConvergenceRow> convergence_export(const std::vector<opt::RunRecord>& runs) {
  if (runs.empty()) throw EmptyTable("no runs to summarize");
  for (const auto& r : runs)
    if (r.budget != runs.front().budget)
      throw MismatchedBudgets("runs have different budgets (" + std::to_string(runs.front().budget) + " vs " +
                              std::to_string(r.budget) + ")");
  std::size_t last = 0;
  for (const auto& r : runs) last = std::max(last, r.evaluations);
  std::vector<ConvergenceRow> out;
  std::vector<std::size_t> cursor(runs.size(), 0);
  std::vector<double> current(runs.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t e = 1; e <= last; ++e) {
    bool complete = true;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& tr = runs[i].trace;
      while (cursor[i] < tr.size() && tr[cursor[i]].eval <= e) current[i] = tr[cursor[i]++].best;
      complete = complete && !std::isnan(current[i]);
    }
    if (!complete) continue;
    std::vector<double> v = current;
    std::sort(v.begin(), v.end());
    out.push_back({e, quantile_sorted(v, 0.05), quantile_sorted(v, 0.25), quantile_sorted(v, 0.5),
                   quantile_sorted(v, 0.75), quantile_sorted(v, 0.95)});
  }
  return out;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  using io::format_number;
  io::CsvWriter w({"eval", "median", "q25", "q75", "q05", "q95"});
  for (const auto& r : rows)
    w.add({std::to_string(r.eval), format_number(r.median), format_number(r.q25), format_number(r.q75),
           format_number(r.q05), format_number(r.q95)});
  return w.str();
}

// ---------------------------------------------------------------------------
// Robustness

struct RobustnessEntry {
  std::string field;
  std::map<std::string, std::size_t> counts;  // canonical value -> runs

  std::pair<std::string, std::size_t> mode() const {
    std::pair<std::string, std::size_t> m{"", 0};
    for (const auto& [v, c] : counts)
      if (c > m.second) m = {v, c};
    return m;
  }
};

/// For every genome dimension, how many runs' best designs share each value.
inline std::vector<RobustnessEntry> robustness_export(const Campaign& c) {
  if (c.runs.size() < 2) throw TooFewRows("robustness needs at least 2 runs");
  std::vector<RobustnessEntry> out;
  for (std::size_t f = 0; f < c.fields.size(); ++f) {
    RobustnessEntry e{c.fields[f].name, {}};
    for (const auto& r : c.runs) {
      if (r.top.empty()) throw IncompleteResult("run " + std::to_string(r.record.seed) + " has no solutions");
      ++e.counts[r.top.front().values.at(f)];
    }
    out.push_back(std::move(e));
  }
  return out;
}

/// Share of dimensions whose modal value is held by at least `min_runs` runs.
inline double modal_agreement(const std::vector<RobustnessEntry>& entries, std::size_t min_runs) {
  if (entries.empty()) return 0.0;
  std::size_t agree = 0;
  for (const auto& e : entries) agree += e.mode().second >= min_runs;
  return static_cast<double>(agree) / static_cast<double>(entries.size());
}

inline std::string robustness_csv(const std::vector<RobustnessEntry>& entries) {
  io::CsvWriter w({"dimension", "value", "runs"});
  for (const auto& e : entries)
    for (const auto& [v, n] : e.counts) w.add({e.field, v, std::to_string(n)});
  return w.str();
}

}  // namespace fenestra::analysis
