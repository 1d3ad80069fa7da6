#pragma once
// Tables of optimized solutions: best-solution selection and value frequencies.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenestra/error.hpp"
#include "fenestra/io/csv.hpp"

namespace fenestra::analysis {

using nlohmann::json;

/// How a solution field is binned for frequency counts.
enum class FieldKind { Discrete, Continuous, Shading };
NLOHMANN_JSON_SERIALIZE_ENUM(FieldKind, {{FieldKind::Discrete, "discrete"},
                                         {FieldKind::Continuous, "continuous"},
                                         {FieldKind::Shading, "shading"}})

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::Discrete;
};

struct SolutionRow {
  std::string id;
  int run = 0;
  int rank = 0;
  double fitness = 0;
  double edh = 0, edc = 0, nct = 0, q_sol_jul = 0;
  double p_solar = 0, p_window_u = 0, p_k = 0, p_min_glazing = 0;
  double wwr = 0, k = 0, window_area_m2 = 0, shading_area_m2 = 0;
  std::vector<std::string> values;  // parallel to SolutionTable::fields
  std::string key;

  bool compliant() const { return p_solar == 0 && p_window_u == 0 && p_k == 0 && p_min_glazing == 0; }
  double demand() const { return edh + edc; }
};

struct SolutionTable {
  std::vector<FieldSpec> fields;
  std::vector<SolutionRow> rows;

  std::size_t field_index(const std::string& name) const {
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (fields[i].name == name) return i;
    throw UnknownField("no solution field named '" + name + "'");
  }
};

/// Regulatory demand limits used to pick the reported solution.
struct DemandLimits {
  double edh_max = 0;
  double edc_max = 0;
};

/// Prefers rows within both demand limits (lowest EDh+EDc); otherwise the
/// row exceeding the limits by the least. Ties: lower NCT, then id.
inline const SolutionRow& select_best(const SolutionTable& t, const DemandLimits& lim) {
  if (t.rows.empty()) throw EmptyTable("cannot select from an empty solution table");
  auto within = [&](const SolutionRow& r) { return r.edh <= lim.edh_max && r.edc <= lim.edc_max; };
  auto excess = [&](const SolutionRow& r) {
    return std::max(0.0, r.edh - lim.edh_max) + std::max(0.0, r.edc - lim.edc_max);
  };
  const bool any_within = std::any_of(t.rows.begin(), t.rows.end(), within);
  const SolutionRow* best = nullptr;
  double best_score = 0;
  for (const auto& r : t.rows) {
    if (any_within && !within(r)) continue;
    const double score = any_within ? r.demand() : excess(r);
    if (!best || score < best_score ||
        (score == best_score && (r.nct < best->nct || (r.nct == best->nct && r.id < best->id)))) {
      best = &r;
      best_score = score;
    }
  }
  return *best;
}

inline std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v + 0.0);
  return buf;
}

/// Frequency label of a raw field value: continuous values fall in 0.1 bins;
/// zero-sized shading devices count as "absent".
inline std::string frequency_label(const std::string& value, FieldKind kind) {
  if (kind == FieldKind::Discrete) return value;
  double v = 0;
  try {
    v = std::stod(value);
  } catch (const std::exception&) {
    return value;
  }
  if (kind == FieldKind::Shading) {
    if (v <= 0) return "absent";
    return one_decimal(std::max(0.1, std::floor(v * 10.0 + 1e-6) / 10.0));
  }
  return one_decimal(std::floor(v * 10.0 + 1e-6) / 10.0);
}

inline std::map<std::string, std::size_t> frequency(const SolutionTable& t, const std::string& field) {
  const std::size_t i = t.field_index(field);
  std::map<std::string, std::size_t> h;
  for (const auto& r : t.rows) ++h[frequency_label(r.values.at(i), t.fields[i].kind)];
  return h;
}

// ---------------------------------------------------------------------------
// Serialization

inline io::CsvRow solution_header(const SolutionTable& t) {
  io::CsvRow h{"id",    "run",       "rank",      "fitness",   "EDh",        "EDc",        "EDh+EDc",
               "NCT",   "Q_sol_Jul", "WWR",       "K",         "window_area", "shading_area", "p_solar",
               "p_window_u", "p_k",  "p_min_glazing", "compliant"};
  for (const auto& f : t.fields) h.push_back(f.name);
  h.push_back("key");
  return h;
}

inline std::string solutions_csv(const SolutionTable& t) {
  using io::format_number;
  io::CsvWriter w(solution_header(t));
  for (const auto& r : t.rows) {
    io::CsvRow row{r.id,
                   std::to_string(r.run),
                   std::to_string(r.rank),
                   format_number(r.fitness),
                   format_number(r.edh),
                   format_number(r.edc),
                   format_number(r.demand()),
                   format_number(r.nct),
                   format_number(r.q_sol_jul),
                   format_number(r.wwr),
                   format_number(r.k),
                   format_number(r.window_area_m2),
                   format_number(r.shading_area_m2),
                   format_number(r.p_solar),
                   format_number(r.p_window_u),
                   format_number(r.p_k),
                   format_number(r.p_min_glazing),
                   r.compliant() ? "true" : "false"};
    row.insert(row.end(), r.values.begin(), r.values.end());
    row.push_back(r.key);
    w.add(row);
  }
  return w.str();
}

inline void to_json(json& j, const SolutionRow& r) {
  j = json{{"id", r.id},
           {"run", r.run},
           {"rank", r.rank},
           {"fitness", r.fitness},
           {"edh", r.edh},
           {"edc", r.edc},
           {"nct", r.nct},
           {"q_sol_jul", r.q_sol_jul},
           {"penalties", {{"solar", r.p_solar}, {"window_u", r.p_window_u}, {"k", r.p_k}, {"min_glazing", r.p_min_glazing}}},
           {"wwr", r.wwr},
           {"k", r.k},
           {"window_area_m2", r.window_area_m2},
           {"shading_area_m2", r.shading_area_m2},
           {"values", r.values},
           {"key", r.key}};
}

inline void from_json(const json& j, SolutionRow& r) {
  j.at("id").get_to(r.id);
  j.at("run").get_to(r.run);
  j.at("rank").get_to(r.rank);
  j.at("fitness").get_to(r.fitness);
  j.at("edh").get_to(r.edh);
  j.at("edc").get_to(r.edc);
  j.at("nct").get_to(r.nct);
  j.at("q_sol_jul").get_to(r.q_sol_jul);
  const auto& p = j.at("penalties");
  p.at("solar").get_to(r.p_solar);
  p.at("window_u").get_to(r.p_window_u);
  p.at("k").get_to(r.p_k);
  p.at("min_glazing").get_to(r.p_min_glazing);
  j.at("wwr").get_to(r.wwr);
  j.at("k").get_to(r.k);
  j.at("window_area_m2").get_to(r.window_area_m2);
  j.at("shading_area_m2").get_to(r.shading_area_m2);
  j.at("values").get_to(r.values);
  j.at("key").get_to(r.key);
}

inline void to_json(json& j, const FieldSpec& f) { j = json{{"name", f.name}, {"kind", f.kind}}; }
inline void from_json(const json& j, FieldSpec& f) {
  j.at("name").get_to(f.name);
  j.at("kind").get_to(f.kind);
}

inline json table_to_json(const SolutionTable& t) { return json{{"fields", t.fields}, {"rows", t.rows}}; }

inline SolutionTable table_from_json(const json& j) {
  SolutionTable t;
  try {
    j.at("fields").get_to(t.fields);
    j.at("rows").get_to(t.rows);
  } catch (const json::exception& e) {
    throw ParseError(std::string("solution table: ") + e.what());
  }
  for (const auto& r : t.rows)
    if (r.values.size() != t.fields.size()) throw ParseError("solution row " + r.id + " has the wrong number of fields");
  return t;
}

}  // namespace fenestra::analysis
