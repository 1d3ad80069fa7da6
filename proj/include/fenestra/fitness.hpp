#pragma once
// Scalar fitness: weighted normalized quality terms with satisfaction
// attenuation, plus regulatory penalties scaled far above them.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenestra/building.hpp"
#include "fenestra/encoding.hpp"
#include "fenestra/error.hpp"
#include "fenestra/thermal.hpp"

namespace fenestra {

enum class Location { Leon, Madrid, Sevilla };
NLOHMANN_JSON_SERIALIZE_ENUM(Location, {{Location::Leon, "Leon"}, {Location::Madrid, "Madrid"}, {Location::Sevilla, "Sevilla"}})

enum class Metric { EDh, EDc, NCT, FixedShadingCost, WindowCost };
NLOHMANN_JSON_SERIALIZE_ENUM(Metric, {{Metric::EDh, "EDh"},
                                      {Metric::EDc, "EDc"},
                                      {Metric::NCT, "NCT"},
                                      {Metric::FixedShadingCost, "FixedShadingCost"},
                                      {Metric::WindowCost, "WindowCost"}})

inline constexpr double kNoSatisfaction = -std::numeric_limits<double>::infinity();

struct QualitySpec {
  Metric metric = Metric::EDh;
  double min = 0;
  double max = 1;
  double satisfaction = kNoSatisfaction;
  double weight = 1;
};

/// Weight of a quality term from its real-world equivalence to energy.
inline double weight_from_real_world(double alpha_v, double range_v, double area = 60.0, double range_e = 50.0) {
  return alpha_v * range_v / (area * range_e);
}

inline double normalize(double value, const QualitySpec& s) {
  return std::clamp((value - s.min) / (s.max - s.min), 0.0, 1.0);
}

inline double satisfaction_multiplier(double value, const QualitySpec& s, double alpha_s = 1.0 / 1000.0) {
  return value <= s.satisfaction ? alpha_s : 1.0;
}

// Penalties: zero up to the regulatory limit, linear beyond it.

inline double penalty_solar(double q_sol_jul, double limit = 2.0, double slope = 1.5) {
  return std::max(0.0, (q_sol_jul - limit) / slope);
}

inline double window_u_limit(Location loc) { return loc == Location::Sevilla ? 2.3 : 1.8; }
inline double k_limit(Location loc) {
  switch (loc) {
    case Location::Leon: return 0.54;
    case Location::Madrid: return 0.59;
    case Location::Sevilla: return 0.69;
  }
  return 0.59;
}

inline double penalty_window_u(double u_w, double limit, double ceiling = 5.5) {
  return std::max(0.0, (u_w - limit) / (ceiling - limit));
}
inline double penalty_window_u(double u_w, Location loc) { return penalty_window_u(u_w, window_u_limit(loc)); }

inline double penalty_k(double k, double k_max, double ceiling = 0.9) { return std::max(0.0, (k - k_max) / (ceiling - k_max)); }
inline double penalty_k(double k, Location loc) { return penalty_k(k, k_limit(loc)); }

inline double penalty_min_glazing(double r_wf, double r_min = kMinGlazingRatio) {
  return std::max(0.0, (r_min - r_wf) / r_min);
}

struct FitnessConfig {
  Location location = Location::Madrid;
  double alpha_p = 1000.0;
  double alpha_s = 1.0 / 1000.0;
  std::vector<QualitySpec> qualities;
  double solar_limit = 2.0;
  double solar_slope = 1.5;
  double window_u_limit = 1.8;
  double window_u_ceiling = 5.5;
  double k_max = 0.59;
  double k_ceiling = 0.9;
  double min_glazing_ratio = kMinGlazingRatio;

  const QualitySpec& quality(Metric m) const {
    for (const auto& q : qualities)
      if (q.metric == m) return q;
    throw ValidationError("fitness config has no quality spec for " + json(m).get<std::string>());
  }
};

inline double heating_satisfaction(Location loc) {
  switch (loc) {
    case Location::Leon: return 46;
    case Location::Madrid: return 30;
    case Location::Sevilla: return 12;
  }
  return 30;
}
inline double cooling_satisfaction(Location loc) {
  switch (loc) {
    case Location::Leon: return 10;
    case Location::Madrid: return 15;
    case Location::Sevilla: return 20;
  }
  return 15;
}

/// Energy terms span [sat - 5, sat + 50] so one kWh/m2 weighs the same for heating and cooling.
inline QualitySpec energy_quality(Metric m, double satisfaction) {
  return {m, satisfaction - 5.0, satisfaction + 50.0, satisfaction, 1.0};
}

inline constexpr double kNctMin = 388, kNctMax = 938, kNctSatisfaction = 438;
inline constexpr double kShadingCostMax = 44.27;
inline constexpr double kWindowCostMin = 3.0, kWindowCostMax = 17.57;

inline FitnessConfig location_preset(Location loc) {
  FitnessConfig c;
  c.location = loc;
  c.qualities = {
      energy_quality(Metric::EDh, heating_satisfaction(loc)),
      energy_quality(Metric::EDc, cooling_satisfaction(loc)),
      {Metric::NCT, kNctMin, kNctMax, kNctSatisfaction, weight_from_real_world(6, 500)},
      {Metric::FixedShadingCost, 0.0, kShadingCostMax, kNoSatisfaction, weight_from_real_world(20, kShadingCostMax)},
      {Metric::WindowCost, kWindowCostMin, kWindowCostMax, kNoSatisfaction,
       weight_from_real_world(60, kWindowCostMax - kWindowCostMin)},
  };
  c.window_u_limit = window_u_limit(loc);
  c.k_max = k_limit(loc);
  return c;
}

inline void validate(const FitnessConfig& c) {
  for (Metric m : {Metric::EDh, Metric::EDc, Metric::NCT, Metric::FixedShadingCost, Metric::WindowCost}) {
    const auto& q = c.quality(m);
    if (!(q.min < q.max)) throw ValidationError("quality " + json(m).get<std::string>() + ": min must be below max");
    if (std::isfinite(q.satisfaction) && !(q.min < q.satisfaction && q.satisfaction <= q.max))
      throw ValidationError("quality " + json(m).get<std::string>() + ": satisfaction outside (min, max]");
    if (!(q.weight >= 0)) throw ValidationError("quality weights must be nonnegative");
  }
  if (!(c.alpha_p > 0) || !(c.alpha_s > 0)) throw ValidationError("alpha_p and alpha_s must be positive");
}

inline void to_json(json& j, const QualitySpec& q) {
  j = json{{"metric", q.metric}, {"min", q.min}, {"max", q.max}, {"weight", q.weight}};
  j["satisfaction"] = std::isfinite(q.satisfaction) ? json(q.satisfaction) : json(nullptr);
}
inline void from_json(const json& j, QualitySpec& q) {
  j.at("metric").get_to(q.metric);
  j.at("min").get_to(q.min);
  j.at("max").get_to(q.max);
  j.at("weight").get_to(q.weight);
  q.satisfaction = j.contains("satisfaction") && !j["satisfaction"].is_null() ? j["satisfaction"].get<double>() : kNoSatisfaction;
}
inline void to_json(json& j, const FitnessConfig& c) {
  j = json{{"location", c.location},       {"alpha_p", c.alpha_p},         {"alpha_s", c.alpha_s},
           {"qualities", c.qualities},     {"solar_limit", c.solar_limit}, {"window_u_limit", c.window_u_limit},
           {"k_max", c.k_max},             {"min_glazing_ratio", c.min_glazing_ratio}};
}
/// Starts from the location preset; any present field overrides it.
inline void from_json(const json& j, FitnessConfig& c) {
  c = location_preset(j.value("location", Location::Madrid));
  c.alpha_p = j.value("alpha_p", c.alpha_p);
  c.alpha_s = j.value("alpha_s", c.alpha_s);
  if (j.contains("qualities")) {
    for (const auto& qj : j.at("qualities")) {
      auto q = qj.get<QualitySpec>();
      for (auto& existing : c.qualities)
        if (existing.metric == q.metric) existing = q;
    }
  }
  c.solar_limit = j.value("solar_limit", c.solar_limit);
  c.window_u_limit = j.value("window_u_limit", c.window_u_limit);
  c.k_max = j.value("k_max", c.k_max);
  c.min_glazing_ratio = j.value("min_glazing_ratio", c.min_glazing_ratio);
}

// ---------------------------------------------------------------------------
// Breakdown

struct QualityTerm {
  Metric metric = Metric::EDh;
  double raw = 0;
  double alpha = 1;
  bool satisfied = false;
  double normalized = 0;
  double weight = 0;
  double contribution() const { return weight * normalized; }
};

struct Penalties {
  double solar = 0;
  double window_u = 0;
  double k = 0;
  double min_glazing = 0;
  double sum() const { return solar + window_u + k + min_glazing; }
  bool compliant() const { return solar == 0 && window_u == 0 && k == 0 && min_glazing == 0; }
};

/// Design quantities the fitness reads besides the simulation outputs.
struct DesignMetrics {
  double window_area_m2 = 0;
  double shading_area_m2 = 0;
  double k = 0;
  double wwr = 0;
  std::vector<double> window_u;              // slot order
  std::map<Room, double> room_glazing_ratio;  // habitable rooms
};

struct FitnessBreakdown {
  std::array<QualityTerm, 5> terms{};
  Penalties penalties;
  double alpha_p = 1000;
  double total = 0;
  DesignMetrics metrics;
  SimulationResult result;  // metrics only, traces dropped

  double quality_sum() const {
    double s = 0;
    for (const auto& t : terms) s += t.contribution();
    return s;
  }
  /// Recomputes F from the stored parts.
  double recompute() const { return quality_sum() + alpha_p * penalties.sum(); }
  const QualityTerm& term(Metric m) const { return terms[static_cast<std::size_t>(m)]; }
};

inline DesignMetrics design_metrics(const CanonicalDesign& d, const BuildingModel& b) {
  DesignMetrics m;
  const auto sf = b.slot_facades();
  std::vector<double> areas;
  std::vector<WindowAreaU> au;
  for (std::size_t s = 0; s < d.windows.size(); ++s) {
    const auto& w = d.windows[s];
    const double u = window_u(w);
    m.window_u.push_back(u);
    areas.push_back(w.area());
    au.push_back({w.area(), u});
    m.window_area_m2 += w.area();
    m.shading_area_m2 += d.facades.at(sf[s]).shading.device_area(w.width_m, w.height_m);
  }
  m.k = heat_transfer_k(b, std::span<const WindowAreaU>(au));
  m.wwr = window_to_wall_ratio(b, m.window_area_m2);
  m.room_glazing_ratio = room_glazing_ratios(b, areas);
  return m;
}

inline Penalties compute_penalties(const SimulationResult& r, const DesignMetrics& m, const FitnessConfig& c) {
  Penalties p;
  p.solar = penalty_solar(r.q_sol_jul, c.solar_limit, c.solar_slope);
  for (double u : m.window_u) p.window_u += penalty_window_u(u, c.window_u_limit, c.window_u_ceiling);
  p.k = penalty_k(m.k, c.k_max, c.k_ceiling);
  for (const auto& [room, ratio] : m.room_glazing_ratio) p.min_glazing += penalty_min_glazing(ratio, c.min_glazing_ratio);
  return p;
}

inline FitnessBreakdown total_fitness(const SimulationResult& r, const DesignMetrics& m, const FitnessConfig& c) {
  for (double v : {r.edh, r.edc, r.nct, r.q_sol_jul})
    if (!std::isfinite(v)) throw IncompleteResult("simulation result is missing a metric");
  FitnessBreakdown fb;
  fb.alpha_p = c.alpha_p;
  fb.metrics = m;
  fb.result.edh = r.edh;
  fb.result.edc = r.edc;
  fb.result.nct = r.nct;
  fb.result.q_sol_jul = r.q_sol_jul;
  fb.result.ledger = r.ledger;
  const std::array<double, 5> raw{r.edh, r.edc, r.nct, m.shading_area_m2, m.window_area_m2};
  for (std::size_t i = 0; i < 5; ++i) {
    const auto metric = static_cast<Metric>(i);
    const auto& spec = c.quality(metric);
    QualityTerm t;
    t.metric = metric;
    t.raw = raw[i];
    t.alpha = satisfaction_multiplier(raw[i], spec, c.alpha_s);
    t.satisfied = t.alpha != 1.0;
    t.normalized = normalize(t.alpha * raw[i], spec);
    t.weight = spec.weight;
    fb.terms[i] = t;
  }
  fb.penalties = compute_penalties(r, m, c);
  fb.total = fb.recompute();
  return fb;
}

inline FitnessBreakdown total_fitness(const SimulationResult& r, const CanonicalDesign& d, const BuildingModel& b,
                                      const FitnessConfig& c) {
  return total_fitness(r, design_metrics(d, b), c);
}

inline json breakdown_to_json(const FitnessBreakdown& fb) {
  json terms = json::array();
  for (const auto& t : fb.terms)
    terms.push_back({{"metric", t.metric},
                     {"raw", t.raw},
                     {"alpha", t.alpha},
                     {"satisfied", t.satisfied},
                     {"normalized", t.normalized},
                     {"weight", t.weight}});
  json rooms = json::object();
  for (const auto& [room, r] : fb.metrics.room_glazing_ratio) rooms[json(room).get<std::string>()] = r;
  return json{{"total", fb.total},
              {"alpha_p", fb.alpha_p},
              {"terms", terms},
              {"penalties",
               {{"solar", fb.penalties.solar},
                {"window_u", fb.penalties.window_u},
                {"k", fb.penalties.k},
                {"min_glazing", fb.penalties.min_glazing}}},
              {"result", result_to_json(fb.result)},
              {"metrics",
               {{"window_area_m2", fb.metrics.window_area_m2},
                {"shading_area_m2", fb.metrics.shading_area_m2},
                {"k", fb.metrics.k},
                {"wwr", fb.metrics.wwr},
                {"window_u", fb.metrics.window_u},
                {"room_glazing_ratio", rooms}}}};
}

inline FitnessBreakdown breakdown_from_json(const json& j) {
  FitnessBreakdown fb;
  try {
    j.at("alpha_p").get_to(fb.alpha_p);
    const auto& terms = j.at("terms");
    if (terms.size() != fb.terms.size()) throw ParseError("breakdown needs five quality terms");
    for (std::size_t i = 0; i < fb.terms.size(); ++i) {
      auto& t = fb.terms[i];
      terms[i].at("metric").get_to(t.metric);
      terms[i].at("raw").get_to(t.raw);
      terms[i].at("alpha").get_to(t.alpha);
      terms[i].at("satisfied").get_to(t.satisfied);
      terms[i].at("normalized").get_to(t.normalized);
      terms[i].at("weight").get_to(t.weight);
    }
    const auto& p = j.at("penalties");
    p.at("solar").get_to(fb.penalties.solar);
    p.at("window_u").get_to(fb.penalties.window_u);
    p.at("k").get_to(fb.penalties.k);
    p.at("min_glazing").get_to(fb.penalties.min_glazing);
    const auto& r = j.at("result");
    r.at("edh").get_to(fb.result.edh);
    r.at("edc").get_to(fb.result.edc);
    r.at("nct").get_to(fb.result.nct);
    r.at("q_sol_jul").get_to(fb.result.q_sol_jul);
    const auto& m = j.at("metrics");
    m.at("window_area_m2").get_to(fb.metrics.window_area_m2);
    m.at("shading_area_m2").get_to(fb.metrics.shading_area_m2);
    m.at("k").get_to(fb.metrics.k);
    m.at("wwr").get_to(fb.metrics.wwr);
    m.at("window_u").get_to(fb.metrics.window_u);
    for (const auto& [room, v] : m.at("room_glazing_ratio").items())
      fb.metrics.room_glazing_ratio[json(room).get<Room>()] = v.get<double>();
    j.at("total").get_to(fb.total);
  } catch (const json::exception& e) {
    throw ParseError(std::string("fitness breakdown: ") + e.what());
  }
  return fb;
}

}  // namespace fenestra
