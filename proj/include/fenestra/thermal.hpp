#pragma once
// Built-in hourly evaluator: a single-node zone with ideal heating/cooling,
// free-cooling ventilation, window solar gains, fixed shading and blinds.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenestra/building.hpp"
#include "fenestra/encoding.hpp"
#include "fenestra/error.hpp"
#include "fenestra/shading_control.hpp"
#include "fenestra/solar.hpp"
#include "fenestra/weather.hpp"

namespace fenestra {

inline constexpr double kAirVolumetricHeat = 1200.0;  // J/m3K
inline constexpr double kAirDensity = 1.2;
inline constexpr double kAirSpecificHeat = 1005.0;
inline constexpr double kJoulesPerKwh = 3.6e6;

struct GainSchedule {
  std::array<double, 24> occupancy{};
  std::array<double, 24> lighting_equipment{};
};

/// Occupancy full at night, a quarter in the morning and half in the
/// afternoon/evening; lighting and equipment peak in the evening.
inline GainSchedule default_gain_schedule() {
  GainSchedule s;
  for (int h = 0; h < 24; ++h) {
    s.occupancy[h] = (h >= 23 || h < 7) ? 1.0 : (h < 15 ? 0.25 : 0.5);
    if (h < 7) s.lighting_equipment[h] = 0.1;
    else if (h < 18) s.lighting_equipment[h] = 0.3;
    else if (h < 23) s.lighting_equipment[h] = 1.0;
    else s.lighting_equipment[h] = 0.5;
  }
  return s;
}

inline GainSchedule parse_gain_schedule(const json& j) {
  GainSchedule s;
  try {
    auto occ = j.at("occupancy").get<std::vector<double>>();
    auto le = j.at("lighting_equipment").get<std::vector<double>>();
    if (occ.size() != 24 || le.size() != 24) throw ParseError("schedule arrays need 24 hourly values");
    for (int h = 0; h < 24; ++h) {
      if (occ[h] < 0 || occ[h] > 1 || le[h] < 0 || le[h] > 1) throw ValidationError("schedule fractions must be in [0,1]");
      s.occupancy[h] = occ[h];
      s.lighting_equipment[h] = le[h];
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("schedule: ") + e.what());
  }
  return s;
}

inline GainSchedule load_gain_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schedule file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("schedule " + path.string() + ": " + e.what());
  }
  return parse_gain_schedule(j);
}

/// Comfort band used to count not-comfortable hours.
enum class ComfortMode { Seasonal, EitherClothing };
NLOHMANN_JSON_SERIALIZE_ENUM(ComfortMode, {{ComfortMode::Seasonal, "seasonal"},
                                           {ComfortMode::EitherClothing, "either_clothing"}})

struct ComfortBand {
  double lo, hi;
};

inline ComfortBand comfort_band(ComfortMode mode, int month) {
  if (mode == ComfortMode::EitherClothing) return {20.5, 28.0};
  const bool warm = month >= 5 && month <= 10;
  return warm ? ComfortBand{23.0, 28.0} : ComfortBand{20.5, 25.5};
}

struct SimulationOptions {
  ComfortMode comfort = ComfortMode::Seasonal;
  Schedule1Reading schedule1 = Schedule1Reading::InterSeasonal;
  int warmup_days = 30;
  int substeps = 6;
  bool keep_traces = false;
};

inline void to_json(json& j, const SimulationOptions& o) {
  j = json{{"comfort", o.comfort}, {"schedule1", o.schedule1}, {"warmup_days", o.warmup_days},
           {"substeps", o.substeps}};
}
inline void from_json(const json& j, SimulationOptions& o) {
  o.comfort = j.value("comfort", ComfortMode::Seasonal);
  o.schedule1 = j.value("schedule1", Schedule1Reading::InterSeasonal);
  o.warmup_days = j.value("warmup_days", 30);
  o.substeps = j.value("substeps", 6);
}

struct EnergyLedger {
  double solar_j = 0;
  double internal_j = 0;
  double heating_j = 0;
  double cooling_j = 0;
  double conduction_ventilation_j = 0;  // fixed-conductance losses
  double free_cooling_j = 0;
  double stored_j = 0;  // C * (T_end - T_start)

  double residual() const {
    return solar_j + internal_j + heating_j - cooling_j - conduction_ventilation_j - free_cooling_j - stored_j;
  }
  double scale() const {
    return std::abs(solar_j) + std::abs(internal_j) + heating_j + cooling_j + std::abs(conduction_ventilation_j) +
           std::abs(free_cooling_j) + std::abs(stored_j);
  }
  double relative_residual() const { return scale() > 0 ? std::abs(residual()) / scale() : 0.0; }
};

struct SimulationResult {
  double edh = 0;  // kWh/m2 year
  double edc = 0;
  double nct = 0;        // h/year
  double q_sol_jul = 0;  // kWh/m2
  EnergyLedger ledger;
  std::vector<float> zone_temp;
  std::vector<float> heating_w;
  std::vector<float> cooling_w;
  std::vector<float> solar_w;
};

inline json result_to_json(const SimulationResult& r) {
  return json{{"edh", r.edh}, {"edc", r.edc}, {"nct", r.nct}, {"q_sol_jul", r.q_sol_jul}};
}

inline void validate(const SimulationResult& r) {
  for (double v : {r.edh, r.edc, r.nct, r.q_sol_jul}) {
    if (!std::isfinite(v)) throw IncompleteResult("simulation result has a non-finite metric");
    if (v < 0) throw ValidationError("simulation metrics must be nonnegative");
  }
}

// ---------------------------------------------------------------------------
// Zone integrator

struct ZoneParams {
  double capacitance_j_k = 1e6;
  double conductance_w_k = 50;      // envelope + ventilation + infiltration
  double free_cooling_max_w_k = 0;  // extra ventilation available for free cooling
  double heating_setpoint_c = 22;
  double cooling_setpoint_c = 25;
  double floor_area_m2 = 60;
};

/// Hourly boundary conditions. Solar gains are given per façade before
/// blinds; `blinds` maps each façade to its program.
struct ZoneDrivers {
  std::vector<int> month;  // 1..12 per hour
  std::vector<double> t_out;
  std::vector<double> internal_w;
  std::vector<bool> daytime;
  std::vector<std::vector<double>> facade_solar_w;     // [facade][hour]
  std::vector<std::vector<double>> facade_incident;    // [facade][hour], W/m2 total on façade
  std::vector<ShadingControlProgram> blinds;           // per façade
  double slat_reflectance = 0.57;
};

inline SimulationResult run_zone(const ZoneParams& p, const ZoneDrivers& d, const SimulationOptions& opt = {}) {
  const std::size_t n = d.t_out.size();
  if (n == 0 || d.month.size() != n || d.internal_w.size() != n || d.daytime.size() != n)
    throw ValidationError("zone drivers have inconsistent lengths");
  if (!(p.capacitance_j_k > 0)) throw ValidationError("zone capacitance must be positive");
  const std::size_t nf = d.facade_solar_w.size();
  if (d.facade_incident.size() != nf || d.blinds.size() != nf)
    throw ValidationError("façade drivers have inconsistent counts");

  const int sub = std::max(1, opt.substeps);
  const double dt = 3600.0 / sub;
  const double k = dt / p.capacitance_j_k;
  const std::size_t warm = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(0, opt.warmup_days)) * 24);

  SimulationResult r;
  if (opt.keep_traces) {
    r.zone_temp.resize(n);
    r.heating_w.resize(n);
    r.cooling_w.resize(n);
    r.solar_w.resize(n);
  }
  double T = p.heating_setpoint_c;
  double t_start = T;
  double july_solar_j = 0;
  int nct = 0;
  EnergyLedger& L = r.ledger;

  // Warm-up replays the last days of the year, then the recorded year runs.
  for (std::size_t step = 0; step < warm + n; ++step) {
    const bool recording = step >= warm;
    const std::size_t h = recording ? step - warm : n - warm + step;
    if (recording && h == 0) t_start = T;

    double q_solar = 0;
    for (std::size_t f = 0; f < nf; ++f) {
      const double g = d.facade_solar_w[f][h];
      if (g <= 0) continue;
      const auto bs = blind_state(d.blinds[f], d.month[h], d.daytime[h], d.facade_incident[f][h], T,
                                  d.slat_reflectance, opt.schedule1);
      q_solar += g * bs.multiplier;
    }
    const double q_int = d.internal_w[h];
    const double t_out = d.t_out[h];

    double t_sum = 0;
    double heat_h = 0, cool_h = 0;
    for (int s = 0; s < sub; ++s) {
      const double loss = p.conductance_w_k * (T - t_out);
      double t_new = T + k * (q_solar + q_int - loss);
      double fc = 0;
      if (t_new > p.cooling_setpoint_c && t_out < T && p.free_cooling_max_w_k > 0) {
        const double needed = (t_new - p.cooling_setpoint_c) / k;  // W to remove
        const double h_fc = std::min(p.free_cooling_max_w_k, needed / (T - t_out));
        fc = h_fc * (T - t_out);
        t_new -= k * fc;
      }
      double q_heat = 0, q_cool = 0;
      if (t_new < p.heating_setpoint_c) {
        q_heat = (p.heating_setpoint_c - t_new) / k;
        t_new = p.heating_setpoint_c;
      } else if (t_new > p.cooling_setpoint_c) {
        q_cool = (t_new - p.cooling_setpoint_c) / k;
        t_new = p.cooling_setpoint_c;
      }
      if (!(t_new >= -50.0 && t_new <= 80.0))
        throw NumericalError("zone temperature left [-50, 80] °C at hour " + std::to_string(h));
      if (recording) {
        L.solar_j += q_solar * dt;
        L.internal_j += q_int * dt;
        L.conduction_ventilation_j += loss * dt;
        L.free_cooling_j += fc * dt;
        L.heating_j += q_heat * dt;
        L.cooling_j += q_cool * dt;
      }
      heat_h += q_heat / sub;
      cool_h += q_cool / sub;
      T = t_new;
      t_sum += T;
    }
    if (!recording) continue;
    const double t_mean = t_sum / sub;
    const auto band = comfort_band(opt.comfort, d.month[h]);
    if (t_mean < band.lo - 1e-9 || t_mean > band.hi + 1e-9) ++nct;
    if (d.month[h] == 7) july_solar_j += q_solar * 3600.0;
    if (opt.keep_traces) {
      r.zone_temp[h] = static_cast<float>(t_mean);
      r.heating_w[h] = static_cast<float>(heat_h);
      r.cooling_w[h] = static_cast<float>(cool_h);
      r.solar_w[h] = static_cast<float>(q_solar);
    }
  }
  L.stored_j = p.capacitance_j_k * (T - t_start);
  r.edh = L.heating_j / kJoulesPerKwh / p.floor_area_m2;
  r.edc = L.cooling_j / kJoulesPerKwh / p.floor_area_m2;
  r.nct = nct;
  r.q_sol_jul = july_solar_j / kJoulesPerKwh / p.floor_area_m2;
  return r;
}

// ---------------------------------------------------------------------------
// Climate precomputation

/// Sun geometry and façade irradiance for one weather file and building,
/// computed once and shared by every simulation.
class Climate {
 public:
  struct FacadeHour {
    Incident incident;
    ShadowSlopes slopes;
  };

  Climate(WeatherSeries weather, const BuildingModel& building) : weather_(std::move(weather)) {
    const std::size_t n = weather_.hours.size();
    daytime_.resize(n);
    facades_.resize(building.facades.size(), std::vector<FacadeHour>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& wh = weather_.hours[i];
      const int doy = day_of_year(wh.month, wh.day);
      const double clock = wh.hour - 0.5;
      const double st = solar_time_h(clock, doy, weather_.site.longitude_deg, weather_.site.utc_offset_h);
      const SunPosition sun = solar_position(weather_.site.latitude_deg, doy, st);
      daytime_[i] = sun.up();
      for (std::size_t f = 0; f < building.facades.size(); ++f) {
        const double az = building.facades[f].orientation_deg;
        facades_[f][i] = {incident_irradiance(wh.dni, wh.dhi, wh.ghi, sun, az), shadow_slopes(sun, az)};
      }
    }
  }

  const WeatherSeries& weather() const { return weather_; }
  const std::vector<bool>& daytime() const { return daytime_; }
  const std::vector<FacadeHour>& facade(std::size_t f) const { return facades_.at(f); }
  std::size_t facade_count() const { return facades_.size(); }

 private:
  WeatherSeries weather_;
  std::vector<bool> daytime_;
  std::vector<std::vector<FacadeHour>> facades_;
};

// ---------------------------------------------------------------------------
// Simulator

/// Cached sunlit series (about 35 kB each) kept before the memo is flushed.
inline constexpr std::size_t kSunlitMemoEntries = 4000;

class Simulator {
 public:
  Simulator(std::shared_ptr<const Climate> climate, BuildingModel building, GainSchedule schedule = default_gain_schedule(),
            SimulationOptions options = {})
      : climate_(std::move(climate)), building_(std::move(building)), schedule_(schedule), options_(options) {
    if (climate_->facade_count() != building_.facades.size())
      throw ValidationError("climate was prepared for a different building");
  }

  const BuildingModel& building() const { return building_; }
  const SimulationOptions& options() const { return options_; }
  const Climate& climate() const { return *climate_; }

  ZoneParams zone_params(const CanonicalDesign& design) const {
    const auto& b = building_;
    ZoneParams p;
    p.capacitance_j_k = b.internal_heat_capacity_kj_m2k * 1000.0 * b.internal_mass_area_m2 +
                        kAirDensity * kAirSpecificHeat * b.volume_m3();
    double ua = 0;
    std::size_t k = 0;
    for (const auto& f : b.facades) {
      double win = 0;
      for (std::size_t s = 0; s < f.slots.size(); ++s, ++k) {
        const auto& w = design.windows.at(k);
        win += w.area();
        ua += w.area() * window_u(w);
      }
      ua += (f.gross_area() - win) * b.wall_u;
    }
    const double infiltration_ach = b.n50 / 20.0;
    p.conductance_w_k = ua + b.ventilation_m3_s * kAirVolumetricHeat +
                        infiltration_ach * b.volume_m3() / 3600.0 * kAirVolumetricHeat;
    p.free_cooling_max_w_k = b.free_cooling_max_ach * b.volume_m3() / 3600.0 * kAirVolumetricHeat;
    p.heating_setpoint_c = b.heating_setpoint_c;
    p.cooling_setpoint_c = b.cooling_setpoint_c;
    p.floor_area_m2 = b.zone_floor_area_m2;
    return p;
  }

  ZoneDrivers drivers(const CanonicalDesign& design) const {
    const auto& wx = climate_->weather();
    const std::size_t n = wx.hours.size();
    ZoneDrivers d;
    d.month.resize(n);
    d.t_out.resize(n);
    d.internal_w.resize(n);
    d.daytime = climate_->daytime();
    const double occ_peak = building_.occupants * building_.occupant_gain_w;
    const double le_peak = building_.lighting_equipment_w_m2 * building_.zone_floor_area_m2;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& h = wx.hours[i];
      const int hod = (h.hour - 1) % 24;
      d.month[i] = h.month;
      d.t_out[i] = h.dry_bulb_c;
      d.internal_w[i] = occ_peak * schedule_.occupancy[hod] + le_peak * schedule_.lighting_equipment[hod];
    }
    const auto slot_facade = building_.slot_facades();
    const std::size_t nf = building_.facades.size();
    d.facade_solar_w.assign(nf, std::vector<double>(n, 0.0));
    d.facade_incident.assign(nf, std::vector<double>(n, 0.0));
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& fh = climate_->facade(f);
      for (std::size_t i = 0; i < n; ++i) d.facade_incident[f][i] = fh[i].incident.total();
      d.blinds.push_back(shading_program(design.facades.at(f).shading_control));
    }
    for (std::size_t s = 0; s < design.windows.size(); ++s) {
      const std::size_t f = slot_facade[s];
      const auto& w = design.windows[s];
      const auto& fh = climate_->facade(f);
      const double gain_coeff = w.glazing.shgc * w.glazed_area();
      const auto sunlit = sunlit_series(f, w.width_m, w.height_m, design.facades[f].shading);
      auto& out = d.facade_solar_w[f];
      for (std::size_t i = 0; i < n; ++i) {
        const double direct = fh[i].incident.direct;
        const double lit = direct > 0 && sunlit ? (*sunlit)[i] : 1.0;
        out[i] += (direct * lit + fh[i].incident.diffuse) * gain_coeff;
      }
    }
    d.slat_reflectance = design.reflectance;
    return d;
  }

  SimulationResult simulate(const CanonicalDesign& design) const {
    auto r = run_zone(zone_params(design), drivers(design), options_);
    validate(r);
    return r;
  }

 private:
  using Series = std::shared_ptr<const std::vector<float>>;

  /// Sunlit fraction per hour for one window geometry, memoized; null when
  /// the façade has no fixed shading.
  Series sunlit_series(std::size_t facade, double w, double h, const ShadingGeometry& g) const {
    if (!g.any()) return nullptr;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu|%.2f|%.2f|%.2f|%.2f|%.2f|%.2f|%.2f|%.2f", facade, w, h, g.overhang_depth_m,
                  g.overhang_ext_left_m, g.overhang_ext_right_m, g.fin_left_depth_m, g.fin_right_depth_m,
                  g.fin_ext_top_m);
    const std::string key = buf;
    {
      std::lock_guard lock(memo_mu_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const auto& fh = climate_->facade(facade);
    auto v = std::make_shared<std::vector<float>>(fh.size(), 1.0f);
    for (std::size_t i = 0; i < fh.size(); ++i)
      if (fh[i].incident.direct > 0) (*v)[i] = static_cast<float>(sunlit_fraction(w, h, g, fh[i].slopes));
    std::lock_guard lock(memo_mu_);
    if (memo_.size() > kSunlitMemoEntries) memo_.clear();
    memo_.emplace(key, v);
    return v;
  }

  std::shared_ptr<const Climate> climate_;
  BuildingModel building_;
  GainSchedule schedule_;
  SimulationOptions options_;
  mutable std::mutex memo_mu_;
  mutable std::map<std::string, Series> memo_;
};

inline SimulationResult simulate(const CanonicalDesign& design, const BuildingModel& building,
                                 const WeatherSeries& weather, const SimulationOptions& options = {},
                                 const GainSchedule& schedule = default_gain_schedule()) {
  auto climate = std::make_shared<const Climate>(weather, building);
  return Simulator(climate, building, schedule, options).simulate(design);
}

}  // namespace fenestra
