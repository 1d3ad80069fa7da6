#pragma once
// Movable blind programs SC0..SC6.

#include <algorithm>
#include <array>
#include <string>

#include <json.hpp>

#include "fenestra/error.hpp"

namespace fenestra {

enum class BlindSchedule { None, AnnualWindowShading1, AnnualWindowShading2, Always };
enum class BlindTrigger { SolarRadiation, SolarAndTemperature };
enum class SlatMode { BlockSun, Horizontal };

/// Which months the first annual schedule activates in. The default reading
/// activates in the inter-seasonal months; the alternative only in summer.
enum class Schedule1Reading { InterSeasonal, SummerOnly };
NLOHMANN_JSON_SERIALIZE_ENUM(Schedule1Reading, {{Schedule1Reading::InterSeasonal, "inter_seasonal"},
                                                {Schedule1Reading::SummerOnly, "summer_only"}})

struct ShadingControlProgram {
  int id = 0;
  BlindSchedule schedule = BlindSchedule::None;
  BlindTrigger trigger = BlindTrigger::SolarRadiation;
  SlatMode slat_mode = SlatMode::BlockSun;
  double radiation_threshold = 200.0;  // W/m2 on the façade
  double temperature_threshold = 27.0;  // °C, indoor
};

inline ShadingControlProgram shading_program(int id) {
  using S = BlindSchedule;
  using T = BlindTrigger;
  using M = SlatMode;
  switch (id) {
    case 0: return {0, S::None, T::SolarRadiation, M::BlockSun};
    case 1: return {1, S::AnnualWindowShading1, T::SolarRadiation, M::BlockSun};
    case 2: return {2, S::AnnualWindowShading1, T::SolarRadiation, M::Horizontal};
    case 3: return {3, S::AnnualWindowShading2, T::SolarRadiation, M::BlockSun};
    case 4: return {4, S::AnnualWindowShading2, T::SolarRadiation, M::Horizontal};
    case 5: return {5, S::Always, T::SolarAndTemperature, M::BlockSun};
    case 6: return {6, S::Always, T::SolarAndTemperature, M::Horizontal};
    default: throw ValidationError("shading control program must be SC0..SC6, got " + std::to_string(id));
  }
}

inline bool schedule_allows(BlindSchedule s, int month, Schedule1Reading reading) {
  switch (s) {
    case BlindSchedule::None: return false;
    case BlindSchedule::Always: return true;
    case BlindSchedule::AnnualWindowShading2: return month >= 4 && month <= 10;
    case BlindSchedule::AnnualWindowShading1:
      if (reading == Schedule1Reading::SummerOnly) return month >= 6 && month <= 8;
      return month == 4 || month == 5 || month == 9 || month == 10;
  }
  return false;
}

inline constexpr double kBlockSunTransmission = 0.10;
inline constexpr double kHorizontalTransmission = 0.35;
inline constexpr double kMinBlindTransmission = 0.05;

/// Deployed-blind transmission; darker slats (low reflectance) admit slightly
/// less, lighter slats slightly more, within +-0.03.
inline double blind_transmission(SlatMode mode, double slat_reflectance) {
  const double base = mode == SlatMode::BlockSun ? kBlockSunTransmission : kHorizontalTransmission;
  const double t = std::clamp((slat_reflectance - 0.29) / (0.85 - 0.29), 0.0, 1.0);
  return std::max(kMinBlindTransmission, base + 0.03 * (2.0 * t - 1.0));
}

struct BlindState {
  bool active = false;
  double multiplier = 1.0;
};

inline BlindState blind_state(const ShadingControlProgram& sc, int month, bool daytime, double incident_w_m2,
                              double zone_temp_c, double slat_reflectance = 0.57,
                              Schedule1Reading reading = Schedule1Reading::InterSeasonal) {
  if (!daytime || !schedule_allows(sc.schedule, month, reading)) return {};
  if (incident_w_m2 <= sc.radiation_threshold) return {};
  if (sc.trigger == BlindTrigger::SolarAndTemperature && zone_temp_c <= sc.temperature_threshold) return {};
  return {true, blind_transmission(sc.slat_mode, slat_reflectance)};
}

}  // namespace fenestra
