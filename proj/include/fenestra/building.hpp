#pragma once
// Case-study dwelling: a single conditioned zone with exposed façades carrying
// window slots, plus the sizing and fixed-shading rule checks.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenestra/catalog.hpp"
#include "fenestra/error.hpp"

namespace fenestra {

enum class Room { Kitchen, Living, Bath, SingleBed, DoubleBed };

NLOHMANN_JSON_SERIALIZE_ENUM(Room, {{Room::Kitchen, "Kitchen"},
                                    {Room::Living, "Living"},
                                    {Room::Bath, "Bath"},
                                    {Room::SingleBed, "SingleBed"},
                                    {Room::DoubleBed, "DoubleBed"}})

inline bool is_habitable(Room r) { return r == Room::Living || r == Room::SingleBed || r == Room::DoubleBed; }

inline constexpr double kMinWindowWidth = 0.60;
inline constexpr double kMinWindowHeight = 1.00;
inline constexpr double kFixedWindowWidth = 0.60;
inline constexpr double kMinShadingDepth = 0.20;
inline constexpr double kMaxShadingDepth = 1.50;
inline constexpr double kMaxShadingExtension = 0.30;
inline constexpr double kCornerClip = 0.07;
inline constexpr double kMinGlazingRatio = 0.12;

/// Truncates toward zero onto the 0.1 m grid; the small epsilon absorbs
/// representation error such as 1.0 stored as 0.99999999.
inline double truncate_decimal(double v) {
  const double t = std::floor(std::abs(v) * 10.0 + 1e-9) / 10.0;
  return std::copysign(t, v) + 0.0;
}

/// Snaps an already-gridded value to its exact decimal representation.
inline double clean_decimal(double v) { return std::round(v * 10.0) / 10.0 + 0.0; }

struct WindowSlot {
  std::string id;
  Room room = Room::Living;
  double room_floor_area_m2 = 10;
  double designated_width_m = 1;
  double designated_height_m = 1;
  bool width_fixed = false;
};

struct Facade {
  std::string name;
  double orientation_deg = 0;
  double width_m = 1;
  double height_m = 1;
  std::vector<WindowSlot> slots;

  double gross_area() const { return width_m * height_m; }
  Orientation orientation() const { return classify_orientation(orientation_deg); }
};

struct ShadingGeometry {
  double overhang_depth_m = 0;
  double overhang_ext_left_m = 0;
  double overhang_ext_right_m = 0;
  double fin_left_depth_m = 0;
  double fin_right_depth_m = 0;
  double fin_ext_top_m = 0;

  bool has_overhang() const { return overhang_depth_m > 0; }
  bool has_left_fin() const { return fin_left_depth_m > 0; }
  bool has_right_fin() const { return fin_right_depth_m > 0; }
  bool any() const { return has_overhang() || has_left_fin() || has_right_fin(); }

  /// Surface area of the devices attached to a w x h window.
  double device_area(double width_m, double height_m) const {
    double a = overhang_depth_m * (width_m + overhang_ext_left_m + overhang_ext_right_m);
    a += (fin_left_depth_m + fin_right_depth_m) * (height_m + fin_ext_top_m);
    return a;
  }
  friend bool operator==(const ShadingGeometry&, const ShadingGeometry&) = default;
};

struct BuildingModel {
  double zone_floor_area_m2 = 60;
  double zone_height_m = 2.7;
  double wall_u = 0.22;
  double internal_heat_capacity_kj_m2k = 11.729;
  double internal_mass_area_m2 = 109.65;
  double n50 = 0.6;
  double compactness_m3_m2 = 2.7;
  int occupants = 4;
  double occupant_gain_w = 117;
  double lighting_equipment_w_m2 = 4.4;
  double ventilation_m3_s = 0.024;
  double free_cooling_max_ach = 4;
  double heating_setpoint_c = 22;
  double cooling_setpoint_c = 25;
  std::vector<Facade> facades;

  double volume_m3() const { return zone_floor_area_m2 * zone_height_m; }
  double envelope_area() const {
    double a = 0;
    for (const auto& f : facades) a += f.gross_area();
    return a;
  }
  std::size_t slot_count() const {
    std::size_t n = 0;
    for (const auto& f : facades) n += f.slots.size();
    return n;
  }
  /// Slots in façade order, flattened.
  std::vector<const WindowSlot*> slots() const {
    std::vector<const WindowSlot*> out;
    for (const auto& f : facades)
      for (const auto& s : f.slots) out.push_back(&s);
    return out;
  }
  /// Index of the façade owning each flattened slot.
  std::vector<std::size_t> slot_facades() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < facades.size(); ++i) out.insert(out.end(), facades[i].slots.size(), i);
    return out;
  }
};

// ---------------------------------------------------------------------------
// JSON

inline void to_json(json& j, const WindowSlot& s) {
  j = json{{"id", s.id},
           {"room", s.room},
           {"room_floor_area_m2", s.room_floor_area_m2},
           {"designated_width_m", s.designated_width_m},
           {"designated_height_m", s.designated_height_m},
           {"width_fixed", s.width_fixed}};
}
inline void from_json(const json& j, WindowSlot& s) {
  j.at("id").get_to(s.id);
  j.at("room").get_to(s.room);
  j.at("room_floor_area_m2").get_to(s.room_floor_area_m2);
  j.at("designated_width_m").get_to(s.designated_width_m);
  j.at("designated_height_m").get_to(s.designated_height_m);
  s.width_fixed = j.value("width_fixed", false);
}
inline void to_json(json& j, const Facade& f) {
  j = json{{"name", f.name}, {"azimuth_deg", f.orientation_deg}, {"width_m", f.width_m},
           {"height_m", f.height_m}, {"slots", f.slots}};
}
inline void from_json(const json& j, Facade& f) {
  j.at("name").get_to(f.name);
  j.at("azimuth_deg").get_to(f.orientation_deg);
  j.at("width_m").get_to(f.width_m);
  j.at("height_m").get_to(f.height_m);
  j.at("slots").get_to(f.slots);
}
inline void to_json(json& j, const ShadingGeometry& g) {
  j = json{{"overhang_depth_m", g.overhang_depth_m},   {"overhang_ext_left_m", g.overhang_ext_left_m},
           {"overhang_ext_right_m", g.overhang_ext_right_m}, {"fin_left_depth_m", g.fin_left_depth_m},
           {"fin_right_depth_m", g.fin_right_depth_m}, {"fin_ext_top_m", g.fin_ext_top_m}};
}
inline void from_json(const json& j, ShadingGeometry& g) {
  j.at("overhang_depth_m").get_to(g.overhang_depth_m);
  j.at("overhang_ext_left_m").get_to(g.overhang_ext_left_m);
  j.at("overhang_ext_right_m").get_to(g.overhang_ext_right_m);
  j.at("fin_left_depth_m").get_to(g.fin_left_depth_m);
  j.at("fin_right_depth_m").get_to(g.fin_right_depth_m);
  j.at("fin_ext_top_m").get_to(g.fin_ext_top_m);
}

inline json building_to_json(const BuildingModel& b) {
  return json{{"zone",
               {{"floor_area_m2", b.zone_floor_area_m2},
                {"height_m", b.zone_height_m},
                {"wall_u", b.wall_u},
                {"internal_heat_capacity_kj_m2k", b.internal_heat_capacity_kj_m2k},
                {"internal_mass_area_m2", b.internal_mass_area_m2},
                {"n50", b.n50},
                {"compactness_m3_m2", b.compactness_m3_m2},
                {"occupants", b.occupants},
                {"occupant_gain_w", b.occupant_gain_w},
                {"lighting_equipment_w_m2", b.lighting_equipment_w_m2},
                {"ventilation_m3_s", b.ventilation_m3_s},
                {"free_cooling_max_ach", b.free_cooling_max_ach},
                {"heating_setpoint_c", b.heating_setpoint_c},
                {"cooling_setpoint_c", b.cooling_setpoint_c}}},
              {"facades", b.facades}};
}

inline void validate(const BuildingModel& b) {
  if (!(b.zone_floor_area_m2 > 0) || !(b.zone_height_m > 0)) throw ValidationError("zone area and height must be positive");
  if (!(b.compactness_m3_m2 > 0)) throw ValidationError("compactness index must be positive");
  if (!(b.internal_heat_capacity_kj_m2k > 0) || !(b.internal_mass_area_m2 > 0))
    throw ValidationError("internal heat capacity must be positive");
  if (!(b.heating_setpoint_c < b.cooling_setpoint_c)) throw ValidationError("heating setpoint must be below cooling setpoint");
  if (b.facades.empty()) throw ValidationError("building has no façades");
  std::set<std::string> ids;
  for (const auto& f : b.facades) {
    if (!(f.gross_area() > 0)) throw ValidationError("façade '" + f.name + "': gross area must be positive");
    for (const auto& s : f.slots) {
      if (!ids.insert(s.id).second) throw ValidationError("duplicate slot id '" + s.id + "'");
      if (!(s.room_floor_area_m2 > 0)) throw ValidationError("slot '" + s.id + "': room floor area must be positive");
      if (s.designated_width_m < kMinWindowWidth - 1e-9 || s.designated_height_m < kMinWindowHeight - 1e-9)
        throw ValidationError("slot '" + s.id + "': designated area smaller than the 0.60 x 1.00 minimum window");
      if (s.designated_width_m > f.width_m + 1e-9 || s.designated_height_m > f.height_m + 1e-9)
        throw ValidationError("slot '" + s.id + "': designated area exceeds façade");
    }
  }
}

inline BuildingModel parse_building(const json& j) {
  BuildingModel b;
  try {
    const auto& z = j.at("zone");
    z.at("floor_area_m2").get_to(b.zone_floor_area_m2);
    z.at("height_m").get_to(b.zone_height_m);
    z.at("wall_u").get_to(b.wall_u);
    z.at("internal_heat_capacity_kj_m2k").get_to(b.internal_heat_capacity_kj_m2k);
    z.at("internal_mass_area_m2").get_to(b.internal_mass_area_m2);
    z.at("n50").get_to(b.n50);
    z.at("compactness_m3_m2").get_to(b.compactness_m3_m2);
    z.at("occupants").get_to(b.occupants);
    z.at("occupant_gain_w").get_to(b.occupant_gain_w);
    z.at("lighting_equipment_w_m2").get_to(b.lighting_equipment_w_m2);
    z.at("ventilation_m3_s").get_to(b.ventilation_m3_s);
    z.at("free_cooling_max_ach").get_to(b.free_cooling_max_ach);
    z.at("heating_setpoint_c").get_to(b.heating_setpoint_c);
    z.at("cooling_setpoint_c").get_to(b.cooling_setpoint_c);
    j.at("facades").get_to(b.facades);
  } catch (const json::exception& e) {
    throw ParseError(std::string("building geometry: ") + e.what());
  }
  validate(b);
  return b;
}

inline BuildingModel load_building(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open building geometry file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("building geometry " + path.string() + ": " + e.what());
  }
  return parse_building(j);
}

// ---------------------------------------------------------------------------
// Sizing rules

struct WindowCheck {
  double width_m = 0;
  double height_m = 0;
  bool width_clamped = false;
  bool height_clamped = false;
  bool legal() const { return !width_clamped && !height_clamped; }
};

/// Truncates a requested size to the 0.1 m grid and clamps it into the slot's
/// legal range. Clamps are reported, never thrown.
inline WindowCheck validate_window(const WindowSlot& slot, double width_m, double height_m) {
  WindowCheck r;
  double w = truncate_decimal(width_m);
  double h = truncate_decimal(height_m);
  const double max_w = truncate_decimal(slot.designated_width_m);
  const double max_h = truncate_decimal(slot.designated_height_m);
  if (slot.width_fixed) {
    r.width_clamped = std::abs(w - kFixedWindowWidth) > 1e-9;
    w = kFixedWindowWidth;
  } else if (w < kMinWindowWidth - 1e-9) {
    w = kMinWindowWidth;
    r.width_clamped = true;
  } else if (w > max_w + 1e-9) {
    w = max_w;
    r.width_clamped = true;
  }
  if (h < kMinWindowHeight - 1e-9) {
    h = kMinWindowHeight;
    r.height_clamped = true;
  } else if (h > max_h + 1e-9) {
    h = max_h;
    r.height_clamped = true;
  }
  r.width_m = clean_decimal(w);
  r.height_m = clean_decimal(h);
  return r;
}

/// Fixed shading allowed on this orientation (north, west and the south family).
inline bool shading_allowed(Orientation o) { return o != Orientation::E; }

/// Canonical fixed-shading geometry: 0.1 m grid, shallow devices removed,
/// orphan extensions dropped, overlapping corner extensions clipped.
inline ShadingGeometry validate_shading(const ShadingGeometry& raw, Orientation orientation) {
  ShadingGeometry g;
  if (!shading_allowed(orientation)) return g;

  auto finite_or_zero = [](double v) { return std::isfinite(v) ? v : 0.0; };
  auto depth = [&](double v) {
    double d = truncate_decimal(std::max(0.0, finite_or_zero(v)));
    if (d < kMinShadingDepth - 1e-9) return 0.0;
    return clean_decimal(std::min(d, kMaxShadingDepth));
  };
  auto extension = [&](double v) {
    v = std::max(0.0, finite_or_zero(v));
    // A previously clipped corner reads back as one grid step.
    if (std::abs(v - kCornerClip) < 1e-9) v = 0.1;
    return clean_decimal(std::min(truncate_decimal(v), kMaxShadingExtension));
  };

  g.overhang_depth_m = depth(raw.overhang_depth_m);
  g.fin_left_depth_m = depth(raw.fin_left_depth_m);
  g.fin_right_depth_m = depth(raw.fin_right_depth_m);
  if (g.has_overhang()) {
    g.overhang_ext_left_m = extension(raw.overhang_ext_left_m);
    g.overhang_ext_right_m = extension(raw.overhang_ext_right_m);
  }
  if (g.has_left_fin() || g.has_right_fin()) g.fin_ext_top_m = extension(raw.fin_ext_top_m);

  const bool top_ext = g.fin_ext_top_m > 0;
  const bool clip_left = g.has_overhang() && g.has_left_fin() && g.overhang_ext_left_m > 0 && top_ext;
  const bool clip_right = g.has_overhang() && g.has_right_fin() && g.overhang_ext_right_m > 0 && top_ext;
  if (clip_left) g.overhang_ext_left_m = kCornerClip;
  if (clip_right) g.overhang_ext_right_m = kCornerClip;
  if (clip_left || clip_right) g.fin_ext_top_m = kCornerClip;
  return g;
}

// ---------------------------------------------------------------------------
// Envelope metrics

inline double window_to_floor_ratio(double window_area_m2, double floor_area_m2) {
  if (!(floor_area_m2 > 0)) throw ValidationError("floor area must be positive");
  return window_area_m2 / floor_area_m2;
}

/// Glazing-to-floor ratio of every habitable room; `window_areas` follows slot order.
inline std::map<Room, double> room_glazing_ratios(const BuildingModel& b, std::span<const double> window_areas) {
  const auto slots = b.slots();
  if (window_areas.size() != slots.size()) throw ValidationError("window area count does not match slot count");
  std::map<Room, double> area;
  std::map<Room, double> floor;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!is_habitable(slots[i]->room)) continue;
    area[slots[i]->room] += window_areas[i];
    floor[slots[i]->room] = slots[i]->room_floor_area_m2;
  }
  std::map<Room, double> out;
  for (const auto& [room, a] : area) out[room] = window_to_floor_ratio(a, floor[room]);
  return out;
}

struct WindowAreaU {
  double area_m2 = 0;
  double u = 0;
};

/// Area-weighted mean transmittance of the exposed envelope; `windows` follows slot order.
inline double heat_transfer_k(const BuildingModel& b, std::span<const WindowAreaU> windows) {
  if (windows.size() != b.slot_count()) throw ValidationError("every slot needs a window assembly");
  double ua = 0;
  double area = 0;
  std::size_t k = 0;
  for (const auto& f : b.facades) {
    double win_area = 0;
    for (std::size_t s = 0; s < f.slots.size(); ++s, ++k) {
      win_area += windows[k].area_m2;
      ua += windows[k].area_m2 * windows[k].u;
    }
    if (win_area > f.gross_area() + 1e-9) throw GeometryError("windows exceed the area of façade '" + f.name + "'");
    ua += (f.gross_area() - win_area) * b.wall_u;
    area += f.gross_area();
  }
  return ua / area;
}

inline double heat_transfer_k(const BuildingModel& b, std::span<const WindowAssembly> assemblies) {
  std::vector<WindowAreaU> w;
  w.reserve(assemblies.size());
  for (const auto& a : assemblies) w.push_back({a.area(), window_u(a)});
  return heat_transfer_k(b, std::span<const WindowAreaU>(w));
}

/// Window-to-wall ratio over all exposed façades, as a fraction.
inline double window_to_wall_ratio(const BuildingModel& b, double total_window_area_m2) {
  return total_window_area_m2 / b.envelope_area();
}

}  // namespace fenestra
