#pragma once
// Window product catalog: glass panes, gas gaps, frames, the double-glazing
// rule engine and the center-of-glass / whole-window property calculations.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fenestra/error.hpp"

namespace fenestra {

using json = nlohmann::json;

enum class GlassCategory { Clear, LowTsol, SpectrallySelective, HighTsolLowE, LowTsolBackLowE };
enum class Gas { Air, Argon };
enum class FrameMaterial {
  WoodHigh, WoodLow, WoodAlum, Alu1, Alu2, Alu3, Alu4, Vinyl1, Vinyl2, Vinyl3
};
enum class Orientation { N, E, W, S, SE, SW };

NLOHMANN_JSON_SERIALIZE_ENUM(GlassCategory, {{GlassCategory::Clear, "Clear"},
                                             {GlassCategory::LowTsol, "LowTsol"},
                                             {GlassCategory::SpectrallySelective, "SpectrallySelective"},
                                             {GlassCategory::HighTsolLowE, "HighTsolLowE"},
                                             {GlassCategory::LowTsolBackLowE, "LowTsolBackLowE"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Gas, {{Gas::Air, "Air"}, {Gas::Argon, "Argon"}})
NLOHMANN_JSON_SERIALIZE_ENUM(FrameMaterial, {{FrameMaterial::WoodHigh, "WoodHigh"},
                                             {FrameMaterial::WoodLow, "WoodLow"},
                                             {FrameMaterial::WoodAlum, "WoodAlum"},
                                             {FrameMaterial::Alu1, "Alu1"},
                                             {FrameMaterial::Alu2, "Alu2"},
                                             {FrameMaterial::Alu3, "Alu3"},
                                             {FrameMaterial::Alu4, "Alu4"},
                                             {FrameMaterial::Vinyl1, "Vinyl1"},
                                             {FrameMaterial::Vinyl2, "Vinyl2"},
                                             {FrameMaterial::Vinyl3, "Vinyl3"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Orientation, {{Orientation::N, "N"},
                                           {Orientation::E, "E"},
                                           {Orientation::W, "W"},
                                           {Orientation::S, "S"},
                                           {Orientation::SE, "SE"},
                                           {Orientation::SW, "SW"}})

inline constexpr std::array<Orientation, 6> kAllOrientations{
    Orientation::N, Orientation::E, Orientation::W, Orientation::S, Orientation::SE, Orientation::SW};

inline std::string to_string(Orientation o) { return json(o).get<std::string>(); }

namespace physics {
inline constexpr double kRse = 0.04;            // m2K/W
inline constexpr double kRsi = 0.13;            // m2K/W
inline constexpr double kGlassConductivity = 1.0;  // W/mK
inline constexpr double kStefanBoltzmann = 5.67e-8;
inline constexpr double kMeanTemperature = 283.0;  // K
inline constexpr double kFrameWidth = 0.07;        // m
}  // namespace physics

/// Emissivity below this marks a low-e coated face.
inline constexpr double kLowEmissivityThreshold = 0.5;
/// Solar transmittance below this marks a solar-control pane.
inline constexpr double kSolarControlTsol = 0.54;

inline constexpr std::array<int, 4> kThicknessClasses{4, 6, 8, 10};
inline constexpr std::array<int, 5> kGapWidths{6, 8, 10, 12, 16};

inline int thickness_class(int mm) {
  auto it = std::find(kThicknessClasses.begin(), kThicknessClasses.end(), mm);
  return it == kThicknessClasses.end() ? -1 : static_cast<int>(it - kThicknessClasses.begin());
}

struct GlassPane {
  std::string id;
  int thickness_mm = 4;
  double tsol = 0.8;
  double tvis = 0.9;
  double emis_front = 0.84;
  double emis_back = 0.84;
  GlassCategory category = GlassCategory::Clear;

  /// 0 when uncoated, 1 when the low-e coating is on the front side, 2 when on the back.
  int coated_side() const {
    if (emis_front < kLowEmissivityThreshold) return 1;
    if (emis_back < kLowEmissivityThreshold) return 2;
    return 0;
  }
  bool low_e() const { return coated_side() != 0; }
  bool solar_control() const { return tsol < kSolarControlTsol; }
  double thickness_m() const { return thickness_mm / 1000.0; }

  friend bool operator==(const GlassPane&, const GlassPane&) = default;
};

struct GapSpec {
  Gas gas = Gas::Air;
  double width_mm = 12;

  double conductivity() const { return gas == Gas::Argon ? 0.017 : 0.025; }
  std::string code() const {
    return json(gas).get<std::string>() + "_" + std::to_string(static_cast<int>(std::lround(width_mm)));
  }
  friend bool operator==(const GapSpec&, const GapSpec&) = default;
};

struct FrameSpec {
  std::string id;
  FrameMaterial material = FrameMaterial::WoodAlum;
  double u_value = 1.19;
  double width_m = physics::kFrameWidth;
  friend bool operator==(const FrameSpec&, const FrameSpec&) = default;
};

/// A pane as installed: which of its sides carries the coating after mounting.
/// Side 1 faces outdoors, side 2 faces indoors.
struct MountedPane {
  GlassPane pane;
  int coating_side = 0;

  bool flipped() const { return coating_side != 0 && coating_side != pane.coated_side(); }
  double emis_front() const { return flipped() ? pane.emis_back : pane.emis_front; }
  double emis_back() const { return flipped() ? pane.emis_front : pane.emis_back; }

  /// Code token: the pane id, with `#<side>` inserted before an optical tag
  /// (`_tsol...`) when present, appended otherwise. Uncoated panes carry no marker.
  std::string code() const {
    if (coating_side == 0) return pane.id;
    const std::string mark = "#" + std::to_string(coating_side);
    auto pos = pane.id.find("_tsol");
    if (pos == std::string::npos) return pane.id + mark;
    return pane.id.substr(0, pos) + mark + pane.id.substr(pos);
  }
  friend bool operator==(const MountedPane&, const MountedPane&) = default;
};

struct OpticsOverride {
  double shgc = 0;
  double vt = 0;
};

struct GlazingComposition {
  MountedPane outer;
  GapSpec gap;
  MountedPane inner;
  double u_g = 0;
  double shgc = 0;
  double vt = 0;
  std::string code;

  /// Face number (#1..#4) carrying a low-e coating, 0 when none.
  int low_e_face() const {
    if (outer.coating_side != 0) return outer.coating_side;
    if (inner.coating_side != 0) return 2 + inner.coating_side;
    return 0;
  }
  friend bool operator==(const GlazingComposition&, const GlazingComposition&) = default;
};

struct Catalog {
  std::vector<GlassPane> glasses;
  std::vector<GapSpec> gaps;
  std::vector<FrameSpec> frames;
  std::map<std::string, OpticsOverride> optics_overrides;  // keyed by composition code

  const GlassPane* find_glass(std::string_view id) const {
    for (const auto& g : glasses)
      if (g.id == id) return &g;
    return nullptr;
  }
  const FrameSpec* find_frame(std::string_view id) const {
    for (const auto& f : frames)
      if (f.id == id) return &f;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {
inline bool in_band(double v, double lo, double hi) { return v >= lo - 1e-12 && v <= hi + 1e-12; }
inline bool unit_open_closed(double v) { return v > 0.0 && v <= 1.0; }
}  // namespace detail

inline void validate(const GlassPane& g) {
  auto fail = [&](const std::string& why) { throw ValidationError("glass '" + g.id + "': " + why); };
  if (g.id.empty()) fail("empty id");
  if (g.id.find_first_of("#,") != std::string::npos) fail("id must not contain '#' or ','");
  if (thickness_class(g.thickness_mm) < 0) fail("thickness must be one of 4, 6, 8, 10 mm");
  if (!detail::unit_open_closed(g.tsol)) fail("tsol outside (0,1]");
  if (!detail::unit_open_closed(g.tvis)) fail("tvis outside (0,1]");
  if (!detail::unit_open_closed(g.emis_front) || !detail::unit_open_closed(g.emis_back))
    fail("emissivity outside (0,1]");
  if (g.emis_front < kLowEmissivityThreshold && g.emis_back < kLowEmissivityThreshold)
    fail("low-e coating on both sides");
  switch (g.category) {
    case GlassCategory::Clear:
      if (g.low_e() || g.tsol < kSolarControlTsol) fail("clear glass must be uncoated with tsol >= 0.54");
      break;
    case GlassCategory::LowTsol:
      if (g.low_e() || !detail::in_band(g.tsol, 0.23, 0.54)) fail("low-tsol glass: uncoated, tsol in [0.23,0.54]");
      break;
    case GlassCategory::SpectrallySelective:
      if (g.low_e() || !detail::in_band(g.tvis, 0.56, 0.68) || !detail::in_band(g.tsol, 0.25, 0.54))
        fail("spectrally selective glass: uncoated, tvis in [0.56,0.68], tsol in [0.25,0.54]");
      break;
    case GlassCategory::HighTsolLowE:
      if (!g.low_e() || !detail::in_band(g.tsol, 0.60, 0.82)) fail("high-tsol low-e glass: coated, tsol in [0.60,0.82]");
      break;
    case GlassCategory::LowTsolBackLowE:
      if (g.coated_side() != 2 || !detail::in_band(g.tsol, 0.26, 0.55))
        fail("low-tsol back low-e glass: back coating, tsol in [0.26,0.55]");
      break;
  }
}

inline void validate(const GapSpec& gap) {
  const int w = static_cast<int>(std::lround(gap.width_mm));
  if (std::abs(gap.width_mm - w) > 1e-9 || std::find(kGapWidths.begin(), kGapWidths.end(), w) == kGapWidths.end())
    throw ValidationError("gap '" + gap.code() + "': width must be one of 6, 8, 10, 12, 16 mm");
  if (!(gap.conductivity() > 0)) throw ValidationError("gap '" + gap.code() + "': conductivity must be positive");
}

inline void validate(const FrameSpec& f) {
  if (f.id.empty()) throw ValidationError("frame with empty id");
  if (!(f.u_value >= 0.5 && f.u_value <= 5.0)) throw ValidationError("frame '" + f.id + "': u_value outside [0.5, 5.0]");
  if (f.width_m != physics::kFrameWidth) throw ValidationError("frame '" + f.id + "': width must be 0.07 m");
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(json& j, const GlassPane& g) {
  j = json{{"id", g.id},          {"thickness_mm", g.thickness_mm}, {"tsol", g.tsol},
           {"tvis", g.tvis},      {"emis_front", g.emis_front},     {"emis_back", g.emis_back},
           {"category", g.category}};
}
inline void from_json(const json& j, GlassPane& g) {
  j.at("id").get_to(g.id);
  j.at("thickness_mm").get_to(g.thickness_mm);
  j.at("tsol").get_to(g.tsol);
  j.at("tvis").get_to(g.tvis);
  j.at("emis_front").get_to(g.emis_front);
  j.at("emis_back").get_to(g.emis_back);
  j.at("category").get_to(g.category);
}
inline void to_json(json& j, const GapSpec& g) { j = json{{"gas", g.gas}, {"width_mm", g.width_mm}}; }
inline void from_json(const json& j, GapSpec& g) {
  j.at("gas").get_to(g.gas);
  j.at("width_mm").get_to(g.width_mm);
}
inline void to_json(json& j, const FrameSpec& f) {
  j = json{{"id", f.id}, {"material", f.material}, {"u_value", f.u_value}, {"width_m", f.width_m}};
}
inline void from_json(const json& j, FrameSpec& f) {
  j.at("id").get_to(f.id);
  j.at("material").get_to(f.material);
  j.at("u_value").get_to(f.u_value);
  f.width_m = j.value("width_m", physics::kFrameWidth);
}
inline void to_json(json& j, const MountedPane& m) { j = json{{"pane", m.pane}, {"coating_side", m.coating_side}}; }
inline void from_json(const json& j, MountedPane& m) {
  j.at("pane").get_to(m.pane);
  j.at("coating_side").get_to(m.coating_side);
}
inline void to_json(json& j, const GlazingComposition& c) {
  j = json{{"code", c.code}, {"outer", c.outer}, {"gap", c.gap}, {"inner", c.inner},
           {"u_g", c.u_g},   {"shgc", c.shgc},   {"vt", c.vt}};
}
inline void from_json(const json& j, GlazingComposition& c) {
  j.at("code").get_to(c.code);
  j.at("outer").get_to(c.outer);
  j.at("gap").get_to(c.gap);
  j.at("inner").get_to(c.inner);
  j.at("u_g").get_to(c.u_g);
  j.at("shgc").get_to(c.shgc);
  j.at("vt").get_to(c.vt);
}

inline json catalog_to_json(const Catalog& c) {
  json comps = json::array();
  for (const auto& [code, o] : c.optics_overrides) comps.push_back({{"code", code}, {"shgc", o.shgc}, {"vt", o.vt}});
  return json{{"glasses", c.glasses}, {"gaps", c.gaps}, {"frames", c.frames}, {"compositions", comps}};
}

/// Builds a catalog from parsed JSON; every entry is validated and duplicate ids rejected.
inline Catalog parse_catalog(const json& j) {
  Catalog cat;
  try {
    for (const auto& g : j.at("glasses")) cat.glasses.push_back(g.get<GlassPane>());
    for (const auto& g : j.at("gaps")) cat.gaps.push_back(g.get<GapSpec>());
    for (const auto& f : j.at("frames")) cat.frames.push_back(f.get<FrameSpec>());
    if (j.contains("compositions")) {
      for (const auto& c : j.at("compositions")) {
        OpticsOverride o{c.at("shgc").get<double>(), c.at("vt").get<double>()};
        cat.optics_overrides[c.at("code").get<std::string>()] = o;
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }

  std::set<std::string> seen;
  for (const auto& g : cat.glasses) {
    validate(g);
    if (!seen.insert(g.id).second) throw ValidationError("duplicate glass id '" + g.id + "'");
  }
  seen.clear();
  for (const auto& g : cat.gaps) {
    validate(g);
    if (!seen.insert(g.code()).second) throw ValidationError("duplicate gap '" + g.code() + "'");
  }
  seen.clear();
  for (const auto& f : cat.frames) {
    validate(f);
    if (!seen.insert(f.id).second) throw ValidationError("duplicate frame id '" + f.id + "'");
  }
  for (const auto& [code, o] : cat.optics_overrides) {
    if (!detail::unit_open_closed(o.shgc) || !detail::unit_open_closed(o.vt))
      throw ValidationError("composition '" + code + "': shgc/vt outside (0,1]");
  }
  return cat;
}

inline Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open catalog file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("catalog " + path.string() + ": " + e.what());
  }
  return parse_catalog(j);
}

// ---------------------------------------------------------------------------
// Physics

/// Center-of-glass U-value of a double glazing, conduction-only cavity.
/// `eps_a` and `eps_b` are the emissivities of the two cavity-facing faces (#2, #3).
inline double center_of_glass_u(double outer_thickness_m, double eps_a, Gas gas, double gap_width_m,
                                double inner_thickness_m, double eps_b) {
  if (!(gap_width_m > 0)) throw DegenerateGap("gap width must be positive");
  using namespace physics;
  const double lambda = gas == Gas::Argon ? 0.017 : 0.025;
  const double h_g = lambda / gap_width_m;
  const double t3 = kMeanTemperature * kMeanTemperature * kMeanTemperature;
  const double h_r = 4.0 * kStefanBoltzmann * t3 / (1.0 / eps_a + 1.0 / eps_b - 1.0);
  const double r_gap = 1.0 / (h_g + h_r);
  const double r_total = kRse + outer_thickness_m / kGlassConductivity + r_gap +
                         inner_thickness_m / kGlassConductivity + kRsi;
  return 1.0 / r_total;
}

inline double center_of_glass_u(const MountedPane& outer, const GapSpec& gap, const MountedPane& inner) {
  return center_of_glass_u(outer.pane.thickness_m(), outer.emis_back(), gap.gas, gap.width_mm / 1000.0,
                           inner.pane.thickness_m(), inner.emis_front());
}

/// Panes taken as catalogued: the front side of each pane faces outdoors.
inline double center_of_glass_u(const GlassPane& outer, const GapSpec& gap, const GlassPane& inner) {
  return center_of_glass_u(outer.thickness_m(), outer.emis_back, gap.gas, gap.width_mm / 1000.0, inner.thickness_m(),
                           inner.emis_front);
}

struct Optics {
  double shgc = 0;
  double vt = 0;
};

/// Two-pane interreflection estimate; used only when the catalog has no explicit values.
inline double two_pane_transmission(double t1, double t2) {
  const double r1 = 0.08 + 0.2 * (1.0 - t1);
  const double r2 = 0.08 + 0.2 * (1.0 - t2);
  const double t = t1 * t2 / (1.0 - r1 * r2);
  return std::clamp(t, 1e-9, 1.0);
}

inline Optics composition_optics(const GlassPane& outer, const GlassPane& inner) {
  return {two_pane_transmission(outer.tsol, inner.tsol), two_pane_transmission(outer.tvis, inner.tvis)};
}

/// Builds a composition and fills u_g, shgc, vt and its code. Catalog overrides win for optics.
inline GlazingComposition make_composition(const MountedPane& outer, const GapSpec& gap, const MountedPane& inner,
                                           const Catalog* catalog = nullptr) {
  GlazingComposition c;
  c.outer = outer;
  c.gap = gap;
  c.inner = inner;
  c.code = outer.code() + "," + gap.code() + "," + inner.code();
  c.u_g = center_of_glass_u(outer, gap, inner);
  Optics o = composition_optics(outer.pane, inner.pane);
  if (catalog) {
    if (auto it = catalog->optics_overrides.find(c.code); it != catalog->optics_overrides.end())
      o = {it->second.shgc, it->second.vt};
  }
  c.shgc = o.shgc;
  c.vt = o.vt;
  return c;
}

/// Parses `<pane>,<Gas>_<mm>,<pane>` against the catalog.
inline GlazingComposition parse_composition_code(const std::string& code, const Catalog& catalog) {
  auto parse_pane = [&](std::string token) {
    MountedPane m;
    if (auto pos = token.find('#'); pos != std::string::npos) {
      if (pos + 1 >= token.size() || (token[pos + 1] != '1' && token[pos + 1] != '2'))
        throw ParseError("composition code '" + code + "': bad coating marker");
      m.coating_side = token[pos + 1] - '0';
      token.erase(pos, 2);
    }
    const GlassPane* g = catalog.find_glass(token);
    if (!g) throw ParseError("composition code '" + code + "': unknown glass '" + token + "'");
    m.pane = *g;
    if ((m.coating_side != 0) != g->low_e())
      throw ParseError("composition code '" + code + "': coating marker does not match glass '" + token + "'");
    return m;
  };

  auto c1 = code.find(',');
  auto c2 = c1 == std::string::npos ? c1 : code.find(',', c1 + 1);
  if (c2 == std::string::npos || code.find(',', c2 + 1) != std::string::npos)
    throw ParseError("composition code '" + code + "': expected three comma-separated parts");
  MountedPane outer = parse_pane(code.substr(0, c1));
  MountedPane inner = parse_pane(code.substr(c2 + 1));
  const std::string gap_token = code.substr(c1 + 1, c2 - c1 - 1);
  auto us = gap_token.find('_');
  if (us == std::string::npos) throw ParseError("composition code '" + code + "': bad gap token");
  GapSpec gap;
  try {
    gap.gas = json(gap_token.substr(0, us)).get<Gas>();
    if (gap_token.substr(0, us) != "Air" && gap_token.substr(0, us) != "Argon") throw ParseError("gas");
    gap.width_mm = std::stod(gap_token.substr(us + 1));
  } catch (const std::exception&) {
    throw ParseError("composition code '" + code + "': bad gap token '" + gap_token + "'");
  }
  return make_composition(outer, gap, inner, &catalog);
}

// ---------------------------------------------------------------------------
// Rule engine

inline bool is_north(Orientation o) { return o == Orientation::N; }
inline bool is_east_west(Orientation o) { return o == Orientation::E || o == Orientation::W; }
inline bool is_south(Orientation o) { return o == Orientation::S || o == Orientation::SE || o == Orientation::SW; }

/// Azimuth (deg, 0 = north, clockwise) to solar-orientation class.
inline Orientation classify_orientation(double azimuth_deg) {
  double a = std::fmod(azimuth_deg, 360.0);
  if (a < 0) a += 360.0;
  if (a < 60.0 || a >= 300.0) return Orientation::N;
  if (a < 112.5) return Orientation::E;
  if (a < 157.5) return Orientation::SE;
  if (a < 202.5) return Orientation::S;
  if (a < 247.5) return Orientation::SW;
  return Orientation::W;
}

/// All legal double glazings for one orientation class. Output order follows
/// catalog order (outer glass, inner glass, gap).
inline std::vector<GlazingComposition> enumerate_compositions(const Catalog& catalog, Orientation orientation) {
  std::vector<GlazingComposition> out;
  for (const auto& g1 : catalog.glasses) {
    if (is_north(orientation) && g1.solar_control()) continue;
    for (const auto& g2 : catalog.glasses) {
      const int k1 = thickness_class(g1.thickness_mm);
      const int k2 = thickness_class(g2.thickness_mm);
      if (k1 < k2 || k1 - k2 > 1) continue;
      if (g2.solar_control()) continue;  // solar control lives on the outer pane only
      if (g1.low_e() && g2.low_e()) continue;
      // A coated outer pane always shows its coating on face #2; a coated inner pane
      // on face #3, which the south-ish classes forbid.
      MountedPane outer{g1, g1.low_e() ? 2 : 0};
      MountedPane inner{g2, g2.low_e() ? 1 : 0};
      if (g2.low_e() && is_south(orientation)) continue;
      for (const auto& gap : catalog.gaps) out.push_back(make_composition(outer, gap, inner, &catalog));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Window assembly

struct WindowAssembly {
  GlazingComposition glazing;
  FrameSpec frame;
  double width_m = 0.6;
  double height_m = 1.0;
  double psi_gf = 0.0;

  double area() const { return width_m * height_m; }
  double glazed_area() const {
    const double f2 = 2.0 * frame.width_m;
    return (width_m - f2) * (height_m - f2);
  }
  double frame_area() const { return area() - glazed_area(); }
  double frame_glass_perimeter() const {
    const double f2 = 2.0 * frame.width_m;
    return 2.0 * ((width_m - f2) + (height_m - f2));
  }
};

/// Whole-window U-value from glazing and frame areas; the glass/frame linear
/// transmittance is zero so the perimeter term vanishes.
inline double window_u(double u_g, double u_f, double width_m, double height_m,
                       double frame_width_m = physics::kFrameWidth, double psi_gf = 0.0) {
  const double f2 = 2.0 * frame_width_m;
  const double a_g = (width_m - f2) * (height_m - f2);
  if (!(a_g > 0) || width_m - f2 <= 0 || height_m - f2 <= 0)
    throw GeometryError("window too small for its frame: no glazed area");
  const double a_total = width_m * height_m;
  const double a_f = a_total - a_g;
  const double l_gf = 2.0 * ((width_m - f2) + (height_m - f2));
  return (u_g * a_g + u_f * a_f + l_gf * psi_gf) / (a_g + a_f);
}

inline double window_u(const WindowAssembly& w) {
  return window_u(w.glazing.u_g, w.frame.u_value, w.width_m, w.height_m, w.frame.width_m, w.psi_gf);
}

}  // namespace fenestra
