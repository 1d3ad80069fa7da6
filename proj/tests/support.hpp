#pragma once
// Fixtures and independent oracles shared by the unit tests and the
// acceptance runner. Oracles here deliberately avoid the library's own
// helpers for the quantity under test.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fenestra/fenestra.hpp"

namespace fenestra::testing {

namespace fs = std::filesystem;

inline fs::path source_dir() { return FENESTRA_SOURCE_DIR; }
inline fs::path data_path(const std::string& rel) { return source_dir() / "data" / rel; }
inline fs::path weather_path(const std::string& city) {
  return source_dir() / "data" / "weather" / (city + "_synthetic.epw");
}

inline const Catalog& bundled_catalog() {
  static const Catalog c = load_catalog(data_path("catalog.json"));
  return c;
}
inline const BuildingModel& bundled_building() {
  static const BuildingModel b = load_building(data_path("building.json"));
  return b;
}

/// Fresh scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = fs::temp_directory_path() / ("fenestra-" + tag + "-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// ---------------------------------------------------------------------------
// Glazing rule oracle

/// (outer id, low-e face, gas, gap mm, inner id)
using CompositionTuple = std::tuple<std::string, int, int, long, std::string>;

inline CompositionTuple tuple_of(const GlazingComposition& c) {
  return {c.outer.pane.id, c.low_e_face(), c.gap.gas == Gas::Argon ? 1 : 0, std::lround(c.gap.width_mm),
          c.inner.pane.id};
}

/// Tests every (outer, gap, inner, face) tuple against the placement rules
/// written out as plain predicates.
inline std::set<CompositionTuple> brute_force_compositions(const Catalog& cat, Orientation o) {
  const std::vector<int> classes{4, 6, 8, 10};
  auto cls = [&](int mm) { return static_cast<int>(std::find(classes.begin(), classes.end(), mm) - classes.begin()); };
  auto coated = [](const GlassPane& g) { return std::min(g.emis_front, g.emis_back) < 0.5; };
  auto solar_control = [](const GlassPane& g) { return g.tsol < 0.54; };
  const bool north = o == Orientation::N;
  const bool east_west = o == Orientation::E || o == Orientation::W;

  std::set<CompositionTuple> out;
  for (const auto& g1 : cat.glasses)
    for (const auto& g2 : cat.glasses)
      for (const auto& gap : cat.gaps)
        for (int face = 0; face <= 4; ++face) {
          if (g1.thickness_mm < g2.thickness_mm) continue;
          if (cls(g1.thickness_mm) - cls(g2.thickness_mm) > 1) continue;
          if (solar_control(g2)) continue;
          if (coated(g1) && coated(g2)) continue;
          const int expected_face = coated(g1) ? 2 : coated(g2) ? 3 : 0;
          if (face != expected_face) continue;
          if (north && solar_control(g1)) continue;
          if ((north || east_west) && !(face == 0 || face == 2 || face == 3)) continue;
          if (!north && !east_west && !(face == 0 || face == 2)) continue;
          out.insert({g1.id, face, gap.gas == Gas::Argon ? 1 : 0, std::lround(gap.width_mm), g2.id});
        }
  return out;
}

/// Random catalog of valid glasses and gaps, sized for the oracle.
inline Catalog random_mini_catalog(std::mt19937_64& rng, std::size_t max_glasses = 8, std::size_t max_gaps = 4) {
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  const int thick[] = {4, 6, 8, 10};
  const int widths[] = {6, 8, 10, 12, 16};
  Catalog c;
  const std::size_t ng = 1 + static_cast<std::size_t>(pick(static_cast<int>(max_glasses)));
  for (std::size_t i = 0; i < ng; ++i) {
    GlassPane g;
    g.id = "g" + std::to_string(i);
    g.thickness_mm = thick[pick(4)];
    g.emis_front = g.emis_back = uni(0.8, 0.9);
    switch (pick(5)) {
      case 0:
        g.category = GlassCategory::Clear;
        g.tsol = uni(0.55, 0.9);
        g.tvis = uni(0.7, 0.95);
        break;
      case 1:
        g.category = GlassCategory::LowTsol;
        g.tsol = uni(0.23, 0.53);
        g.tvis = uni(0.3, 0.7);
        break;
      case 2:
        g.category = GlassCategory::SpectrallySelective;
        g.tsol = uni(0.25, 0.53);
        g.tvis = uni(0.56, 0.68);
        break;
      case 3:
        g.category = GlassCategory::HighTsolLowE;
        g.tsol = uni(0.6, 0.82);
        g.tvis = uni(0.7, 0.9);
        (pick(2) ? g.emis_front : g.emis_back) = uni(0.02, 0.2);
        break;
      default:
        g.category = GlassCategory::LowTsolBackLowE;
        g.tsol = uni(0.26, 0.55);
        g.tvis = uni(0.4, 0.7);
        g.emis_back = uni(0.02, 0.2);
        break;
    }
    validate(g);
    c.glasses.push_back(g);
  }
  std::set<std::pair<int, int>> used;
  const std::size_t nw = 1 + static_cast<std::size_t>(pick(static_cast<int>(max_gaps)));
  while (used.size() < nw) {
    const int gas = pick(2), w = widths[pick(5)];
    if (used.insert({gas, w}).second) c.gaps.push_back({gas ? Gas::Argon : Gas::Air, static_cast<double>(w)});
  }
  c.frames.push_back({"frame", FrameMaterial::WoodAlum, 1.19, 0.07});
  return c;
}

// ---------------------------------------------------------------------------
// Hand formulas

/// Center-of-glass U written out from its definition.
inline double hand_center_of_glass_u(double d1_m, double eps_a, double lambda, double s_m, double d2_m, double eps_b) {
  const double hg = lambda / s_m;
  const double hr = 4 * 5.67e-8 * 283.0 * 283.0 * 283.0 / (1 / eps_a + 1 / eps_b - 1);
  return 1.0 / (0.04 + d1_m + 1.0 / (hg + hr) + d2_m + 0.13);
}

inline double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Two-sided exact rank-sum p-value by listing every way of giving the
/// first sample `n` of the pooled midranks.
inline double exhaustive_rank_sum_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  const std::size_t n = a.size(), big = all.size();
  std::vector<double> ranks(big);
  for (std::size_t i = 0; i < big; ++i) {
    double less = 0, equal = 0;
    for (double y : all) {
      less += y < all[i];
      equal += y == all[i];
    }
    ranks[i] = less + (equal + 1) / 2.0;
  }
  double observed = 0;
  for (std::size_t i = 0; i < n; ++i) observed += ranks[i];
  std::vector<bool> pick(big, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(n), true);
  double total = 0, le = 0, ge = 0;
  do {
    double s = 0;
    for (std::size_t i = 0; i < big; ++i)
      if (pick[i]) s += ranks[i];
    total += 1;
    if (s <= observed + 1e-9) le += 1;
    if (s >= observed - 1e-9) ge += 1;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return std::min(1.0, 2 * std::min(le, ge) / total);
}

// ---------------------------------------------------------------------------
// Reference design: the published best Madrid genome on the bundled building

struct ReferenceWindow {
  double width, height;
  const char* code;
  double printed_u;
};

inline const std::vector<ReferenceWindow>& reference_windows() {
  static const std::vector<ReferenceWindow> w{
      {0.6, 1.0, "clear10,Argon_16,e8_0.05#1_tsol62tvis89", 1.8},
      {1.5, 1.4, "clear10,Argon_16,e8_0.05#1_tsol62tvis89", 1.6},
      {0.6, 1.0, "sc10_tsol25tvis63,Argon_10,e8_0.05#1_tsol62tvis89", 1.7},
      {1.5, 1.3, "e6_0.16#2_tsol71tvis88,Argon_12,clear6", 1.8},
      {2.7, 1.5, "e6_0.16#2_tsol71tvis88,Argon_12,clear6", 1.8},
  };
  return w;
}

inline CanonicalDesign reference_design() {
  const auto& cat = bundled_catalog();
  const auto& b = bundled_building();
  const FrameSpec frame = *cat.find_frame("FrameWoodAlum_Class4");
  CanonicalDesign d;
  d.frame = frame;
  d.reflectance = 0.57;
  const auto& ref = reference_windows();
  for (const auto& r : ref) d.windows.push_back({parse_composition_code(r.code, cat), frame, r.width, r.height, 0.0});
  const int sc[] = {3, 4, 4};
  const char* facade_code[] = {ref[0].code, ref[2].code, ref[3].code};
  for (std::size_t f = 0; f < b.facades.size(); ++f)
    d.facades.push_back({parse_composition_code(facade_code[f], cat), sc[f], {}});
  d.key = "reference";
  return d;
}

}  // namespace fenestra::testing
