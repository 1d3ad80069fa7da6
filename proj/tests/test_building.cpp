#include <gtest/gtest.h>

#include "support.hpp"

using namespace fenestra;
namespace ft = fenestra::testing;

namespace {

const WindowSlot& slot(const std::string& id) {
  for (const auto* s : ft::bundled_building().slots())
    if (s->id == id) return *s;
  throw std::runtime_error("no slot " + id);
}

}  // namespace

TEST(Building, BundledGeometryMatchesCaseStudyConstants) {
  const auto& b = ft::bundled_building();
  EXPECT_DOUBLE_EQ(b.zone_floor_area_m2, 60.0);
  EXPECT_DOUBLE_EQ(b.wall_u, 0.22);
  EXPECT_EQ(b.slot_count(), 5u);
  EXPECT_NEAR(b.volume_m3() / b.envelope_area(), 2.7, 0.05);
}

TEST(ValidateWindow, KitchenWidthIsFixed) {
  const auto r = validate_window(slot("W1"), 1.2, 1.0);
  EXPECT_DOUBLE_EQ(r.width_m, 0.6);
  EXPECT_DOUBLE_EQ(r.height_m, 1.0);
  EXPECT_TRUE(r.width_clamped);
  EXPECT_FALSE(r.height_clamped);
}

TEST(ValidateWindow, MinimaClamp) {
  const auto r = validate_window(slot("W2"), 0.55, 0.9);
  EXPECT_DOUBLE_EQ(r.width_m, 0.6);
  EXPECT_DOUBLE_EQ(r.height_m, 1.0);
  EXPECT_FALSE(r.legal());
}

TEST(ValidateWindow, TruncatesToGrid) {
  const auto r = validate_window(slot("W5"), 2.74, 1.52);
  EXPECT_DOUBLE_EQ(r.width_m, 2.7);
  EXPECT_DOUBLE_EQ(r.height_m, 1.5);
  EXPECT_TRUE(r.legal());
}

TEST(ValidateWindow, Idempotent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (const auto* s : ft::bundled_building().slots())
    for (int i = 0; i < 200; ++i) {
      const auto once = validate_window(*s, u(rng), u(rng));
      const auto twice = validate_window(*s, once.width_m, once.height_m);
      EXPECT_DOUBLE_EQ(once.width_m, twice.width_m);
      EXPECT_DOUBLE_EQ(once.height_m, twice.height_m);
      EXPECT_TRUE(twice.legal());
    }
}

TEST(ValidateShading, ShallowDeviceRemoved) {
  ShadingGeometry g;
  g.overhang_depth_m = 0.15;
  g.overhang_ext_left_m = 0.3;
  const auto r = validate_shading(g, Orientation::S);
  EXPECT_DOUBLE_EQ(r.overhang_depth_m, 0.0);
  EXPECT_DOUBLE_EQ(r.overhang_ext_left_m, 0.0);
}

TEST(ValidateShading, CornerClip) {
  ShadingGeometry g;
  g.overhang_depth_m = 0.5;
  g.fin_left_depth_m = 0.5;
  g.overhang_ext_left_m = 0.30;
  g.fin_ext_top_m = 0.30;
  const auto r = validate_shading(g, Orientation::S);
  EXPECT_DOUBLE_EQ(r.overhang_ext_left_m, 0.07);
  EXPECT_DOUBLE_EQ(r.fin_ext_top_m, 0.07);
  EXPECT_EQ(validate_shading(r, Orientation::S), r);
}

TEST(ValidateShading, CanonicalInputUnchanged) {
  ShadingGeometry g;
  g.overhang_depth_m = 1.5;
  EXPECT_EQ(validate_shading(g, Orientation::N), g);
}

TEST(ValidateShading, InvariantsHoldForRandomInput) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 2.0);
  for (int i = 0; i < 2000; ++i) {
    ShadingGeometry raw{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const auto g = validate_shading(raw, Orientation::W);
    for (double d : {g.overhang_depth_m, g.fin_left_depth_m, g.fin_right_depth_m})
      EXPECT_TRUE(d == 0.0 || (d >= 0.2 - 1e-12 && d <= 1.5 + 1e-12)) << d;
    for (double e : {g.overhang_ext_left_m, g.overhang_ext_right_m, g.fin_ext_top_m}) {
      EXPECT_GE(e, 0.0);
      EXPECT_LE(e, 0.3 + 1e-12);
      const bool on_grid = std::abs(e * 10 - std::round(e * 10)) < 1e-9;
      EXPECT_TRUE(on_grid || e == 0.07) << e;
    }
    EXPECT_EQ(validate_shading(g, Orientation::W), g);
  }
}

TEST(Ratios, WindowToFloor) {
  EXPECT_NEAR(window_to_floor_ratio(2.1, 17.5), 0.12, 1e-12);
  EXPECT_DOUBLE_EQ(window_to_floor_ratio(0.0, 17.5), 0.0);
  EXPECT_THROW(window_to_floor_ratio(1.0, 0.0), ValidationError);
}

TEST(Ratios, ReferenceAreasMeetMinimum) {
  const std::vector<double> areas{0.6, 2.1, 0.6, 1.95, 4.05};
  const auto r = room_glazing_ratios(ft::bundled_building(), areas);
  ASSERT_EQ(r.size(), 3u);
  for (const auto& [room, ratio] : r) EXPECT_GE(ratio, 0.12);
}

TEST(HeatTransfer, UniformEnvelope) {
  std::vector<WindowAreaU> w(5, {1.0, 0.22});
  EXPECT_NEAR(heat_transfer_k(ft::bundled_building(), std::span<const WindowAreaU>(w)), 0.22, 1e-12);
}

TEST(HeatTransfer, ReferenceDesignMatchesHandSum) {
  // Façade gross area is 3 walls x 2.7 m high; opaque remainder at 0.22.
  const auto d = ft::reference_design();
  double au = 0, area = 0;
  for (const auto& w : d.windows) {
    au += w.area() * window_u(w);
    area += w.area();
  }
  const double gross = (8.0 + 6.2 + 8.0) * 2.7;
  const double hand = (au + (gross - area) * 0.22) / gross;
  EXPECT_NEAR(heat_transfer_k(ft::bundled_building(), std::span<const WindowAssembly>(d.windows)), hand, 1e-12);
  EXPECT_LT(hand, 0.59);  // compliant with the Madrid limit
}

TEST(HeatTransfer, MonotoneAndBounded) {
  const auto& b = ft::bundled_building();
  std::vector<WindowAreaU> w{{0.6, 1.6}, {2.1, 1.4}, {0.6, 2.0}, {2.0, 1.7}, {4.0, 1.5}};
  const double k = heat_transfer_k(b, std::span<const WindowAreaU>(w));
  EXPECT_GE(k, 0.22);
  EXPECT_LE(k, 2.0);
  auto bigger = w;
  for (auto& x : bigger) x.area_m2 *= 2;
  EXPECT_GT(heat_transfer_k(b, std::span<const WindowAreaU>(bigger)), k);
  auto worse = w;
  worse[3].u += 0.5;
  EXPECT_GT(heat_transfer_k(b, std::span<const WindowAreaU>(worse)), k);
  std::vector<WindowAreaU> huge(5, {100.0, 1.0});
  EXPECT_THROW(heat_transfer_k(b, std::span<const WindowAreaU>(huge)), GeometryError);
}

TEST(HeatTransfer, FacadeOrderDoesNotMatter) {
  BuildingModel b = ft::bundled_building();
  const std::vector<WindowAreaU> w{{0.6, 1.6}, {2.1, 1.4}, {0.6, 2.0}, {2.0, 1.7}, {4.0, 1.5}};
  const double k = heat_transfer_k(b, std::span<const WindowAreaU>(w));
  std::reverse(b.facades.begin(), b.facades.end());
  const std::vector<WindowAreaU> r{{2.0, 1.7}, {4.0, 1.5}, {0.6, 2.0}, {0.6, 1.6}, {2.1, 1.4}};
  EXPECT_NEAR(heat_transfer_k(b, std::span<const WindowAreaU>(r)), k, 1e-12);
}
