#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace fenestra;
namespace ft = fenestra::testing;

namespace {

GlassPane pane(const std::string& id, int mm, double tsol, double ef, double eb,
               GlassCategory cat = GlassCategory::Clear) {
  GlassPane g;
  g.id = id;
  g.thickness_mm = mm;
  g.tsol = tsol;
  g.tvis = 0.8;
  g.emis_front = ef;
  g.emis_back = eb;
  g.category = cat;
  return g;
}

nlohmann::json minimal_catalog_json() {
  return {{"glasses", {{{"id", "clear4"}, {"thickness_mm", 4}, {"tsol", 0.82}, {"tvis", 0.9},
                        {"emis_front", 0.84}, {"emis_back", 0.84}, {"category", "Clear"}}}},
          {"gaps", {{{"gas", "Air"}, {"width_mm", 12}}}},
          {"frames", {{{"id", "f"}, {"material", "WoodAlum"}, {"u_value", 1.19}, {"width_m", 0.07}}}}};
}

}  // namespace

TEST(Catalog, BundledFixtureCounts) {
  const auto& c = ft::bundled_catalog();
  EXPECT_EQ(c.glasses.size(), 12u);
  EXPECT_EQ(c.gaps.size(), 10u);
  ASSERT_EQ(c.frames.size(), 10u);
  std::multiset<double> u;
  for (const auto& f : c.frames) u.insert(f.u_value);
  EXPECT_EQ(u, (std::multiset<double>{1.9, 1.5, 1.19, 4, 3.2, 0.9, 0.71, 2.2, 1.8, 0.66}));
}

TEST(Catalog, RejectsBadThickness) {
  auto j = minimal_catalog_json();
  j["glasses"][0]["thickness_mm"] = 5;
  EXPECT_THROW(parse_catalog(j), ValidationError);
}

TEST(Catalog, RejectsDuplicateIds) {
  auto j = minimal_catalog_json();
  j["glasses"].push_back(j["glasses"][0]);
  EXPECT_THROW(parse_catalog(j), ValidationError);
}

TEST(Catalog, RejectsMalformedDocument) {
  EXPECT_THROW(parse_catalog(nlohmann::json{{"glasses", 3}}), ParseError);
  ft::TempDir dir("catalog");
  std::ofstream(dir.path() / "bad.json") << "{ not json";
  EXPECT_THROW(load_catalog(dir.path() / "bad.json"), ParseError);
}

TEST(Catalog, CategoryBandsEnforced) {
  auto g = pane("ss", 6, 0.40, 0.84, 0.84, GlassCategory::SpectrallySelective);
  g.tvis = 0.80;  // outside [0.56, 0.68]
  EXPECT_THROW(validate(g), ValidationError);
  g.tvis = 0.60;
  EXPECT_NO_THROW(validate(g));
}

TEST(CenterOfGlass, LowEArgonExample) {
  const double hand = ft::hand_center_of_glass_u(0.004, 0.89, 0.017, 0.016, 0.004, 0.05);
  EXPECT_NEAR(hand, 1.068, 0.01);
  const double lib = center_of_glass_u(pane("a", 4, 0.8, 0.89, 0.89), {Gas::Argon, 16}, pane("b", 4, 0.6, 0.05, 0.84));
  EXPECT_NEAR(lib, hand, 1e-12);
}

TEST(CenterOfGlass, ClearAirExample) {
  const double hand = ft::hand_center_of_glass_u(0.004, 0.84, 0.025, 0.012, 0.004, 0.84);
  EXPECT_NEAR(hand, 2.854, 0.01);
  const auto c = ft::bundled_catalog().find_glass("clear4");
  EXPECT_NEAR(center_of_glass_u(*c, {Gas::Air, 12}, *c), hand, 1e-12);
}

TEST(CenterOfGlass, DegenerateGap) {
  EXPECT_THROW(center_of_glass_u(0.004, 0.84, Gas::Air, 0.0, 0.004, 0.84), DegenerateGap);
}

TEST(CenterOfGlass, MonotoneInEmissivityAndGap) {
  double prev = 0;
  for (double eps = 0.05; eps <= 0.9; eps += 0.05) {
    const double u = center_of_glass_u(0.004, eps, Gas::Air, 0.012, 0.004, 0.84);
    EXPECT_GT(u, prev);
    prev = u;
  }
  prev = 1e9;
  for (double s : {0.002, 0.004, 0.006, 0.010, 0.016, 0.020}) {
    const double u = center_of_glass_u(0.004, 0.84, Gas::Argon, s, 0.004, 0.84);
    EXPECT_LT(u, prev);
    prev = u;
  }
}

TEST(Optics, HandExampleAndClamp) {
  const double r1 = 0.08 + 0.2 * (1 - 0.62), r2 = 0.08 + 0.2 * (1 - 0.82);
  EXPECT_NEAR(two_pane_transmission(0.62, 0.82), 0.62 * 0.82 / (1 - r1 * r2), 1e-12);
  EXPECT_NEAR(two_pane_transmission(0.62, 0.82), 0.5177, 0.001);
  EXPECT_DOUBLE_EQ(two_pane_transmission(1.0, 1.0), 1.0);
}

TEST(Optics, CatalogOverrideWins) {
  Catalog c = ft::bundled_catalog();
  const auto plain = enumerate_compositions(c, Orientation::S).front();
  c.optics_overrides[plain.code] = {0.42, 0.61};
  const auto over = parse_composition_code(plain.code, c);
  EXPECT_DOUBLE_EQ(over.shgc, 0.42);
  EXPECT_DOUBLE_EQ(over.vt, 0.61);
}

TEST(WindowU, EqualValuesAndHandExample) {
  EXPECT_NEAR(window_u(1.8, 1.8, 1.2, 1.4), 1.8, 1e-12);
  const double ag = (0.6 - 0.14) * (1.0 - 0.14);
  EXPECT_NEAR(ag, 0.3956, 1e-9);
  EXPECT_NEAR(window_u(1.07, 1.19, 0.6, 1.0), (1.07 * ag + 1.19 * (0.6 - ag)) / 0.6, 1e-12);
  EXPECT_NEAR(window_u(1.07, 1.19, 0.6, 1.0), 1.111, 0.005);
}

TEST(WindowU, NoGlazedAreaThrows) { EXPECT_THROW(window_u(1.0, 1.0, 0.14, 1.0), GeometryError); }

TEST(WindowU, ConvexCombination) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 5.0), w(0.6, 3.7), h(1.0, 1.8);
  for (int i = 0; i < 1000; ++i) {
    const double ug = u(rng), uf = u(rng);
    const double uw = window_u(ug, uf, w(rng), h(rng));
    EXPECT_GE(uw, std::min(ug, uf) - 1e-12);
    EXPECT_LE(uw, std::max(ug, uf) + 1e-12);
  }
}

TEST(RuleEngine, NorthRejectsSolarControlOnly) {
  Catalog c;
  c.glasses = {pane("st1", 6, 0.30, 0.84, 0.84, GlassCategory::LowTsol),
               pane("st2", 4, 0.30, 0.84, 0.84, GlassCategory::LowTsol)};
  c.gaps = {{Gas::Air, 12}};
  EXPECT_TRUE(enumerate_compositions(c, Orientation::N).empty());
}

TEST(RuleEngine, BundledMatchesOracleEveryOrientation) {
  const auto& c = ft::bundled_catalog();
  std::size_t total = 0;
  for (auto o : kAllOrientations) {
    std::set<ft::CompositionTuple> got;
    for (const auto& comp : enumerate_compositions(c, o)) got.insert(ft::tuple_of(comp));
    EXPECT_EQ(got, ft::brute_force_compositions(c, o)) << to_string(o);
    total += got.size();
  }
  EXPECT_GT(total, 0u);
}

TEST(RuleEngine, RandomMiniCatalogsMatchOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Catalog c = ft::random_mini_catalog(rng);
    for (auto o : kAllOrientations) {
      std::set<ft::CompositionTuple> got;
      for (const auto& comp : enumerate_compositions(c, o)) got.insert(ft::tuple_of(comp));
      ASSERT_EQ(got, ft::brute_force_compositions(c, o)) << "trial " << trial << " " << to_string(o);
    }
  }
}

TEST(RuleEngine, OrientationInvariants) {
  const auto& c = ft::bundled_catalog();
  for (auto o : kAllOrientations)
    for (const auto& comp : enumerate_compositions(c, o)) {
      EXPECT_FALSE(comp.outer.pane.low_e() && comp.inner.pane.low_e());
      if (o == Orientation::N) { EXPECT_GE(comp.outer.pane.tsol, 0.54); }
      if (is_south(o)) { EXPECT_NE(comp.low_e_face(), 3); }
      EXPECT_GT(comp.u_g, 0.5);
      EXPECT_LT(comp.u_g, 3.5);
    }
}

TEST(RuleEngine, CodesRoundTrip) {
  const auto& c = ft::bundled_catalog();
  for (auto o : kAllOrientations)
    for (const auto& comp : enumerate_compositions(c, o)) EXPECT_EQ(parse_composition_code(comp.code, c), comp);
}

TEST(RuleEngine, PublishedCodesParse) {
  const auto& c = ft::bundled_catalog();
  const auto comp = parse_composition_code("e6_0.16#2_tsol71tvis88,Argon_12,clear6", c);
  EXPECT_EQ(comp.low_e_face(), 2);
  EXPECT_EQ(comp.gap.gas, Gas::Argon);
  EXPECT_THROW(parse_composition_code("clear6,Argon_12", c), ParseError);
  EXPECT_THROW(parse_composition_code("nope,Air_12,clear6", c), ParseError);
  EXPECT_THROW(parse_composition_code("clear6#1,Air_12,clear6", c), ParseError);
}

TEST(Orientation, Sectors) {
  EXPECT_EQ(classify_orientation(0), Orientation::N);
  EXPECT_EQ(classify_orientation(-30), Orientation::N);
  EXPECT_EQ(classify_orientation(90), Orientation::E);
  EXPECT_EQ(classify_orientation(135), Orientation::SE);
  EXPECT_EQ(classify_orientation(180), Orientation::S);
  EXPECT_EQ(classify_orientation(225), Orientation::SW);
  EXPECT_EQ(classify_orientation(270), Orientation::W);
  EXPECT_EQ(classify_orientation(630), Orientation::W);
}
