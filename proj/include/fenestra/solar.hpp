#pragma once
// Sun position, irradiance on vertical façades and fixed-shading sunlit fractions.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fenestra/building.hpp"

namespace fenestra {

inline constexpr double kDeg = std::numbers::pi / 180.0;
inline constexpr double kGroundAlbedo = 0.2;

struct SunPosition {
  double altitude_deg = 0;
  double azimuth_deg = 0;  // 0 = north, clockwise
  bool up() const { return altitude_deg > 0; }
};

inline double solar_declination_deg(int day_of_year) {
  return 23.45 * std::sin(360.0 * (284 + day_of_year) / 365.0 * kDeg);
}

/// Equation of time in minutes.
inline double equation_of_time_min(int day_of_year) {
  const double b = 360.0 * (day_of_year - 81) / 364.0 * kDeg;
  return 9.87 * std::sin(2 * b) - 7.53 * std::cos(b) - 1.5 * std::sin(b);
}

/// Local apparent solar time (h) for a clock time at a site.
inline double solar_time_h(double clock_h, int day_of_year, double longitude_deg, double utc_offset_h) {
  return clock_h + (4.0 * (longitude_deg - 15.0 * utc_offset_h) + equation_of_time_min(day_of_year)) / 60.0;
}

inline SunPosition solar_position(double latitude_deg, int day_of_year, double solar_hour) {
  const double phi = latitude_deg * kDeg;
  const double delta = solar_declination_deg(day_of_year) * kDeg;
  const double h = 15.0 * (solar_hour - 12.0) * kDeg;
  const double sin_alt = std::sin(phi) * std::sin(delta) + std::cos(phi) * std::cos(delta) * std::cos(h);
  const double alt = std::asin(std::clamp(sin_alt, -1.0, 1.0));
  // Azimuth from south (west positive), then shifted to north-clockwise.
  const double gamma = std::atan2(std::sin(h), std::cos(h) * std::sin(phi) - std::tan(delta) * std::cos(phi));
  double az = gamma / kDeg + 180.0;
  az = std::fmod(az + 360.0, 360.0);
  return {alt / kDeg, az};
}

struct Incident {
  double direct = 0;
  double diffuse = 0;
  double total() const { return direct + diffuse; }
};

/// Irradiance on a vertical surface facing `facade_azimuth_deg`; isotropic sky plus ground reflection.
inline Incident incident_irradiance(double dni, double dhi, double ghi, const SunPosition& sun,
                                    double facade_azimuth_deg) {
  Incident r;
  if (sun.up()) {
    const double cos_theta =
        std::cos(sun.altitude_deg * kDeg) * std::cos((sun.azimuth_deg - facade_azimuth_deg) * kDeg);
    r.direct = dni * std::max(0.0, cos_theta);
  }
  r.diffuse = dhi / 2.0 + kGroundAlbedo * ghi / 2.0;
  return r;
}

/// Sun direction projected into a façade frame: lateral and vertical shadow
/// offsets per unit of device depth. Positive lateral points to the right of
/// an observer facing the façade from outside.
struct ShadowSlopes {
  double lateral = 0;   // s_u / s_n
  double vertical = 0;  // s_v / s_n, the tangent of the profile angle
  bool in_front = false;
};

inline ShadowSlopes shadow_slopes(const SunPosition& sun, double facade_azimuth_deg) {
  ShadowSlopes s;
  const double ca = std::cos(sun.altitude_deg * kDeg);
  const double sn = ca * std::cos((sun.azimuth_deg - facade_azimuth_deg) * kDeg);
  if (!sun.up() || sn <= 1e-9) return s;
  const double su = ca * std::sin((facade_azimuth_deg - sun.azimuth_deg) * kDeg);
  const double sv = std::sin(sun.altitude_deg * kDeg);
  s.lateral = su / sn;
  s.vertical = sv / sn;
  s.in_front = true;
  return s;
}

namespace geom {

struct Pt {
  double x, y;
};

/// Convex polygon with inline storage; clipping two quads never exceeds it.
class Poly {
 public:
  static constexpr std::size_t kCapacity = 32;
  Poly() = default;
  Poly(std::initializer_list<Pt> pts) {
    for (const auto& p : pts) push_back(p);
  }
  void push_back(Pt p) {
    if (n_ == kCapacity) throw GeometryError("polygon vertex capacity exceeded");
    v_[n_++] = p;
  }
  void clear() { n_ = 0; }
  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  const Pt& operator[](std::size_t i) const { return v_[i]; }
  Pt& operator[](std::size_t i) { return v_[i]; }
  Pt* begin() { return v_.data(); }
  Pt* end() { return v_.data() + n_; }
  const Pt* begin() const { return v_.data(); }
  const Pt* end() const { return v_.data() + n_; }

 private:
  std::array<Pt, kCapacity> v_{};
  std::size_t n_ = 0;
};

inline double signed_area2(const Poly& p) {
  double a = 0;
  for (std::size_t i = 0, n = p.size(); i < n; ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % n];
    a += u.x * v.y - v.x * u.y;
  }
  return a;
}

inline double area(const Poly& p) { return std::abs(signed_area2(p)) / 2.0; }

inline double cross(const Pt& a, const Pt& b, const Pt& c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

inline Poly make_ccw(Poly p) {
  if (signed_area2(p) < 0) std::reverse(p.begin(), p.end());
  return p;
}

struct Box {
  double x0, y0, x1, y1;
};

inline Box bounds(const Poly& p) {
  Box b{p[0].x, p[0].y, p[0].x, p[0].y};
  for (const auto& q : p) {
    b.x0 = std::min(b.x0, q.x);
    b.y0 = std::min(b.y0, q.y);
    b.x1 = std::max(b.x1, q.x);
    b.y1 = std::max(b.y1, q.y);
  }
  return b;
}

inline bool overlaps(const Box& a, const Box& b) { return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1; }

/// Sutherland-Hodgman: `subject` clipped by the convex counter-clockwise `clip`.
inline Poly clip(const Poly& subject, const Poly& clip_poly) {
  if (subject.empty() || clip_poly.empty() || !overlaps(bounds(subject), bounds(clip_poly))) return {};
  Poly buf[2];
  buf[0] = subject;
  int cur = 0;
  for (std::size_t i = 0, n = clip_poly.size(); i < n && !buf[cur].empty(); ++i) {
    const Pt a = clip_poly[i];
    const Pt b = clip_poly[(i + 1) % n];
    const Poly& in = buf[cur];
    Poly& out = buf[1 - cur];
    out.clear();
    for (std::size_t k = 0, m = in.size(); k < m; ++k) {
      const Pt p = in[k];
      const Pt q = in[(k + 1) % m];
      const double dp = cross(a, b, p);
      const double dq = cross(a, b, q);
      if (dp >= 0) out.push_back(p);
      if ((dp >= 0) != (dq >= 0)) {
        const double t = dp / (dp - dq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    cur = 1 - cur;
  }
  return buf[cur];
}

}  // namespace geom

/// Fraction of a w x h window not shadowed by its overhang and fins, for
/// direct sun with the given slopes. Exact union of the device shadows.
inline double sunlit_fraction(double width_m, double height_m, const ShadingGeometry& g, const ShadowSlopes& s) {
  if (!g.any()) return 1.0;
  if (!s.in_front) return 0.0;
  using geom::Poly;
  const double a = s.lateral;
  const double b = s.vertical;
  const double w = width_m;
  const double h = height_m;
  const Poly window{{0, 0}, {w, 0}, {w, h}, {0, h}};

  std::array<Poly, 3> shadows;
  std::size_t ns = 0;
  if (g.has_overhang()) {
    const double d = g.overhang_depth_m;
    const double x0 = -g.overhang_ext_left_m;
    const double x1 = w + g.overhang_ext_right_m;
    shadows[ns++] = (geom::make_ccw({{x0, h}, {x1, h}, {x1 - d * a, h - d * b}, {x0 - d * a, h - d * b}}));
  }
  auto fin = [&](double x, double d) {
    const double top = h + g.fin_ext_top_m;
    shadows[ns++] = (geom::make_ccw({{x, 0}, {x - d * a, -d * b}, {x - d * a, top - d * b}, {x, top}}));
  };
  if (g.has_left_fin()) fin(0.0, g.fin_left_depth_m);
  if (g.has_right_fin()) fin(w, g.fin_right_depth_m);

  std::array<Poly, 3> on_window;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ns; ++i) {
    const auto& p = shadows[i];
    // Degenerate shadows (sun grazing the device plane) have no area.
    if (geom::area(p) < 1e-12) continue;
    auto c = geom::clip(p, window);
    if (c.size() >= 3) on_window[n++] = geom::make_ccw(c);
  }
  double shaded = 0;
  for (std::size_t i = 0; i < n; ++i) shaded += geom::area(on_window[i]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      auto ij = geom::clip(on_window[i], on_window[j]);
      if (ij.size() < 3) continue;
      shaded -= geom::area(ij);
      for (std::size_t k = j + 1; k < n; ++k) {
        auto ijk = geom::clip(geom::make_ccw(ij), on_window[k]);
        if (ijk.size() >= 3) shaded += geom::area(ijk);
      }
    }
  return std::clamp(1.0 - shaded / (w * h), 0.0, 1.0);
}

}  // namespace fenestra
