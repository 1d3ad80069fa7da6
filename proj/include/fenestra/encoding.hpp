#pragma once
// Continuous decision vector <-> buildable design, plus the evaluation cache.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fenestra/building.hpp"
#include "fenestra/catalog.hpp"
#include "fenestra/error.hpp"

namespace fenestra {

enum class Scenario { S1, S2 };
NLOHMANN_JSON_SERIALIZE_ENUM(Scenario, {{Scenario::S1, "S1"}, {Scenario::S2, "S2"}})

inline constexpr int kShadingProgramCount = 7;  // SC0..SC6
inline constexpr double kReflectanceMin = 0.29;
inline constexpr double kReflectanceMax = 0.85;
/// Upper bounds reach one grid cell past the last legal value so every
/// canonical value owns a cell of equal width.
inline constexpr double kGridSlack = 0.099;

enum class DimKind {
  Width, Height, FrameU, Reflectance, GlazingU, GlazingShgc, GlazingVt, ShadingControl,
  OverhangDepth, OverhangExtLeft, OverhangExtRight, FinLeftDepth, FinRightDepth, FinExtTop
};

struct Dimension {
  std::string name;
  DimKind kind;
  std::size_t index;  // slot index for sizes, façade index for per-façade dims
  double lo;
  double hi;
};

struct GenomeLayout {
  std::vector<Dimension> dims;
  std::size_t size() const { return dims.size(); }
  std::vector<double> lower() const {
    std::vector<double> v;
    for (const auto& d : dims) v.push_back(d.lo);
    return v;
  }
  std::vector<double> upper() const {
    std::vector<double> v;
    for (const auto& d : dims) v.push_back(d.hi);
    return v;
  }
};

struct Genome {
  std::vector<double> values;

  void clamp(const GenomeLayout& layout) {
    if (values.size() != layout.size()) throw ValidationError("genome length does not match layout");
    for (std::size_t i = 0; i < values.size(); ++i) {
      double v = std::isfinite(values[i]) ? values[i] : layout.dims[i].lo;
      values[i] = std::clamp(v, layout.dims[i].lo, layout.dims[i].hi);
    }
  }
};

struct FacadeDesign {
  GlazingComposition glazing;
  int shading_control = 0;
  ShadingGeometry shading;
};

struct CanonicalDesign {
  std::vector<WindowAssembly> windows;  // slot order
  std::vector<FacadeDesign> facades;    // building façade order
  FrameSpec frame;
  double reflectance = kReflectanceMin;
  std::string key;

  double total_window_area() const {
    double a = 0;
    for (const auto& w : windows) a += w.area();
    return a;
  }
};

using GlazingTriple = std::array<double, 3>;  // (U, SHGC, VT)

/// Euclidean distance of range-scaled component differences.
inline double normalized_distance(const GlazingTriple& a, const GlazingTriple& b, const GlazingTriple& ranges) {
  double s = 0;
  for (int i = 0; i < 3; ++i) {
    const double r = ranges[i] > 1e-9 ? ranges[i] : 1.0;
    const double d = (a[i] - b[i]) / r;
    s += d * d;
  }
  return std::sqrt(s);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string short_hash(std::string_view key) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  return buf;
}

namespace detail {
inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v + 0.0);
  return buf;
}
}  // namespace detail

/// Candidate glazings of one façade, filtered by its orientation class.
struct GlazingPool {
  std::vector<GlazingComposition> items;
  GlazingTriple lo{};
  GlazingTriple hi{};
  GlazingTriple range() const { return {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]}; }

  std::size_t nearest(const GlazingTriple& t) const {
    const auto r = range();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < items.size(); ++i) {
      const double d = normalized_distance(t, {items[i].u_g, items[i].shgc, items[i].vt}, r);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }
};

/// Everything needed to turn genomes into designs for one building/catalog/scenario.
class DesignSpace {
 public:
  DesignSpace(const Catalog& catalog, BuildingModel building, Scenario scenario)
      : building_(std::move(building)), scenario_(scenario), frames_(catalog.frames) {
    if (frames_.empty()) throw EmptyNeighborhood("catalog has no frames");
    for (const auto& f : building_.facades) {
      GlazingPool pool;
      pool.items = enumerate_compositions(catalog, f.orientation());
      if (pool.items.empty())
        throw EmptyNeighborhood("no legal glazing for façade '" + f.name + "' (" + to_string(f.orientation()) + ")");
      pool.lo = {pool.items[0].u_g, pool.items[0].shgc, pool.items[0].vt};
      pool.hi = pool.lo;
      for (const auto& c : pool.items) {
        const GlazingTriple t{c.u_g, c.shgc, c.vt};
        for (int i = 0; i < 3; ++i) {
          pool.lo[i] = std::min(pool.lo[i], t[i]);
          pool.hi[i] = std::max(pool.hi[i], t[i]);
        }
      }
      pools_.push_back(std::move(pool));
    }
    build_layout();
  }

  const BuildingModel& building() const { return building_; }
  Scenario scenario() const { return scenario_; }
  const GenomeLayout& layout() const { return layout_; }
  const GlazingPool& pool(std::size_t facade) const { return pools_.at(facade); }
  const std::vector<FrameSpec>& frames() const { return frames_; }

  CanonicalDesign canonicalize(Genome g) const {
    g.clamp(layout_);
    const auto slots = building_.slots();
    const auto slot_facade = building_.slot_facades();

    std::vector<double> width(slots.size(), kMinWindowWidth);
    std::vector<double> height(slots.size(), kMinWindowHeight);
    double frame_u = frames_.front().u_value;
    double refl = kReflectanceMin;
    std::vector<GlazingTriple> triples(building_.facades.size());
    std::vector<double> sc(building_.facades.size(), 0.0);
    std::vector<ShadingGeometry> shading(building_.facades.size());

    for (std::size_t i = 0; i < layout_.size(); ++i) {
      const auto& d = layout_.dims[i];
      const double v = g.values[i];
      switch (d.kind) {
        case DimKind::Width: width[d.index] = v; break;
        case DimKind::Height: height[d.index] = v; break;
        case DimKind::FrameU: frame_u = v; break;
        case DimKind::Reflectance: refl = v; break;
        case DimKind::GlazingU: triples[d.index][0] = v; break;
        case DimKind::GlazingShgc: triples[d.index][1] = v; break;
        case DimKind::GlazingVt: triples[d.index][2] = v; break;
        case DimKind::ShadingControl: sc[d.index] = v; break;
        case DimKind::OverhangDepth: shading[d.index].overhang_depth_m = v; break;
        case DimKind::OverhangExtLeft: shading[d.index].overhang_ext_left_m = v; break;
        case DimKind::OverhangExtRight: shading[d.index].overhang_ext_right_m = v; break;
        case DimKind::FinLeftDepth: shading[d.index].fin_left_depth_m = v; break;
        case DimKind::FinRightDepth: shading[d.index].fin_right_depth_m = v; break;
        case DimKind::FinExtTop: shading[d.index].fin_ext_top_m = v; break;
      }
    }

    CanonicalDesign out;
    out.frame = nearest_frame(frame_u);
    out.reflectance = std::floor(refl * 100.0 + 1e-9) / 100.0;
    out.reflectance = std::clamp(std::round(out.reflectance * 100.0) / 100.0, kReflectanceMin, kReflectanceMax);

    for (std::size_t f = 0; f < building_.facades.size(); ++f) {
      FacadeDesign fd;
      fd.glazing = pools_[f].items[pools_[f].nearest(triples[f])];
      fd.shading_control = scenario_ == Scenario::S2 ? 0 : std::clamp(static_cast<int>(std::lround(sc[f])), 0, 6);
      fd.shading = validate_shading(shading[f], building_.facades[f].orientation());
      out.facades.push_back(std::move(fd));
    }
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto chk = validate_window(*slots[s], width[s], height[s]);
      WindowAssembly w;
      w.glazing = out.facades[slot_facade[s]].glazing;
      w.frame = out.frame;
      w.width_m = chk.width_m;
      w.height_m = chk.height_m;
      out.windows.push_back(std::move(w));
    }
    out.key = design_key(out);
    return out;
  }

  /// A genome that canonicalizes back to `d`.
  Genome rebuild(const CanonicalDesign& d) const {
    Genome g;
    g.values.resize(layout_.size());
    auto ext = [](double v) { return std::abs(v - kCornerClip) < 1e-9 ? 0.1 : v; };
    for (std::size_t i = 0; i < layout_.size(); ++i) {
      const auto& dim = layout_.dims[i];
      double& v = g.values[i];
      switch (dim.kind) {
        case DimKind::Width: v = d.windows[dim.index].width_m; break;
        case DimKind::Height: v = d.windows[dim.index].height_m; break;
        case DimKind::FrameU: v = d.frame.u_value; break;
        case DimKind::Reflectance: v = d.reflectance; break;
        case DimKind::GlazingU: v = d.facades[dim.index].glazing.u_g; break;
        case DimKind::GlazingShgc: v = d.facades[dim.index].glazing.shgc; break;
        case DimKind::GlazingVt: v = d.facades[dim.index].glazing.vt; break;
        case DimKind::ShadingControl: v = d.facades[dim.index].shading_control; break;
        case DimKind::OverhangDepth: v = d.facades[dim.index].shading.overhang_depth_m; break;
        case DimKind::OverhangExtLeft: v = ext(d.facades[dim.index].shading.overhang_ext_left_m); break;
        case DimKind::OverhangExtRight: v = ext(d.facades[dim.index].shading.overhang_ext_right_m); break;
        case DimKind::FinLeftDepth: v = d.facades[dim.index].shading.fin_left_depth_m; break;
        case DimKind::FinRightDepth: v = d.facades[dim.index].shading.fin_right_depth_m; break;
        case DimKind::FinExtTop: v = ext(d.facades[dim.index].shading.fin_ext_top_m); break;
      }
      v = std::clamp(v, dim.lo, dim.hi);
    }
    return g;
  }

  /// Canonical value of every genome dimension, as printed in reports.
  std::vector<std::string> canonical_values(const CanonicalDesign& d) const {
    std::vector<std::string> out;
    for (const auto& dim : layout_.dims) {
      const auto& fd = d.facades[std::min(dim.index, d.facades.size() - 1)];
      switch (dim.kind) {
        case DimKind::Width: out.push_back(detail::fixed2(d.windows[dim.index].width_m)); break;
        case DimKind::Height: out.push_back(detail::fixed2(d.windows[dim.index].height_m)); break;
        case DimKind::FrameU: out.push_back(d.frame.id); break;
        case DimKind::Reflectance: out.push_back(detail::fixed2(d.reflectance)); break;
        case DimKind::GlazingU:
        case DimKind::GlazingShgc:
        case DimKind::GlazingVt: out.push_back(d.facades[dim.index].glazing.code); break;
        case DimKind::ShadingControl: out.push_back("SC" + std::to_string(fd.shading_control)); break;
        case DimKind::OverhangDepth: out.push_back(detail::fixed2(fd.shading.overhang_depth_m)); break;
        case DimKind::OverhangExtLeft: out.push_back(detail::fixed2(fd.shading.overhang_ext_left_m)); break;
        case DimKind::OverhangExtRight: out.push_back(detail::fixed2(fd.shading.overhang_ext_right_m)); break;
        case DimKind::FinLeftDepth: out.push_back(detail::fixed2(fd.shading.fin_left_depth_m)); break;
        case DimKind::FinRightDepth: out.push_back(detail::fixed2(fd.shading.fin_right_depth_m)); break;
        case DimKind::FinExtTop: out.push_back(detail::fixed2(fd.shading.fin_ext_top_m)); break;
      }
    }
    return out;
  }

  /// Fixed-order serialization of every design field; equal strings mean equal designs.
  std::string design_key(const CanonicalDesign& d) const {
    std::string k = "F=" + d.frame.id + ";R=" + detail::fixed2(d.reflectance);
    const auto slots = building_.slots();
    for (std::size_t s = 0; s < d.windows.size(); ++s)
      k += ";" + slots[s]->id + "=" + detail::fixed2(d.windows[s].width_m) + "x" + detail::fixed2(d.windows[s].height_m);
    for (std::size_t f = 0; f < d.facades.size(); ++f) {
      const auto& fd = d.facades[f];
      const auto& sh = fd.shading;
      k += ";" + building_.facades[f].name + "=" + fd.glazing.code + "|SC" + std::to_string(fd.shading_control) + "|" +
           detail::fixed2(sh.overhang_depth_m) + "," + detail::fixed2(sh.overhang_ext_left_m) + "," +
           detail::fixed2(sh.overhang_ext_right_m) + "," + detail::fixed2(sh.fin_left_depth_m) + "," +
           detail::fixed2(sh.fin_right_depth_m) + "," + detail::fixed2(sh.fin_ext_top_m);
    }
    return k;
  }

  Genome random_genome(auto& rng) const {
    Genome g;
    for (const auto& d : layout_.dims) {
      std::uniform_real_distribution<double> u(d.lo, d.hi);
      g.values.push_back(u(rng));
    }
    return g;
  }

 private:
  const FrameSpec& nearest_frame(double u) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < frames_.size(); ++i)
      if (std::abs(frames_[i].u_value - u) < std::abs(frames_[best].u_value - u)) best = i;
    return frames_[best];
  }

  void build_layout() {
    auto& dims = layout_.dims;
    const auto slots = building_.slots();
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (slots[s]->width_fixed) continue;
      dims.push_back({slots[s]->id + ".width", DimKind::Width, s, kMinWindowWidth,
                      truncate_decimal(slots[s]->designated_width_m) + kGridSlack});
    }
    for (std::size_t s = 0; s < slots.size(); ++s)
      dims.push_back({slots[s]->id + ".height", DimKind::Height, s, kMinWindowHeight,
                      truncate_decimal(slots[s]->designated_height_m) + kGridSlack});
    auto [fmin, fmax] = std::minmax_element(frames_.begin(), frames_.end(),
                                            [](const auto& a, const auto& b) { return a.u_value < b.u_value; });
    dims.push_back({"frame.u", DimKind::FrameU, 0, fmin->u_value, fmax->u_value});
    dims.push_back({"reflectance", DimKind::Reflectance, 0, kReflectanceMin, kReflectanceMax + 0.0099});
    for (std::size_t f = 0; f < building_.facades.size(); ++f) {
      const auto& n = building_.facades[f].name;
      const auto& p = pools_[f];
      dims.push_back({n + ".glazing.u", DimKind::GlazingU, f, p.lo[0], p.hi[0]});
      dims.push_back({n + ".glazing.shgc", DimKind::GlazingShgc, f, p.lo[1], p.hi[1]});
      dims.push_back({n + ".glazing.vt", DimKind::GlazingVt, f, p.lo[2], p.hi[2]});
    }
    for (std::size_t f = 0; f < building_.facades.size(); ++f)
      dims.push_back({building_.facades[f].name + ".sc", DimKind::ShadingControl, f, 0.0,
                      kShadingProgramCount - 1 + 0.999});
    for (std::size_t f = 0; f < building_.facades.size(); ++f) {
      const auto& n = building_.facades[f].name;
      const double dmax = kMaxShadingDepth + kGridSlack;
      const double emax = kMaxShadingExtension + kGridSlack;
      dims.push_back({n + ".overhang.depth", DimKind::OverhangDepth, f, 0.0, dmax});
      dims.push_back({n + ".overhang.ext_left", DimKind::OverhangExtLeft, f, 0.0, emax});
      dims.push_back({n + ".overhang.ext_right", DimKind::OverhangExtRight, f, 0.0, emax});
      dims.push_back({n + ".fin_left.depth", DimKind::FinLeftDepth, f, 0.0, dmax});
      dims.push_back({n + ".fin_right.depth", DimKind::FinRightDepth, f, 0.0, dmax});
      dims.push_back({n + ".fin.ext_top", DimKind::FinExtTop, f, 0.0, emax});
    }
  }

  BuildingModel building_;
  Scenario scenario_;
  std::vector<FrameSpec> frames_;
  std::vector<GlazingPool> pools_;
  GenomeLayout layout_;
};

inline CanonicalDesign canonicalize(const Genome& g, const Catalog& catalog, const BuildingModel& building,
                                    Scenario scenario) {
  return DesignSpace(catalog, building, scenario).canonicalize(g);
}

// ---------------------------------------------------------------------------
// Design JSON (solution schema)

inline json design_to_json(const CanonicalDesign& d, const BuildingModel& b) {
  json windows = json::array();
  const auto slots = b.slots();
  const auto sf = b.slot_facades();
  for (std::size_t s = 0; s < d.windows.size(); ++s) {
    const auto& w = d.windows[s];
    windows.push_back({{"slot", slots[s]->id},
                       {"room", slots[s]->room},
                       {"facade", b.facades[sf[s]].name},
                       {"width_m", w.width_m},
                       {"height_m", w.height_m},
                       {"area_m2", w.area()},
                       {"glazing", w.glazing.code},
                       {"u_w", window_u(w)}});
  }
  json facades = json::array();
  for (std::size_t f = 0; f < d.facades.size(); ++f) {
    const auto& fd = d.facades[f];
    facades.push_back({{"name", b.facades[f].name},
                       {"orientation", b.facades[f].orientation()},
                       {"glazing", fd.glazing},
                       {"shading_control", "SC" + std::to_string(fd.shading_control)},
                       {"shading", fd.shading}});
  }
  return json{{"key", d.key},
              {"hash", short_hash(d.key)},
              {"frame", d.frame},
              {"reflectance", d.reflectance},
              {"windows", windows},
              {"facades", facades}};
}

/// Inverse of design_to_json; glazing is taken verbatim from the file.
inline CanonicalDesign design_from_json(const json& j, const BuildingModel& b) {
  CanonicalDesign d;
  try {
    j.at("frame").get_to(d.frame);
    j.at("reflectance").get_to(d.reflectance);
    const auto& fj = j.at("facades");
    if (fj.size() != b.facades.size()) throw ParseError("design façade count does not match building");
    for (const auto& f : fj) {
      FacadeDesign fd;
      f.at("glazing").get_to(fd.glazing);
      const auto sc = f.at("shading_control").get<std::string>();
      if (sc.size() != 3 || sc.rfind("SC", 0) != 0 || sc[2] < '0' || sc[2] > '6')
        throw ParseError("bad shading control '" + sc + "'");
      fd.shading_control = sc[2] - '0';
      f.at("shading").get_to(fd.shading);
      d.facades.push_back(std::move(fd));
    }
    const auto& wj = j.at("windows");
    const auto sf = b.slot_facades();
    if (wj.size() != sf.size()) throw ParseError("design window count does not match building");
    for (std::size_t s = 0; s < wj.size(); ++s) {
      WindowAssembly w;
      w.glazing = d.facades[sf[s]].glazing;
      w.frame = d.frame;
      wj[s].at("width_m").get_to(w.width_m);
      wj[s].at("height_m").get_to(w.height_m);
      d.windows.push_back(std::move(w));
    }
    d.key = j.value("key", std::string{});
  } catch (const json::exception& e) {
    throw ParseError(std::string("design: ") + e.what());
  }
  return d;
}

// ---------------------------------------------------------------------------
// Cache

/// Memoizes evaluations by design key. Concurrent requests for a key that is
/// being computed wait for the first computation instead of repeating it.
template <class Value>
class EvalCache {
 public:
  struct Lookup {
    Value value;
    bool hit;
  };

  Lookup get_or_compute(const std::string& key, const std::function<Value()>& compute) {
    std::promise<Value> promise;
    std::shared_future<Value> fut;
    bool owner = false;
    {
      std::lock_guard lock(mu_);
      if (auto it = entries_.find(key); it != entries_.end()) {
        ++hits_;
        fut = it->second;
      } else {
        ++misses_;
        owner = true;
        fut = promise.get_future().share();
        entries_.emplace(key, fut);
        order_.push_back(key);
      }
    }
    if (!owner) return {fut.get(), true};
    try {
      promise.set_value(compute());
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(mu_);
      entries_.erase(key);
      order_.erase(std::remove(order_.begin(), order_.end(), key), order_.end());
    }
    return {fut.get(), false};
  }

  std::size_t hits() const {
    std::lock_guard lock(mu_);
    return hits_;
  }
  std::size_t misses() const {
    std::lock_guard lock(mu_);
    return misses_;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }
  bool contains(const std::string& key) const {
    std::lock_guard lock(mu_);
    return entries_.count(key) != 0;
  }

  /// Completed entries in first-insertion order.
  std::vector<std::pair<std::string, Value>> snapshot() const {
    std::vector<std::pair<std::string, Value>> out;
    std::lock_guard lock(mu_);
    for (const auto& k : order_) {
      const auto& fut = entries_.at(k);
      if (fut.wait_for(std::chrono::seconds(0)) == std::future_status::ready) out.emplace_back(k, fut.get());
    }
    return out;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_future<Value>> entries_;
  std::vector<std::string> order_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace fenestra
