// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Arguments select criteria by number; none runs all twelve.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fenestra/run.hpp"
#include "fenestra/optimize/benchmarks.hpp"
#include "support.hpp"

using namespace fenestra;
namespace ft = fenestra::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
  void require(bool ok, const std::string& what) {
    if (!ok) {
      note(what);
      pass = false;
    }
  }
};

int failures = 0;

void report(int n, const std::string& title, Verdict& v, Clock::time_point t0) {
  const double s = seconds_since(t0);
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << title << " (" << s << " s)";
  if (!v.detail.empty()) std::cout << " [" << v.detail << "]";
  std::cout << std::endl;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

const DesignSpace& s1_space() {
  static const DesignSpace s(ft::bundled_catalog(), ft::bundled_building(), Scenario::S1);
  return s;
}

std::shared_ptr<const Simulator> simulator(const std::string& city) {
  auto climate = std::make_shared<const Climate>(parse_epw(ft::weather_path(city)), ft::bundled_building());
  return std::make_shared<const Simulator>(climate, ft::bundled_building(), default_gain_schedule());
}

// ---------------------------------------------------------------------------

void weights() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto c = location_preset(Location::Madrid);
  const std::pair<Metric, double> expect[] = {
      {Metric::NCT, 1.0}, {Metric::FixedShadingCost, 0.295}, {Metric::WindowCost, 0.291}};
  for (const auto& [m, w] : expect) {
    const double got = c.quality(m).weight;
    v.require(std::round(got * 1000) / 1000 == w, "weight " + fmt(got) + " != " + fmt(w));
  }
  v.require(std::round(weight_from_real_world(20, 44.27) * 1000) / 1000 == 0.295, "shading formula");
  v.require(std::round(weight_from_real_world(60, 17.57 - 3) * 1000) / 1000 == 0.291, "window formula");
  v.require(seconds_since(t0) < 1.0, "slower than 1 s");
  report(1, "weight reproduction", v, t0);
}

void penalty_boundaries() {
  const auto t0 = Clock::now();
  Verdict v;
  auto exact = [&](double got, double want, const std::string& what) {
    v.require(std::abs(got - want) <= 1e-12, what + " = " + fmt(got));
  };
  exact(penalty_solar(2.0), 0.0, "p_solar(2)");
  exact(penalty_solar(3.5), 1.0, "p_solar(3.5)");
  for (double lim : {1.8, 2.3}) {
    exact(penalty_window_u(lim, lim), 0.0, "p_tt(" + fmt(lim) + ")");
    exact(penalty_window_u(5.5, lim), 1.0, "p_tt(5.5) at " + fmt(lim));
  }
  for (double kmax : {0.54, 0.59, 0.69}) {
    exact(penalty_k(kmax, kmax), 0.0, "p_htc(" + fmt(kmax) + ")");
    exact(penalty_k(0.9, kmax), 1.0, "p_htc(0.9) at " + fmt(kmax));
  }
  exact(penalty_min_glazing(0.12), 0.0, "p_rwf(0.12)");
  report(2, "penalty boundary suite", v, t0);
}

void normalization() {
  const auto t0 = Clock::now();
  Verdict v;
  const std::pair<Location, std::pair<double, double>> rows[] = {
      {Location::Leon, {41, 96}}, {Location::Madrid, {25, 80}}, {Location::Sevilla, {7, 62}}};
  for (const auto& [loc, mm] : rows) {
    const auto c = location_preset(loc);
    const auto& q = c.quality(Metric::EDh);
    const double sat = heating_satisfaction(loc);
    v.require(q.min == mm.first && q.max == mm.second, "EDh range " + fmt(q.min) + "/" + fmt(q.max));
    v.require(q.min == sat - 5 && q.max == sat + 50, "EDh rule at sat " + fmt(sat));
    const auto& cool = c.quality(Metric::EDc);
    const double csat = cooling_satisfaction(loc);
    v.require(cool.min == csat - 5 && cool.max == csat + 50, "EDc rule at sat " + fmt(csat));
    const auto& nct = c.quality(Metric::NCT);
    v.require(nct.min == 388 && nct.max == 938, "NCT bounds " + fmt(nct.min) + "/" + fmt(nct.max));
  }
  report(3, "normalization table", v, t0);
}

void zone_ordering() {
  const auto t0 = Clock::now();
  Verdict v;
  // Designs come from a short optimization so both compliant and penalized
  // designs are plentiful; pairs are then drawn at random.
  auto space = std::make_shared<const DesignSpace>(ft::bundled_catalog(), ft::bundled_building(), Scenario::S1);
  opt::FenestrationProblem problem(space, opt::builtin_backend(simulator("madrid")),
                                   location_preset(Location::Madrid));
  opt::hybrid_run(opt::HybridConfig{}, problem, 1000, 17);
  std::vector<FitnessBreakdown> penalized, compliant;
  for (const auto& e : problem.ranked_evaluations()) {
    if (!e.breakdown.penalties.compliant())
      penalized.push_back(e.breakdown);
    else if (e.breakdown.quality_sum() <= 1.0)
      compliant.push_back(e.breakdown);
  }
  v.require(!penalized.empty() && !compliant.empty(), "need both kinds of design");
  if (v.pass) {
    std::mt19937_64 rng(99);
    std::size_t violations = 0;
    double smallest_gap = 1e300;
    for (int i = 0; i < 1000; ++i) {
      const auto& p = penalized[std::uniform_int_distribution<std::size_t>(0, penalized.size() - 1)(rng)];
      const auto& c = compliant[std::uniform_int_distribution<std::size_t>(0, compliant.size() - 1)(rng)];
      violations += !(p.total > c.total);
      smallest_gap = std::min(smallest_gap, p.total - c.total);
    }
    v.require(violations == 0, std::to_string(violations) + " violations");
    v.note(std::to_string(penalized.size()) + " penalized, " + std::to_string(compliant.size()) +
           " compliant, min gap " + fmt(smallest_gap));
  }
  report(4, "zone ordering", v, t0);
}

void rule_engine() {
  const auto t0 = Clock::now();
  Verdict v;
  std::mt19937_64 rng(2024);
  std::size_t mismatches = 0, compared = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Catalog c = ft::random_mini_catalog(rng, 8, 4);
    for (auto o : kAllOrientations) {
      std::set<ft::CompositionTuple> got;
      for (const auto& comp : enumerate_compositions(c, o)) got.insert(ft::tuple_of(comp));
      mismatches += got != ft::brute_force_compositions(c, o);
      ++compared;
    }
  }
  v.require(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(compared) + " sets differ");
  v.require(seconds_since(t0) < 30.0, "slower than 30 s");
  report(5, "rule-engine oracle", v, t0);
}

void window_physics() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto& cat = ft::bundled_catalog();
  {
    const double hand = ft::hand_center_of_glass_u(0.004, 0.89, 0.017, 0.016, 0.004, 0.05);
    const auto clear = *cat.find_glass("clear4");
    GlassPane coated = clear;
    coated.emis_front = 0.05;
    coated.emis_back = 0.84;
    GlassPane front = clear;
    front.emis_front = front.emis_back = 0.89;
    const double lib = center_of_glass_u(front, {Gas::Argon, 16}, coated);
    v.require(std::abs(hand - 1.068) <= 0.01 && std::abs(lib - hand) < 1e-9, "low-e argon u_g " + fmt(lib));
  }
  {
    const double hand = ft::hand_center_of_glass_u(0.004, 0.84, 0.025, 0.012, 0.004, 0.84);
    const auto clear = *cat.find_glass("clear4");
    const double lib = center_of_glass_u(clear, {Gas::Air, 12}, clear);
    v.require(std::abs(hand - 2.854) <= 0.01 && std::abs(lib - hand) < 1e-9, "clear air u_g " + fmt(lib));
  }
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.5, 5.0), w(0.6, 3.7), h(1.0, 1.8);
  std::size_t outside = 0;
  for (int i = 0; i < 1000; ++i) {
    const double ug = u(rng), uf = u(rng);
    const double uw = window_u(ug, uf, w(rng), h(rng));
    outside += uw < std::min(ug, uf) - 1e-12 || uw > std::max(ug, uf) + 1e-12;
  }
  v.require(outside == 0, std::to_string(outside) + " non-convex u_w");
  const auto frame = *cat.find_frame("FrameWoodAlum_Class4");
  for (const auto& r : ft::reference_windows()) {
    const double uw = window_u(WindowAssembly{parse_composition_code(r.code, cat), frame, r.width, r.height, 0.0});
    v.require(std::abs(uw - r.printed_u) <= 0.15, std::string(r.code) + " u_w " + fmt(uw) + " vs " + fmt(r.printed_u));
  }
  report(6, "window physics", v, t0);
}

void conservation() {
  const auto t0 = Clock::now();
  Verdict v;
  double worst = 0;
  for (const char* city : {"leon", "madrid", "sevilla"}) {
    const auto sim = simulator(city);
    std::mt19937_64 rng(31);
    for (int i = 0; i < 20; ++i) {
      const auto r = sim->simulate(s1_space().canonicalize(s1_space().random_genome(rng)));
      worst = std::max(worst, r.ledger.relative_residual());
    }
  }
  v.require(worst < 1e-6, "worst relative residual " + fmt(worst));

  // Constant 0 C outside, no gains: heating equals UA * 22 K for a year.
  ZoneDrivers d;
  for (int m = 1; m <= 12; ++m)
    for (int h = 0; h < kDaysInMonth[m - 1] * 24; ++h) d.month.push_back(m);
  d.t_out.assign(d.month.size(), 0.0);
  d.internal_w.assign(d.month.size(), 0.0);
  d.daytime.assign(d.month.size(), false);
  ZoneParams p;
  p.capacitance_j_k = 5e6;
  p.conductance_w_k = 100;
  p.floor_area_m2 = 60;
  const double edh = run_zone(p, d).edh;
  v.require(std::abs(edh - 321.2) <= 0.01 * 321.2, "steady heating " + fmt(edh));
  report(7, "simulator conservation", v, t0);
}

void canonicalization() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto& sp = s1_space();
  std::mt19937_64 rng(8);
  std::size_t unstable = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto d = sp.canonicalize(sp.random_genome(rng));
    unstable += sp.canonicalize(sp.rebuild(d)).key != d.key;
  }
  v.require(unstable == 0, std::to_string(unstable) + " genomes not idempotent");

  // 60 individuals x 10 generations with every call charged.
  std::set<std::string> simulated;
  std::size_t backend_calls = 0;
  const auto sim = simulator("madrid");
  opt::SimulateFn counting = [&](const CanonicalDesign& d) {
    ++backend_calls;
    simulated.insert(d.key);
    return sim->simulate(d);
  };
  auto space = std::make_shared<const DesignSpace>(ft::bundled_catalog(), ft::bundled_building(), Scenario::S1);
  opt::FenestrationProblem problem(space, counting, location_preset(Location::Madrid));
  const auto rec = opt::de_run(opt::DEConfig{}, problem, 600, 3, opt::BudgetMode::AllCalls);
  v.require(rec.calls == 600, "calls " + std::to_string(rec.calls));
  v.require(backend_calls == simulated.size(), "backend ran a key twice");
  v.require(problem.simulations() == simulated.size(), "simulation count " + std::to_string(problem.simulations()));
  v.require(problem.charged() == simulated.size(), "distinct keys " + std::to_string(problem.charged()));
  v.require(problem.charged() + problem.cache_hits() == rec.calls, "hits + distinct != calls");
  v.note(std::to_string(simulated.size()) + " distinct of " + std::to_string(rec.calls) + " calls");
  report(8, "canonicalization and cache accounting", v, t0);
}

void optimizer_comparison() {
  const auto t0 = Clock::now();
  Verdict v;
  for (const char* fn : {"sphere", "rastrigin"}) {
    std::vector<double> hybrid, ga;
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      auto p1 = opt::benchmark_by_name(fn, 20);
      hybrid.push_back(opt::hybrid_run(opt::HybridConfig{}, p1, 20000, seed).best_fitness);
      auto p2 = opt::benchmark_by_name(fn, 20);
      ga.push_back(opt::ga_run(opt::GAConfig{}, p2, 20000, seed).best_fitness);
    }
    const double mh = analysis::median(hybrid), mg = analysis::median(ga);
    const auto t = analysis::wilcoxon_rank_sum(hybrid, ga);
    const bool ok = mh <= mg && t.p_value < 0.05;
    v.require(ok, std::string(fn) + " medians " + fmt(mh) + " vs " + fmt(mg) + ", p " + fmt(t.p_value));
    if (ok) v.note(std::string(fn) + " p " + fmt(t.p_value));
  }
  v.require(seconds_since(t0) < 300.0, "slower than 5 min");
  report(9, "optimizer comparison", v, t0);
}

void campaign() {
  const auto t0 = Clock::now();
  Verdict v;
  RunConfig cfg = load_run_config(ft::source_dir() / "configs" / "madrid_s1.json");
  const auto camp = run_campaign(cfg);
  std::size_t clean = 0, rising = 0;
  for (const auto& run : camp.runs) {
    const auto& best = run.top.front();
    clean += best.p_solar == 0 && best.p_window_u == 0 && best.p_k == 0 && best.p_min_glazing == 0;
    for (std::size_t i = 1; i < run.record.trace.size(); ++i)
      if (run.record.trace[i].best > run.record.trace[i - 1].best) {
        ++rising;
        break;
      }
  }
  const double agreement = analysis::modal_agreement(analysis::robustness_export(camp), 8);
  v.require(clean >= 13, std::to_string(clean) + "/15 penalty-free");
  v.require(rising == 0, std::to_string(rising) + " traces increase");
  v.require(agreement >= 0.5, "modal agreement " + fmt(agreement));
  if (v.pass) v.note("agreement " + fmt(agreement));
  v.note(std::to_string(clean) + "/15 penalty-free, " + std::to_string(rising) + " rising traces");
  v.require(seconds_since(t0) < 600.0, "slower than 10 min");
  report(10, "fenestration campaign", v, t0);
}

void wilcoxon_oracle() {
  const auto t0 = Clock::now();
  Verdict v;
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> level(0, 9);
  std::size_t cases = 0, mismatches = 0;
  for (std::size_t n = 1; n <= 7; ++n)
    for (std::size_t m = 1; m <= 7; ++m)
      for (int rep = 0; rep < 6; ++rep) {
        std::vector<double> a(n), b(m);
        for (auto& x : a) x = level(rng);
        for (auto& x : b) x = level(rng);
        if (std::all_of(a.begin(), a.end(), [&](double x) { return x == a[0]; }) &&
            std::all_of(b.begin(), b.end(), [&](double x) { return x == a[0]; }))
          continue;
        const double got = analysis::wilcoxon_rank_sum(a, b, analysis::TestMethod::Exact, 1).p_value;
        mismatches += std::abs(got - ft::exhaustive_rank_sum_p(a, b)) > 1e-12;
        ++cases;
      }
  std::size_t separated_bad = 0;
  for (std::size_t n = 1; n <= 7; ++n)
    for (std::size_t m = 1; m <= 7; ++m) {
      std::vector<double> a(n), b(m);
      for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<double>(i);
      for (std::size_t i = 0; i < m; ++i) b[i] = 100.0 + static_cast<double>(i);
      const double want = std::min(1.0, 2.0 / ft::binomial(static_cast<int>(n + m), static_cast<int>(n)));
      separated_bad += std::abs(analysis::wilcoxon_rank_sum(a, b, analysis::TestMethod::Exact, 1).p_value - want) > 1e-12;
    }
  v.require(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(cases) + " p-values differ");
  v.require(separated_bad == 0, std::to_string(separated_bad) + " separated-sample p-values differ");
  v.note(std::to_string(cases) + " random cases");
  report(11, "Wilcoxon oracle", v, t0);
}

void epw_round_trip() {
  const auto t0 = Clock::now();
  Verdict v;
  for (const char* city : {"leon", "madrid", "sevilla"}) {
    const auto w = parse_epw(ft::weather_path(city));
    v.require(w.hours.size() == 8760, std::string(city) + " has " + std::to_string(w.hours.size()) + " records");
  }
  // Mutate one copy: a missing DNI sentinel and a missing temperature.
  std::ifstream in(ft::weather_path("madrid"));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  auto set_field = [&](std::size_t row, std::size_t field, const std::string& value) {
    auto& line = lines.at(8 + row);
    std::size_t start = 0;
    for (std::size_t i = 1; i < field; ++i) start = line.find(',', start) + 1;
    const std::size_t end = line.find(',', start);
    line.replace(start, end - start, value);
  };
  set_field(4000, 15, "9999");  // direct normal
  set_field(1234, 7, "99.9");   // dry bulb
  std::ostringstream text;
  for (const auto& l : lines) text << l << '\n';
  std::istringstream mutated(text.str());
  const auto clean = parse_epw(ft::weather_path("madrid"));
  const auto w = parse_epw(mutated, "mutated");
  v.require(w.hours.size() == 8760, "mutated file record count");
  if (w.hours.size() == 8760) {
    v.require(w.hours[4000].dni == 0.0, "DNI sentinel gave " + fmt(w.hours[4000].dni));
    const double mid = (clean.hours[1233].dry_bulb_c + clean.hours[1235].dry_bulb_c) / 2;
    v.require(std::abs(w.hours[1234].dry_bulb_c - mid) < 1e-9, "temperature sentinel gave " + fmt(w.hours[1234].dry_bulb_c));
  }
  report(12, "EPW round-trip", v, t0);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<void (*)()> criteria{weights,       penalty_boundaries,   normalization,   zone_ordering,
                                         rule_engine,   window_physics,       conservation,    canonicalization,
                                         optimizer_comparison, campaign,      wilcoxon_oracle, epw_round_trip};
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [criterion number ...]\n";
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(n));
  }
  if (selected.empty())
    for (std::size_t n = 1; n <= criteria.size(); ++n) selected.push_back(n);
  for (std::size_t n : selected) {
    try {
      criteria[n - 1]();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL criterion " << n << ": aborted: " << e.what() << std::endl;
    }
  }
  std::cout << failures << " of " << selected.size() << " criteria failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
