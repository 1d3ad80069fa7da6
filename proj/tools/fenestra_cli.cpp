// Command-line front end: run, compare, inspect, catalog, bench.
//
// Exit codes: 0 success, 1 usage error, 2 configuration or input error,
// 3 evaluator failure.

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fenestra/fenestra.hpp"

namespace fs = std::filesystem;
using namespace fenestra;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitEvaluator = 3;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  std::string config;
  std::size_t runs = 0;
  std::size_t budget = 0;
  std::size_t parallel = 1;
  std::string output;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_run(const RunArgs& a) {
  RunConfig c = load_run_config(a.config);
  if (a.seed_set) c.seeds = make_seeds(c.runs, a.seed);
  if (a.runs) {
    const std::uint64_t base = c.seeds.empty() ? 1 : c.seeds.front();
    c.runs = a.runs;
    c.seeds = make_seeds(c.runs, a.seed_set ? a.seed : base);
  }
  if (a.budget) c.budget = a.budget;
  if (!a.output.empty()) c.output_dir = a.output;
  validate(c);

  std::cerr << "running " << c.runs << " x " << c.budget << " evaluations ("
            << json(c.algorithm).get<std::string>() << ", " << json(c.location).get<std::string>() << " "
            << json(c.scenario).get<std::string>() << ")\n";
  auto camp = run_campaign(c, a.parallel, [](std::size_t i, const opt::RunRecord& r) {
    std::cerr << "  run " << i + 1 << ": best " << fmt("%.4f", r.best_fitness) << " after " << r.evaluations
              << " simulations (" << r.cache_hits << " cache hits, " << r.restarts << " restarts)\n";
  });
  const BuildingModel b = load_building(c.building);
  const std::string best = write_campaign(camp, c, b);
  std::size_t compliant = 0;
  for (const auto& r : camp.runs) compliant += !r.top.empty() && r.top.front().compliant();
  std::cout << "wrote " << c.output_dir.string() << "\n"
            << "penalty-free runs: " << compliant << "/" << camp.runs.size() << "\n"
            << "selected solution: " << best << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct RecordSet {
  std::string label;
  std::size_t budget = 0;
  std::vector<double> finals;
};

RecordSet load_records(const fs::path& dir) {
  const json manifest = io::read_json(dir / "manifest.json");
  RecordSet s;
  s.label = manifest.value("label", dir.filename().string());
  s.budget = manifest.at("budget").get<std::size_t>();
  for (const auto& f : manifest.at("run_files")) {
    const auto rec = opt::run_record_from_json(io::read_json(dir / f.get<std::string>()));
    if (rec.budget != s.budget) throw MismatchedBudgets(dir.string() + ": run budgets differ from the manifest");
    s.finals.push_back(rec.best_fitness);
  }
  return s;
}

struct CompareArgs {
  std::vector<std::string> dirs;
  double alpha = 0.01;
  std::string test = "rank_sum";
  std::string format = "text";
};

int cmd_compare(const CompareArgs& a) {
  if (a.dirs.size() % 2 != 0) throw ConfigError("compare takes pairs of record directories (A1 B1 [A2 B2 ...])");
  std::vector<analysis::TestResult> tests;
  std::vector<std::pair<RecordSet, RecordSet>> pairs;
  for (std::size_t i = 0; i < a.dirs.size(); i += 2) {
    auto x = load_records(a.dirs[i]);
    auto y = load_records(a.dirs[i + 1]);
    if (x.budget != y.budget)
      throw MismatchedBudgets("budgets differ: " + std::to_string(x.budget) + " vs " + std::to_string(y.budget));
    analysis::TestResult t;
    try {
      t = a.test == "signed_rank" ? analysis::wilcoxon_signed_rank(x.finals, y.finals)
                                  : analysis::wilcoxon_rank_sum(x.finals, y.finals);
    } catch (const DegenerateSamples&) {
      t = {a.test, "degenerate", 0, 1.0, x.finals.size(), y.finals.size()};
    }
    tests.push_back(t);
    pairs.emplace_back(std::move(x), std::move(y));
  }
  std::vector<double> ps;
  for (const auto& t : tests) ps.push_back(t.p_value);
  const auto flags = analysis::bonferroni(ps, a.alpha);
  const double threshold = a.alpha / static_cast<double>(ps.size());

  io::CsvWriter csv({"a", "b", "test", "method", "p_value", "threshold", "significant", "median_a", "q25_a", "q75_a",
                     "median_b", "q25_b", "q75_b"});
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    csv.add({x.label, y.label, tests[i].test, tests[i].method, io::format_number(tests[i].p_value),
             io::format_number(threshold), flags[i] ? "true" : "false",
             io::format_number(analysis::quantile(x.finals, 0.5)), io::format_number(analysis::quantile(x.finals, 0.25)),
             io::format_number(analysis::quantile(x.finals, 0.75)), io::format_number(analysis::quantile(y.finals, 0.5)),
             io::format_number(analysis::quantile(y.finals, 0.25)), io::format_number(analysis::quantile(y.finals, 0.75))});
  }
  if (a.format == "csv") {
    std::cout << csv.str();
    return 0;
  }
  std::cout << "Bonferroni threshold: alpha " << a.alpha << " / " << ps.size() << " = " << fmt("%.5g", threshold) << "\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    std::cout << x.label << " vs " << y.label << ": median " << fmt("%.6g", analysis::quantile(x.finals, 0.5)) << " vs "
              << fmt("%.6g", analysis::quantile(y.finals, 0.5)) << ", " << tests[i].test << " (" << tests[i].method
              << ") p = " << fmt("%.4g", tests[i].p_value) << (flags[i] ? "  significant" : "  not significant") << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// inspect

int cmd_inspect(const std::string& path) {
  const json doc = io::read_json(path);
  try {
    const auto& d = doc.at("design");
    const auto fb = breakdown_from_json(doc.at("breakdown"));
    const auto& r = fb.result;
    std::cout << "Solution " << doc.value("id", std::string("?")) << " (" << doc.value("location", std::string("?"))
              << ", genome " << d.value("hash", std::string("?")) << ")\n\n";
    std::cout << "Building level\n";
    std::printf("  %-22s %-14s %10.1f\n", "ED_Heating", "kWh/m2.year", r.edh);
    std::printf("  %-22s %-14s %10.1f\n", "ED_Cooling", "kWh/m2.year", r.edc);
    std::printf("  %-22s %-14s %10.1f\n", "ED_Heating+Cooling", "kWh/m2.year", r.edh + r.edc);
    std::printf("  %-22s %-14s %10.0f\n", "NCT", "h", r.nct);
    std::printf("  %-22s %-14s %10.0f\n", "WWR", "%", 100.0 * fb.metrics.wwr);
    std::printf("  %-22s %-14s %10.2f\n", "K", "W/m2.K", fb.metrics.k);
    std::printf("  %-22s %-14s %10.2f\n", "Q_sol,Jul", "kWh/m2", r.q_sol_jul);
    std::printf("  %-22s %-14s %10.2f\n", "Solar reflectance", "-", d.at("reflectance").get<double>());
    std::printf("  %-22s %-14s %10.4f\n", "Fitness", "-", fb.total);
    std::cout << "\nComponent level\n";
    const auto frame = d.at("frame").at("id").get<std::string>();
    std::map<std::string, std::string> sc;
    for (const auto& f : d.at("facades")) sc[f.at("name").get<std::string>()] = f.at("shading_control").get<std::string>();
    int n = 0;
    for (const auto& w : d.at("windows")) {
      ++n;
      const auto facade = w.at("facade").get<std::string>();
      std::cout << "  " << facade << " facade, " << w.at("room").get<std::string>() << ", Window" << n << "\n";
      std::printf("    %-20s %-8s %s\n", "Width", "m", fmt("%.1f", w.at("width_m").get<double>()).c_str());
      std::printf("    %-20s %-8s %s\n", "Height", "m", fmt("%.1f", w.at("height_m").get<double>()).c_str());
      std::printf("    %-20s %-8s %s\n", ("Window" + std::to_string(n) + "_Area").c_str(), "m2",
                  fmt("%.2f", w.at("area_m2").get<double>()).c_str());
      std::printf("    %-20s %-8s %s\n", "Glazing Composition", "", w.at("glazing").get<std::string>().c_str());
      std::printf("    %-20s %-8s %s\n", "Window U-value", "W/m2.K", fmt("%.2f", w.at("u_w").get<double>()).c_str());
      std::printf("    %-20s %-8s %s\n", "Frame Material", "", frame.c_str());
      std::printf("    %-20s %-8s %s\n", "Shading Control", "", sc[facade].c_str());
    }
    std::cout << "\nFixed shading\n";
    for (const auto& f : d.at("facades")) {
      const auto& s = f.at("shading");
      std::cout << "  " << f.at("name").get<std::string>() << ": overhang "
                << fmt("%.2f", s.at("overhang_depth_m").get<double>()) << " m, fins "
                << fmt("%.2f", s.at("fin_left_depth_m").get<double>()) << "/"
                << fmt("%.2f", s.at("fin_right_depth_m").get<double>()) << " m\n";
    }
    std::cout << "\nPenalties: solar " << fmt("%.4g", fb.penalties.solar) << ", window U "
              << fmt("%.4g", fb.penalties.window_u) << ", K " << fmt("%.4g", fb.penalties.k) << ", min glazing "
              << fmt("%.4g", fb.penalties.min_glazing) << "\n";
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// catalog

struct CatalogArgs {
  std::string catalog;
  std::string orientation;
  std::string format = "text";
};

int cmd_catalog(const CatalogArgs& a) {
  const Catalog cat = load_catalog(a.catalog);
  std::vector<Orientation> orients;
  if (a.orientation.empty()) {
    orients = {Orientation::N, Orientation::E, Orientation::W, Orientation::S, Orientation::SE, Orientation::SW};
  } else {
    const json o = a.orientation;
    const auto parsed = o.get<Orientation>();
    if (to_string(parsed) != a.orientation) throw ConfigError("unknown orientation '" + a.orientation + "' (N, E, W, S, SE, SW)");
    orients = {parsed};
  }
  io::CsvWriter csv({"orientation", "code", "u_g", "shgc", "vt"});
  std::ostringstream text;
  for (auto o : orients) {
    const auto comps = enumerate_compositions(cat, o);
    if (orients.size() == 1 || a.format == "csv") {
      for (const auto& c : comps) {
        csv.add({to_string(o), c.code, io::format_number(c.u_g), io::format_number(c.shgc), io::format_number(c.vt)});
        text << "  " << c.code << "  U " << fmt("%.3f", c.u_g) << "  SHGC " << fmt("%.3f", c.shgc) << "  VT "
             << fmt("%.3f", c.vt) << "\n";
      }
    }
    text << to_string(o) << ": " << comps.size() << " compositions\n";
  }
  std::cout << (a.format == "csv" ? csv.str() : text.str());
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string function = "sphere";
  std::size_t dim = 20;
  std::size_t budget = 20000;
  std::size_t runs = 15;
  std::string algorithm = "hybrid";
  std::uint64_t seed = 1;
  std::string output;
  std::size_t parallel = 1;
};

int cmd_bench(const BenchArgs& a) {
  const auto algo = json(a.algorithm).get<Algorithm>();
  if (json(algo).get<std::string>() != a.algorithm) throw ConfigError("unknown algorithm '" + a.algorithm + "'");
  std::vector<opt::RunRecord> records(a.runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < a.runs;) {
      auto problem = opt::benchmark_by_name(a.function, a.dim);
      records[i] = run_algorithm(algo, json::object(), problem, a.budget, a.seed + i, opt::BudgetMode::AllCalls);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(std::max<std::size_t>(a.parallel, 1), a.runs); ++t) pool.emplace_back(worker);
    worker();
  }
  std::vector<double> finals;
  for (const auto& r : records) finals.push_back(r.best_fitness);
  const auto v = analysis::variability(finals);
  std::cout << a.algorithm << " on " << a.function << " d=" << a.dim << ", " << a.runs << " runs x " << a.budget
            << ": median " << fmt("%.6g", v.median) << " [q25 " << fmt("%.6g", v.q25) << ", q75 " << fmt("%.6g", v.q75)
            << "]\n";
  if (!a.output.empty()) {
    const fs::path dir = a.output;
    json files = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "runs/run_%02zu.json", i + 1);
      io::write_json(dir / name, opt::to_json_value(records[i]));
      files.push_back(name);
    }
    io::write_atomic(dir / "convergence.csv", analysis::convergence_csv(analysis::convergence_export(records)));
    io::write_json(dir / "manifest.json", {{"label", a.algorithm + ":" + a.function},
                                           {"function", a.function},
                                           {"dimension", a.dim},
                                           {"algorithm", a.algorithm},
                                           {"budget", a.budget},
                                           {"runs", a.runs},
                                           {"run_files", files}});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fenestration design optimization toolkit"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an optimization campaign from a config file");
  run_cmd->add_option("-c,--config", run.config, "Campaign config (JSON)")->required();
  run_cmd->add_option("--runs", run.runs, "Override the number of runs");
  run_cmd->add_option("--budget", run.budget, "Override the simulations per run");
  run_cmd->add_option("--parallel", run.parallel, "Runs executed concurrently")->check(CLI::PositiveNumber);
  run_cmd->add_option("-o,--output", run.output, "Override the output directory");
  auto* seed_opt = run_cmd->add_option("--seed", run.seed, "Base seed (runs use seed, seed+1, ...)");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare campaigns or benchmark record directories pairwise");
  cmp_cmd->add_option("dirs", cmp.dirs, "Record directories: A1 B1 [A2 B2 ...]")->required();
  cmp_cmd->add_option("--alpha", cmp.alpha, "Family-wise significance level");
  cmp_cmd->add_option("--test", cmp.test, "rank_sum or signed_rank")->check(CLI::IsMember({"rank_sum", "signed_rank"}));
  cmp_cmd->add_option("--format", cmp.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  std::string inspect_path;
  auto* ins_cmd = app.add_subcommand("inspect", "Print a report for a solution file");
  ins_cmd->add_option("solution", inspect_path, "Solution JSON (e.g. best_solution.json)")->required();

  CatalogArgs cat;
  auto* cat_cmd = app.add_subcommand("catalog", "List legal glazing compositions");
  cat_cmd->add_option("--catalog", cat.catalog, "Catalog JSON")->required();
  cat_cmd->add_option("--orientation", cat.orientation, "N, E, W, S, SE or SW (default: counts for all)");
  cat_cmd->add_option("--format", cat.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an optimizer on an analytic benchmark function");
  bench_cmd->add_option("--function", bench.function, "sphere or rastrigin");
  bench_cmd->add_option("--dim", bench.dim, "Dimension");
  bench_cmd->add_option("--budget", bench.budget, "Evaluations per run");
  bench_cmd->add_option("--runs", bench.runs, "Independent runs");
  bench_cmd->add_option("--algorithm", bench.algorithm, "hybrid, shade, de or ga");
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("-o,--output", bench.output, "Write run records here");
  bench_cmd->add_option("--parallel", bench.parallel, "Runs executed concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? 0 : kExitUsage;
  }
  run.seed_set = seed_opt->count() > 0;

  try {
    if (*run_cmd) return cmd_run(run);
    if (*cmp_cmd) return cmd_compare(cmp);
    if (*ins_cmd) return cmd_inspect(inspect_path);
    if (*cat_cmd) return cmd_catalog(cat);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const EvaluationError& e) {
    std::cerr << "evaluator failure: " << e.what() << "\n";
    return kExitEvaluator;
  } catch (const SpawnError& e) {
    std::cerr << "evaluator failure: " << e.what() << "\n";
    return kExitEvaluator;
  } catch (const ProtocolError& e) {
    std::cerr << "evaluator failure: " << e.what() << "\n";
    return kExitEvaluator;
  } catch (const TimeoutError& e) {
    std::cerr << "evaluator failure: " << e.what() << "\n";
    return kExitEvaluator;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitUsage;
}
