#pragma once
// Campaign configuration files. Relative paths resolve against the directory
// holding the config file.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenestra/encoding.hpp"
#include "fenestra/error.hpp"
#include "fenestra/external.hpp"
#include "fenestra/fitness.hpp"
#include "fenestra/io/files.hpp"
#include "fenestra/optimize/problem.hpp"
#include "fenestra/thermal.hpp"

namespace fenestra {

namespace fs = std::filesystem;

enum class Algorithm { Hybrid, Shade, DE, GA };
NLOHMANN_JSON_SERIALIZE_ENUM(Algorithm, {{Algorithm::Hybrid, "hybrid"},
                                         {Algorithm::Shade, "shade"},
                                         {Algorithm::DE, "de"},
                                         {Algorithm::GA, "ga"}})

enum class EvaluatorKind { Builtin, External };

struct RunConfig {
  Location location = Location::Madrid;
  FitnessConfig fitness = location_preset(Location::Madrid);
  Scenario scenario = Scenario::S1;
  fs::path weather;
  fs::path building;
  fs::path catalog;
  std::optional<fs::path> schedule;
  Algorithm algorithm = Algorithm::Hybrid;
  nlohmann::json algorithm_config = nlohmann::json::object();
  std::size_t runs = 15;
  std::vector<std::uint64_t> seeds;  // one per run
  std::size_t budget = 2000;
  opt::BudgetMode budget_mode = opt::BudgetMode::CacheMisses;
  std::size_t top_k = 10;
  fs::path output_dir = "out";
  EvaluatorKind evaluator = EvaluatorKind::Builtin;
  ExternalConfig external;
  SimulationOptions simulation;
  std::size_t threads = 1;  // concurrent evaluations within a run
};

namespace detail {

template <class E>
E parse_enum(const nlohmann::json& j, const char* field, std::initializer_list<const char*> allowed) {
  const auto s = j.get<std::string>();
  for (const char* a : allowed)
    if (s == a) return nlohmann::json(s).get<E>();
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError(std::string("config field '") + field + "': unknown value '" + s + "' (expected " + list + ")");
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace detail

/// Seeds base, base+1, ... unless an explicit list is given.
inline std::vector<std::uint64_t> make_seeds(std::size_t runs, std::uint64_t base) {
  std::vector<std::uint64_t> s(runs);
  for (std::size_t i = 0; i < runs; ++i) s[i] = base + i;
  return s;
}

inline RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base_dir) {
  RunConfig c;
  try {
    c.location = detail::parse_enum<Location>(j.at("location"), "location", {"Leon", "Madrid", "Sevilla"});
    nlohmann::json fj = j.value("fitness", nlohmann::json::object());
    fj["location"] = c.location;
    c.fitness = fj.get<FitnessConfig>();
    if (j.contains("scenario")) c.scenario = detail::parse_enum<Scenario>(j["scenario"], "scenario", {"S1", "S2"});
    c.weather = detail::resolve(base_dir, j.at("weather").get<std::string>());
    c.building = detail::resolve(base_dir, j.at("building").get<std::string>());
    c.catalog = detail::resolve(base_dir, j.at("catalog").get<std::string>());
    if (j.contains("schedule")) c.schedule = detail::resolve(base_dir, j["schedule"].get<std::string>());
    if (j.contains("algorithm"))
      c.algorithm = detail::parse_enum<Algorithm>(j["algorithm"], "algorithm", {"hybrid", "shade", "de", "ga"});
    c.algorithm_config = j.value("algorithm_config", nlohmann::json::object());
    c.runs = j.value("runs", c.runs);
    c.budget = j.value("budget", c.budget);
    if (j.contains("budget_mode"))
      c.budget_mode = detail::parse_enum<opt::BudgetMode>(j["budget_mode"], "budget_mode", {"cache_misses", "all_calls"});
    c.top_k = j.value("top_k", c.top_k);
    c.output_dir = detail::resolve(base_dir, j.value("output_dir", std::string("out")));
    c.threads = j.value("threads", c.threads);
    if (j.contains("simulation")) j["simulation"].get_to(c.simulation);
    if (j.contains("seeds")) {
      c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
      if (!j.contains("runs")) c.runs = c.seeds.size();
    } else {
      c.seeds = make_seeds(c.runs, j.value("base_seed", std::uint64_t{1}));
    }
    if (j.contains("evaluator")) {
      const auto& e = j["evaluator"];
      const auto type = e.at("type").get<std::string>();
      if (type == "builtin") {
        c.evaluator = EvaluatorKind::Builtin;
      } else if (type == "external") {
        c.evaluator = EvaluatorKind::External;
        c.external.command = e.at("command").get<std::string>();
        c.external.timeout_s = e.value("timeout_s", c.external.timeout_s);
      } else {
        throw ConfigError("config field 'evaluator.type': unknown value '" + type + "' (expected builtin, external)");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

/// Checks cross-field constraints and that referenced files exist.
inline void validate(const RunConfig& c) {
  if (c.runs == 0) throw ConfigError("runs must be positive");
  if (c.budget == 0) throw ConfigError("budget must be positive");
  if (c.seeds.size() != c.runs)
    throw ConfigError("seeds list has " + std::to_string(c.seeds.size()) + " entries for " + std::to_string(c.runs) + " runs");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size())
    throw ConfigError("seeds must be unique per run");
  std::vector<fs::path> files{c.weather, c.building, c.catalog};
  if (c.schedule) files.push_back(*c.schedule);
  for (const auto& f : files)
    if (!fs::is_regular_file(f)) throw ConfigError("file not found: " + f.string());
  if (c.evaluator == EvaluatorKind::External && c.external.command.empty())
    throw ConfigError("external evaluator needs a command");
  try {
    validate(c.fitness);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("fitness: ") + e.what());
  }
}

inline RunConfig load_run_config(const fs::path& path) {
  nlohmann::json j;
  try {
    j = io::read_json(path);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(j, path.parent_path());
}

inline nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j{{"location", c.location},
                   {"fitness", c.fitness},
                   {"scenario", c.scenario},
                   {"weather", c.weather.string()},
                   {"building", c.building.string()},
                   {"catalog", c.catalog.string()},
                   {"algorithm", c.algorithm},
                   {"algorithm_config", c.algorithm_config},
                   {"runs", c.runs},
                   {"seeds", c.seeds},
                   {"budget", c.budget},
                   {"budget_mode", c.budget_mode},
                   {"top_k", c.top_k},
                   {"output_dir", c.output_dir.string()},
                   {"threads", c.threads},
                   {"simulation", c.simulation}};
  if (c.schedule) j["schedule"] = c.schedule->string();
  if (c.evaluator == EvaluatorKind::External)
    j["evaluator"] = {{"type", "external"}, {"command", c.external.command}, {"timeout_s", c.external.timeout_s}};
  else
    j["evaluator"] = {{"type", "builtin"}};
  return j;
}

}  // namespace fenestra
