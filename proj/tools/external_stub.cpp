// Minimal external evaluator used to exercise the child-process protocol.
//
//   external_stub [mode]
//
// Modes: ok (default) answers with metrics derived from the request,
// negative reports a negative edh, garbage prints non-JSON, silent exits
// without answering, sleep never answers.

#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include <json.hpp>

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "ok";
  std::string line;
  if (!std::getline(std::cin, line)) return 1;
  if (mode == "silent") return 0;
  if (mode == "sleep") {
    std::this_thread::sleep_for(std::chrono::hours(1));
    return 0;
  }
  if (mode == "garbage") {
    std::cout << "not json at all\n";
    return 0;
  }
  const auto req = nlohmann::json::parse(line);
  double area = 0;
  double u = 0;
  for (const auto& w : req.at("design").at("windows")) {
    area += w.at("area_m2").get<double>();
    u += w.at("u_w").get<double>() * w.at("area_m2").get<double>();
  }
  nlohmann::json out{{"edh", 20.0 + u / 10.0},
                     {"edc", 5.0 + area / 4.0},
                     {"nct", 400.0 + 10.0 * area},
                     {"q_sol_jul", area / 10.0}};
  if (mode == "negative") out["edh"] = -1.0;
  std::cout << out.dump() << "\n" << std::flush;
  return 0;
}
