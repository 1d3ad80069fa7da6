#pragma once
// Analytic test functions for optimizer comparisons.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "fenestra/optimize/problem.hpp"

namespace fenestra::opt {

/// Box-bounded function of a real vector; every call counts as one evaluation.
class FunctionProblem {
 public:
  FunctionProblem(std::string name, Vec lo, Vec hi, std::function<double(std::span<const double>)> f)
      : name_(std::move(name)), lo_(std::move(lo)), hi_(std::move(hi)), f_(std::move(f)) {}

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return lo_.size(); }
  Vec lower() const { return lo_; }
  Vec upper() const { return hi_; }
  EvalOutcome evaluate(std::span<const double> x) { return {f_(x), true}; }

 private:
  std::string name_;
  Vec lo_, hi_;
  std::function<double(std::span<const double>)> f_;
};

inline Vec random_shift(std::size_t d, double radius, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  Vec s(d);
  for (auto& v : s) v = u(rng);
  return s;
}

inline FunctionProblem shifted_sphere(std::size_t d, std::uint64_t shift_seed = 7) {
  Vec shift = random_shift(d, 80.0, shift_seed);
  return FunctionProblem("sphere", Vec(d, -100.0), Vec(d, 100.0), [shift](std::span<const double> x) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - shift[i]) * (x[i] - shift[i]);
    return s;
  });
}

inline FunctionProblem shifted_rastrigin(std::size_t d, std::uint64_t shift_seed = 7) {
  Vec shift = random_shift(d, 4.0, shift_seed);
  return FunctionProblem("rastrigin", Vec(d, -5.12), Vec(d, 5.12), [shift](std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = x[i] - shift[i];
      s += z * z - 10.0 * std::cos(2 * std::numbers::pi * z);
    }
    return s;
  });
}

inline FunctionProblem benchmark_by_name(const std::string& name, std::size_t d, std::uint64_t shift_seed = 7) {
  if (name == "sphere") return shifted_sphere(d, shift_seed);
  if (name == "rastrigin") return shifted_rastrigin(d, shift_seed);
  throw ValidationError("unknown benchmark '" + name + "' (expected sphere or rastrigin)");
}

}  // namespace fenestra::opt
