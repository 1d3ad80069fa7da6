#pragma once
// Bound-constrained limited-memory quasi-Newton descent with finite-difference
// gradients and a coordinate-probe fallback for flat regions.

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "fenestra/optimize/problem.hpp"

namespace fenestra::opt {

struct LocalSearchConfig {
  double eps = 1e-8;
  std::size_t max_evals = 100;
  std::size_t memory = 10;
  double probe_fraction = 0.05;
  double armijo = 1e-4;
  int max_backtracks = 20;
};

inline void to_json(json& j, const LocalSearchConfig& c) {
  j = json{{"eps", c.eps}, {"max_evals", c.max_evals}, {"memory", c.memory}, {"probe_fraction", c.probe_fraction}};
}
inline void from_json(const json& j, LocalSearchConfig& c) {
  c.eps = j.value("eps", c.eps);
  c.max_evals = j.value("max_evals", c.max_evals);
  c.memory = j.value("memory", c.memory);
  c.probe_fraction = j.value("probe_fraction", c.probe_fraction);
}

struct LocalSearchResult {
  Vec x;
  double f = 0;
  std::size_t calls = 0;
};

namespace detail {

/// Raised by the oracle instead of exceeding either limit.
struct LsStop {};

/// Counts calls against a per-search limit and the global evaluator.
template <class E>
struct LsOracle {
  E& ev;
  std::size_t limit;
  std::size_t calls = 0;
  Vec best_x;
  double best_f;

  bool done() const { return calls >= limit || ev.exhausted(); }
  double operator()(const Vec& x) {
    if (done()) throw LsStop{};
    ++calls;
    const double f = ev.evaluate(x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
    return f;
  }
};

inline double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

}  // namespace detail

/// Two-sided finite differences with step eps*max(1,|x_i|); one-sided at bounds.
template <class F>
Vec fd_gradient(F&& f, const Vec& x, const Vec& lo, const Vec& hi, double eps, double fx) {
  Vec g(x.size(), 0.0);
  Vec y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = eps * std::max(1.0, std::abs(x[i]));
    const double up = std::min(hi[i], x[i] + h);
    const double dn = std::max(lo[i], x[i] - h);
    if (up == dn) continue;
    double fu = fx, fd = fx;
    if (up != x[i]) {
      y[i] = up;
      fu = f(y);
    }
    if (dn != x[i]) {
      y[i] = dn;
      fd = f(y);
    }
    y[i] = x[i];
    g[i] = (fu - fd) / (up - dn);
  }
  return g;
}

template <class E>
LocalSearchResult local_search(E& ev, const Vec& x0, double f0, const LocalSearchConfig& cfg = {}) {
  const auto& lo = ev.lower();
  const auto& hi = ev.upper();
  const std::size_t d = x0.size();
  detail::LsOracle<E> f{ev, cfg.max_evals, 0, x0, f0};
  Vec x = x0;
  double fx = f0;
  std::deque<std::pair<Vec, Vec>> hist;  // (s, y)

  auto project = [&](Vec v) {
    clamp_to(v, lo, hi);
    return v;
  };

  try {
    Vec g = fd_gradient(f, x, lo, hi, cfg.eps, fx);
    while (!f.done()) {
      // Components pushing against an active bound are frozen.
      Vec pg = g;
      for (std::size_t i = 0; i < d; ++i)
        if ((x[i] <= lo[i] && g[i] > 0) || (x[i] >= hi[i] && g[i] < 0)) pg[i] = 0;
      const double gnorm = std::sqrt(detail::dot(pg, pg));

      if (gnorm == 0.0) {
        // Flat cell: probe each coordinate by a fixed fraction of its range.
        bool moved = false;
        for (std::size_t i = 0; i < d && !f.done(); ++i) {
          const double step = cfg.probe_fraction * (hi[i] - lo[i]);
          for (double sgn : {1.0, -1.0}) {
            if (f.done()) break;
            Vec y = x;
            y[i] = std::clamp(x[i] + sgn * step, lo[i], hi[i]);
            if (y[i] == x[i]) continue;
            const double fy = f(y);
            if (fy < fx) {
              x = std::move(y);
              fx = fy;
              moved = true;
              break;
            }
          }
        }
        hist.clear();
        if (!moved || f.done()) break;
        g = fd_gradient(f, x, lo, hi, cfg.eps, fx);
        continue;
      }

      // Two-loop recursion.
      Vec q = pg;
      std::vector<double> alpha(hist.size());
      for (std::size_t k = hist.size(); k-- > 0;) {
        const auto& [s, y] = hist[k];
        alpha[k] = detail::dot(s, q) / detail::dot(y, s);
        for (std::size_t i = 0; i < d; ++i) q[i] -= alpha[k] * y[i];
      }
      double gamma = 1.0 / std::max(1.0, gnorm);
      if (!hist.empty()) {
        const auto& [s, y] = hist.back();
        gamma = detail::dot(s, y) / detail::dot(y, y);
      }
      for (auto& v : q) v *= gamma;
      for (std::size_t k = 0; k < hist.size(); ++k) {
        const auto& [s, y] = hist[k];
        const double beta = detail::dot(y, q) / detail::dot(y, s);
        for (std::size_t i = 0; i < d; ++i) q[i] += s[i] * (alpha[k] - beta);
      }
      Vec dir(d);
      for (std::size_t i = 0; i < d; ++i) dir[i] = -q[i];
      if (detail::dot(dir, pg) >= 0) {  // not a descent direction: fall back to steepest descent
        hist.clear();
        for (std::size_t i = 0; i < d; ++i) dir[i] = -pg[i] / std::max(1.0, gnorm);
      }

      double step = 1.0;
      bool accepted = false;
      Vec xn;
      double fn = fx;
      for (int bt = 0; bt < cfg.max_backtracks && !f.done(); ++bt, step *= 0.5) {
        Vec trial(d);
        for (std::size_t i = 0; i < d; ++i) trial[i] = x[i] + step * dir[i];
        xn = project(std::move(trial));
        Vec s(d);
        for (std::size_t i = 0; i < d; ++i) s[i] = xn[i] - x[i];
        if (detail::dot(s, s) == 0) break;
        fn = f(xn);
        if (fn <= fx + cfg.armijo * detail::dot(g, s)) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;

      Vec s(d), y;
      for (std::size_t i = 0; i < d; ++i) s[i] = xn[i] - x[i];
      x = std::move(xn);
      const double f_prev = fx;
      fx = fn;
      if (f.done()) break;
      Vec gn = fd_gradient(f, x, lo, hi, cfg.eps, fx);
      y.resize(d);
      for (std::size_t i = 0; i < d; ++i) y[i] = gn[i] - g[i];
      if (detail::dot(s, y) > 1e-12) {
        hist.emplace_back(std::move(s), std::move(y));
        if (hist.size() > cfg.memory) hist.pop_front();
      }
      g = std::move(gn);
      if (std::abs(f_prev - fx) <= 1e-15 * std::max(1.0, std::abs(fx))) break;
    }
  } catch (const detail::LsStop&) {
    // A limit was reached mid-step; the best point seen so far stands.
  }
  return {f.best_x, f.best_f, f.calls};
}

}  // namespace fenestra::opt
