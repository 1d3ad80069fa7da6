#pragma once
// Descriptive statistics and rank tests for comparing optimizer campaigns.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fenestra/error.hpp"

namespace fenestra::analysis {

/// Linear interpolation between order statistics, position (n-1)q.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw TooFewRows("quantile of an empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, q);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

/// Population standard deviation (divides by N).
inline double population_sigma(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

struct Variability {
  std::size_t n = 0;
  double mean = 0;
  double sigma = 0;  // population
  double min = 0;
  double q25 = 0;
  double median = 0;
  double q75 = 0;
  double max = 0;
};

inline Variability variability(std::vector<double> v) {
  if (v.size() < 2) throw TooFewRows("variability needs at least 2 values, got " + std::to_string(v.size()));
  std::sort(v.begin(), v.end());
  Variability r;
  r.n = v.size();
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  r.sigma = population_sigma(v);
  r.min = v.front();
  r.max = v.back();
  r.q25 = quantile_sorted(v, 0.25);
  r.median = quantile_sorted(v, 0.5);
  r.q75 = quantile_sorted(v, 0.75);
  return r;
}

inline void to_json(nlohmann::json& j, const Variability& v) {
  j = nlohmann::json{{"n", v.n},           {"mean", v.mean}, {"sigma", v.sigma}, {"sigma_kind", "population"},
                     {"min", v.min},       {"q25", v.q25},   {"median", v.median}, {"q75", v.q75},
                     {"max", v.max}};
}

// ---------------------------------------------------------------------------
// Rank tests

/// Midranks (1-based) of `v`; tied values share the mean of their positions.
inline std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mr = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = mr;
    i = j + 1;
  }
  return r;
}

enum class TestMethod { Auto, Exact, Normal };

struct TestResult {
  std::string test;    // "rank_sum" or "signed_rank"
  std::string method;  // "exact" or "normal"
  double statistic = 0;
  double p_value = 1;
  std::size_t n = 0;
  std::size_t m = 0;
};

inline void to_json(nlohmann::json& j, const TestResult& t) {
  j = nlohmann::json{{"test", t.test}, {"method", t.method}, {"statistic", t.statistic},
                     {"p_value", t.p_value}, {"n", t.n},   {"m", t.m}};
}

namespace detail {

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// Two-sided p from the exact distribution `counts` over integer statistic values.
inline double two_sided_from_counts(const std::vector<double>& counts, long observed) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double le = 0, ge = 0;
  for (long s = 0; s < static_cast<long>(counts.size()); ++s) {
    if (s <= observed) le += counts[s];
    if (s >= observed) ge += counts[s];
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / total);
}

}  // namespace detail

/// Two-sided Wilcoxon rank-sum test of `a` against `b`. The exact null
/// distribution is built over doubled midranks, so it stays exact with ties.
inline TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                    TestMethod method = TestMethod::Auto, std::size_t min_size = 5) {
  if (a.size() < min_size || b.size() < min_size)
    throw TooFewRows("rank-sum test needs at least " + std::to_string(min_size) + " values per sample");
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  if (std::all_of(all.begin(), all.end(), [&](double x) { return x == all.front(); }))
    throw DegenerateSamples("all values are identical; the rank-sum test is undefined");

  const std::size_t n = a.size(), m = b.size(), big_n = n + m;
  const auto ranks = midranks(all);
  double w = 0;
  for (std::size_t i = 0; i < n; ++i) w += ranks[i];

  TestResult r{"rank_sum", "", w, 1.0, n, m};
  const bool exact = method == TestMethod::Exact || (method == TestMethod::Auto && n <= 12 && m <= 12);
  if (exact) {
    // counts[k][s]: subsets of size k with doubled-rank sum s.
    std::vector<long> r2(big_n);
    long total2 = 0;
    for (std::size_t i = 0; i < big_n; ++i) total2 += r2[i] = std::lround(2 * ranks[i]);
    std::vector<std::vector<double>> counts(n + 1, std::vector<double>(static_cast<std::size_t>(total2) + 1, 0.0));
    counts[0][0] = 1;
    for (std::size_t i = 0; i < big_n; ++i)
      for (std::size_t k = std::min(i + 1, n); k-- > 0;) {
        auto& dst = counts[k + 1];
        const auto& src = counts[k];
        for (long s = total2 - r2[i]; s >= 0; --s)
          if (src[s] != 0) dst[s + r2[i]] += src[s];
      }
    r.method = "exact";
    r.p_value = detail::two_sided_from_counts(counts[n], std::lround(2 * w));
    return r;
  }
  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double tie = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie += t * t * t - t;
    i = j;
  }
  const double nd = static_cast<double>(n), md = static_cast<double>(m), bd = static_cast<double>(big_n);
  const double mu = nd * (bd + 1) / 2.0;
  const double var = nd * md / 12.0 * ((bd + 1) - tie / (bd * (bd - 1)));
  const double z = std::max(0.0, std::abs(w - mu) - 0.5) / std::sqrt(var);
  r.method = "normal";
  r.p_value = std::min(1.0, 2.0 * detail::normal_sf(z));
  return r;
}

/// Two-sided Wilcoxon signed-rank test on paired differences a_i - b_i;
/// zero differences are dropped.
inline TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                       TestMethod method = TestMethod::Auto, std::size_t min_size = 5) {
  if (a.size() != b.size()) throw ValidationError("signed-rank test needs paired samples of equal length");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  if (d.empty()) throw DegenerateSamples("all paired differences are zero");
  if (d.size() < min_size) throw TooFewRows("signed-rank test needs at least " + std::to_string(min_size) + " nonzero pairs");
  std::vector<double> absd(d.size());
  std::transform(d.begin(), d.end(), absd.begin(), [](double x) { return std::abs(x); });
  const auto ranks = midranks(absd);
  double wplus = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0) wplus += ranks[i];

  const std::size_t n = d.size();
  TestResult r{"signed_rank", "", wplus, 1.0, n, n};
  const bool exact = method == TestMethod::Exact || (method == TestMethod::Auto && n <= 25);
  if (exact) {
    long total2 = 0;
    std::vector<long> r2(n);
    for (std::size_t i = 0; i < n; ++i) total2 += r2[i] = std::lround(2 * ranks[i]);
    std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
    counts[0] = 1;
    for (std::size_t i = 0; i < n; ++i)
      for (long s = total2 - r2[i]; s >= 0; --s)
        if (counts[s] != 0) counts[s + r2[i]] += counts[s];
    r.method = "exact";
    r.p_value = detail::two_sided_from_counts(counts, std::lround(2 * wplus));
    return r;
  }
  double tie = 0;
  std::vector<double> sorted = absd;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie += t * t * t - t;
    i = j;
  }
  const double nd = static_cast<double>(n);
  const double mu = nd * (nd + 1) / 4.0;
  const double var = nd * (nd + 1) * (2 * nd + 1) / 24.0 - tie / 48.0;
  const double z = std::max(0.0, std::abs(wplus - mu) - 0.5) / std::sqrt(var);
  r.method = "normal";
  r.p_value = std::min(1.0, 2.0 * detail::normal_sf(z));
  return r;
}

/// Significance flags under a Bonferroni correction: p < alpha / m.
inline std::vector<bool> bonferroni(std::span<const double> p_values, double alpha = 0.01) {
  if (p_values.empty()) throw ValidationError("bonferroni needs at least one p-value");
  const double threshold = alpha / static_cast<double>(p_values.size());
  std::vector<bool> out;
  for (double p : p_values) out.push_back(p < threshold);
  return out;
}

}  // namespace fenestra::analysis
