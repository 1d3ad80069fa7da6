#pragma once
// Hourly typical-year weather from EPW files.

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fenestra/error.hpp"

namespace fenestra {

inline constexpr int kHoursPerYear = 8760;
inline constexpr std::array<int, 12> kDaysInMonth{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

struct WeatherHour {
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 1;   // 1..24, the hour ending at this clock time
  double dry_bulb_c = 0;
  double ghi = 0;  // W/m2
  double dni = 0;
  double dhi = 0;
};

struct Site {
  std::string name;
  double latitude_deg = 0;
  double longitude_deg = 0;
  double utc_offset_h = 0;
  double elevation_m = 0;
};

struct WeatherSeries {
  Site site;
  std::vector<WeatherHour> hours;

  std::size_t size() const { return hours.size(); }
};

inline int day_of_year(int month, int day) {
  int n = day;
  for (int m = 1; m < month; ++m) n += kDaysInMonth[m - 1];
  return n;
}

namespace epw {

inline constexpr int kDryBulb = 7;  // 1-indexed EPW field numbers
inline constexpr int kGhi = 14;
inline constexpr int kDni = 15;
inline constexpr int kDhi = 16;
inline constexpr double kMissingTemperature = 99.9;
inline constexpr double kMissingIrradiance = 9999.0;

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double to_double(std::string_view s, std::size_t line_no, const char* what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ParseError("EPW line " + std::to_string(line_no) + ": bad " + what + " value '" + std::string(s) + "'");
  return v;
}

inline bool is_data_line(std::string_view line) {
  return !line.empty() && ((line.front() >= '0' && line.front() <= '9') || line.front() == '-');
}

}  // namespace epw

/// Parses EPW text. Irradiance sentinels become 0; missing temperatures are
/// interpolated linearly between the nearest valid hours.
inline WeatherSeries parse_epw(std::istream& in, const std::string& source = "<stream>") {
  WeatherSeries w;
  std::string line;
  std::size_t line_no = 0;
  bool have_location = false;
  std::vector<bool> temp_missing;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("LOCATION", 0) == 0) {
      auto f = epw::split_csv(line);
      if (f.size() < 10) throw ParseError(source + " line " + std::to_string(line_no) + ": short LOCATION header");
      w.site.name = std::string(f[1]);
      w.site.latitude_deg = epw::to_double(f[6], line_no, "latitude");
      w.site.longitude_deg = epw::to_double(f[7], line_no, "longitude");
      w.site.utc_offset_h = epw::to_double(f[8], line_no, "time zone");
      w.site.elevation_m = epw::to_double(f[9], line_no, "elevation");
      if (w.site.latitude_deg < -90 || w.site.latitude_deg > 90)
        throw ParseError(source + " line " + std::to_string(line_no) + ": latitude out of range");
      have_location = true;
      continue;
    }
    if (!epw::is_data_line(line)) continue;
    auto f = epw::split_csv(line);
    if (f.size() < static_cast<std::size_t>(epw::kDhi))
      throw ParseError(source + " line " + std::to_string(line_no) + ": expected at least 16 fields");
    WeatherHour h;
    h.month = static_cast<int>(epw::to_double(f[1], line_no, "month"));
    h.day = static_cast<int>(epw::to_double(f[2], line_no, "day"));
    h.hour = static_cast<int>(epw::to_double(f[3], line_no, "hour"));
    if (h.month < 1 || h.month > 12 || h.day < 1 || h.day > 31 || h.hour < 1 || h.hour > 24)
      throw ParseError(source + " line " + std::to_string(line_no) + ": bad date/time");
    if (h.month == 2 && h.day == 29) continue;  // leap-day rows are dropped
    h.dry_bulb_c = epw::to_double(f[epw::kDryBulb - 1], line_no, "dry-bulb");
    h.ghi = epw::to_double(f[epw::kGhi - 1], line_no, "global horizontal");
    h.dni = epw::to_double(f[epw::kDni - 1], line_no, "direct normal");
    h.dhi = epw::to_double(f[epw::kDhi - 1], line_no, "diffuse horizontal");
    for (double* r : {&h.ghi, &h.dni, &h.dhi}) {
      if (*r >= epw::kMissingIrradiance) *r = 0.0;
      if (*r < 0) throw ParseError(source + " line " + std::to_string(line_no) + ": negative irradiance");
    }
    temp_missing.push_back(h.dry_bulb_c >= epw::kMissingTemperature);
    w.hours.push_back(h);
    if (w.hours.size() > static_cast<std::size_t>(kHoursPerYear))
      throw ParseError(source + " line " + std::to_string(line_no) + ": more than 8760 hourly rows");
  }
  if (!have_location) throw ParseError(source + ": missing LOCATION header");
  if (w.hours.size() < static_cast<std::size_t>(kHoursPerYear))
    throw ShortFileError(source + ": " + std::to_string(w.hours.size()) + " hourly rows, expected 8760");

  const std::size_t n = w.hours.size();
  std::size_t first_valid = n;
  for (std::size_t i = 0; i < n; ++i)
    if (!temp_missing[i]) {
      first_valid = i;
      break;
    }
  if (first_valid == n) throw ParseError(source + ": no valid dry-bulb temperatures");
  std::size_t prev = first_valid;
  for (std::size_t i = 0; i < first_valid; ++i) w.hours[i].dry_bulb_c = w.hours[first_valid].dry_bulb_c;
  for (std::size_t i = first_valid + 1; i < n; ++i) {
    if (temp_missing[i]) continue;
    if (i - prev > 1) {
      const double a = w.hours[prev].dry_bulb_c;
      const double b = w.hours[i].dry_bulb_c;
      for (std::size_t k = prev + 1; k < i; ++k)
        w.hours[k].dry_bulb_c = a + (b - a) * static_cast<double>(k - prev) / static_cast<double>(i - prev);
    }
    prev = i;
  }
  for (std::size_t k = prev + 1; k < n; ++k) w.hours[k].dry_bulb_c = w.hours[prev].dry_bulb_c;
  return w;
}

inline WeatherSeries parse_epw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open weather file " + path.string());
  return parse_epw(in, path.string());
}

/// Uniform synthetic year, used for analytic checks.
inline WeatherSeries constant_weather(double dry_bulb_c, double ghi = 0, double dni = 0, double dhi = 0,
                                      double latitude = 40.0) {
  WeatherSeries w;
  w.site = {"constant", latitude, 0.0, 0.0, 0.0};
  w.hours.reserve(kHoursPerYear);
  for (int m = 1; m <= 12; ++m)
    for (int d = 1; d <= kDaysInMonth[m - 1]; ++d)
      for (int h = 1; h <= 24; ++h) w.hours.push_back({m, d, h, dry_bulb_c, ghi, dni, dhi});
  return w;
}

}  // namespace fenestra
