#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "attnspread/error.hpp"
#include "attnspread/stats.hpp"

namespace attnspread::io {

inline constexpr const char* kSeriesHeader = "bin_center,count,mean,median,p25,p75";
inline constexpr const char* kSpatialHeader = "bin_x,bin_y,center_x,center_y,count,mean_spread";

/// 17 significant digits: parse(format_double(x)) == x for every finite double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline std::string render_series_csv(const BinnedSeries& series) {
  std::string out = kSeriesHeader;
  out += '\n';
  for (const auto& b : series.bins) {
    out += format_double(b.center) + ',' + std::to_string(b.count) + ',' + format_optional(b.mean) +
           ',' + format_optional(b.median) + ',' + format_optional(b.p25) + ',' +
           format_optional(b.p75) + '\n';
  }
  return out;
}

inline std::string render_spatial_csv(const SpatialGridStats& stats) {
  std::string out = kSpatialHeader;
  out += '\n';
  for (int by = 0; by < stats.bins_per_side; ++by) {
    for (int bx = 0; bx < stats.bins_per_side; ++bx) {
      const std::size_t i = stats.index(bx, by);
      out += std::to_string(bx) + ',' + std::to_string(by) + ',' + format_double(stats.center(bx)) +
             ',' + format_double(stats.center(by)) + ',' + std::to_string(stats.count[i]) + ',' +
             format_optional(stats.mean_spread[i]) + '\n';
    }
  }
  return out;
}

/// Writes to a sibling temporary and renames it into place, so readers
/// never observe a truncated file.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

inline void write_series_csv(const BinnedSeries& series, const std::filesystem::path& path) {
  write_text_atomic(path, render_series_csv(series));
}

inline void write_spatial_csv(const SpatialGridStats& stats, const std::filesystem::path& path) {
  write_text_atomic(path, render_spatial_csv(stats));
}

// ---------------------------------------------------------------------------
// Parsers, used to verify emitted files.

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& file, long long line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw FormatError(file, line, "not a number: '" + s + "'");
  return v;
}

inline std::optional<double> parse_optional(const std::string& s, const std::string& file,
                                            long long line) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, file, line);
}

}  // namespace detail

inline BinnedSeries parse_series_csv(const std::string& text, const std::string& file = "<csv>") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSeriesHeader)
    throw FormatError(file, 0, "unexpected series header");
  BinnedSeries s;
  long long n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 6) throw FormatError(file, n, "expected 6 fields");
    BinSummary b;
    b.center = detail::parse_double(f[0], file, n);
    b.count = static_cast<std::size_t>(detail::parse_double(f[1], file, n));
    b.mean = detail::parse_optional(f[2], file, n);
    b.median = detail::parse_optional(f[3], file, n);
    b.p25 = detail::parse_optional(f[4], file, n);
    b.p75 = detail::parse_optional(f[5], file, n);
    s.bins.push_back(b);
  }
  return s;
}

struct SpatialRow {
  int bin_x = 0;
  int bin_y = 0;
  double center_x = 0.0;
  double center_y = 0.0;
  std::size_t count = 0;
  std::optional<double> mean_spread;
};

inline std::vector<SpatialRow> parse_spatial_csv(const std::string& text,
                                                 const std::string& file = "<csv>") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSpatialHeader)
    throw FormatError(file, 0, "unexpected spatial header");
  std::vector<SpatialRow> rows;
  long long n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 6) throw FormatError(file, n, "expected 6 fields");
    SpatialRow r;
    r.bin_x = static_cast<int>(detail::parse_double(f[0], file, n));
    r.bin_y = static_cast<int>(detail::parse_double(f[1], file, n));
    r.center_x = detail::parse_double(f[2], file, n);
    r.center_y = detail::parse_double(f[3], file, n);
    r.count = static_cast<std::size_t>(detail::parse_double(f[4], file, n));
    r.mean_spread = detail::parse_optional(f[5], file, n);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace attnspread::io
