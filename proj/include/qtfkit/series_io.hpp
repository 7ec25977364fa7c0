#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qtfkit/series.hpp"

namespace qtfkit {

// CSV: header "t,x", one row per sample, 17 significant digits, LF endings.
// Binary: "QTFS" magic, u32 version (1), f64 rate_hz, then little-endian f64
// samples until end of file.

inline constexpr unsigned kBinaryVersion = 1;

void write_csv(std::ostream& out, const SampleSeries& s);
void write_csv(const std::filesystem::path& path, const SampleSeries& s);

/// Several aligned columns sharing one time axis: header "t,<name>,<name>...".
void write_csv_columns(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, const SampleSeries*>>& columns);

/// Reads a "t,x" CSV (extra columns are ignored). The rate comes from the
/// time column, which must be uniformly spaced.
SampleSeries read_csv(std::istream& in);
SampleSeries read_csv(const std::filesystem::path& path);

void write_binary(std::ostream& out, const SampleSeries& s);
void write_binary(const std::filesystem::path& path, const SampleSeries& s);
SampleSeries read_binary(std::istream& in);
SampleSeries read_binary(const std::filesystem::path& path);

/// Dispatches on extension: ".bin" is binary, anything else CSV.
SampleSeries read_series(const std::filesystem::path& path);

/// Shortest round-trip decimal form used by every CSV writer.
std::string format_number(double v);

}  // namespace qtfkit
