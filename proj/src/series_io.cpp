#include "qtfkit/series_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qtfkit {
namespace {

constexpr char kMagic[4] = {'Q', 'T', 'F', 'S'};

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) return false;
  std::memcpy(&value, bytes, sizeof(T));
  return true;
}

double parse_double(const std::string& field, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw DataError("line " + std::to_string(line) + ": cannot parse '" + field + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const SampleSeries& s) {
  out << "t,x\n";
  for (std::size_t n = 0; n < s.size(); ++n) {
    out << format_number(s.time(n)) << ',' << format_number(s[n]) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const SampleSeries& s) {
  auto out = open_out(path, std::ios::binary);
  write_csv(out, s);
}

void write_csv_columns(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, const SampleSeries*>>& columns) {
  if (columns.empty()) throw std::invalid_argument("write_csv_columns: no columns");
  const SampleSeries& first = *columns.front().second;
  for (const auto& [name, series] : columns) require_aligned(first, *series, "write_csv_columns");
  auto out = open_out(path, std::ios::binary);
  out << 't';
  for (const auto& [name, series] : columns) out << ',' << name;
  out << '\n';
  for (std::size_t n = 0; n < first.size(); ++n) {
    out << format_number(first.time(n));
    for (const auto& [name, series] : columns) out << ',' << format_number((*series)[n]);
    out << '\n';
  }
}

SampleSeries read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("t,", 0) != 0) throw DataError("CSV header must start with 't,'");

  std::vector<double> times;
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string t_field;
    std::string x_field;
    if (!std::getline(fields, t_field, ',') || !std::getline(fields, x_field, ',')) {
      throw DataError("line " + std::to_string(lineno) + ": expected at least two fields");
    }
    times.push_back(parse_double(t_field, lineno));
    values.push_back(parse_double(x_field, lineno));
  }
  if (times.size() < 2) throw DataError("CSV needs at least two rows to infer the sample rate");

  const double span = times.back() - times.front();
  const double dt = span / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw DataError("CSV time column must increase");
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double expected = times.front() + dt * static_cast<double>(n);
    if (std::abs(times[n] - expected) > 1e-6 * dt + 1e-12 * std::abs(expected)) {
      throw DataError("CSV time column is not uniformly spaced at row " + std::to_string(n + 1));
    }
  }
  return SampleSeries(1.0 / dt, std::move(values), times.front());
}

SampleSeries read_csv(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  return read_csv(in);
}

void write_binary(std::ostream& out, const SampleSeries& s) {
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kBinaryVersion);
  put_le<double>(out, s.rate_hz());
  for (double x : s.samples()) put_le<double>(out, x);
}

void write_binary(const std::filesystem::path& path, const SampleSeries& s) {
  auto out = open_out(path, std::ios::binary);
  write_binary(out, s);
}

SampleSeries read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("binary series: bad magic");
  }
  std::uint32_t version = 0;
  double rate = 0.0;
  if (!get_le(in, version) || !get_le(in, rate)) throw DataError("binary series: truncated header");
  if (version != kBinaryVersion) {
    throw DataError("binary series: unsupported version " + std::to_string(version));
  }
  std::vector<double> values;
  double x = 0.0;
  while (get_le(in, x)) values.push_back(x);
  if (in.gcount() != 0) throw DataError("binary series: trailing partial sample");
  return SampleSeries(rate, std::move(values));
}

SampleSeries read_binary(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  return read_binary(in);
}

SampleSeries read_series(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? read_binary(path) : read_csv(path);
}

}  // namespace qtfkit
