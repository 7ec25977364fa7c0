#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qtfkit/rng.hpp"
#include "qtfkit/series.hpp"

// Reference computations written independently of the library code.
namespace testutil {

inline std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  qtfkit::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = sigma * rng.normal();
  return v;
}

// Type-7 sample quantile by selection rather than a full sort.
inline double ref_quantile(std::vector<double> v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
  const double a = v[lo];
  if (lo + 1 >= v.size()) return a;
  const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
  return a + (pos - static_cast<double>(lo)) * (b - a);
}

// Direct DTFT of a tap vector.
inline std::complex<double> dtft(const std::vector<double>& h, double f, double rate) {
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    acc += h[k] * std::polar(1.0, -2.0 * std::numbers::pi * f / rate * static_cast<double>(k));
  }
  return acc;
}

inline double db(double power_ratio) { return 10.0 * std::log10(power_ratio); }

inline double mean(const std::vector<double>& v, std::size_t from = 0) {
  double s = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(v.size() - from);
}

}  // namespace testutil
