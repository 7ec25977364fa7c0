#include "qtfkit/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qtfkit {

SampleSeries::SampleSeries(double rate_hz, std::vector<double> samples, double t0)
    : rate_hz_(rate_hz), t0_(t0), samples_(std::move(samples)) {
  if (!(rate_hz_ > 0.0) || !std::isfinite(rate_hz_)) {
    throw std::invalid_argument("SampleSeries: rate_hz must be positive and finite");
  }
  if (!std::isfinite(t0_)) throw std::invalid_argument("SampleSeries: t0 must be finite");
  for (std::size_t n = 0; n < samples_.size(); ++n) {
    if (!std::isfinite(samples_[n])) {
      throw DataError("SampleSeries: non-finite sample at index " + std::to_string(n));
    }
  }
}

void BandSpec::validate(double rate_hz) const {
  if (!(f_lo >= 0.0) || !(f_lo < f_hi) || !(f_hi <= 0.5 * rate_hz)) {
    throw std::invalid_argument("band [" + std::to_string(f_lo) + ", " + std::to_string(f_hi) +
                                "] Hz is not inside [0, " + std::to_string(0.5 * rate_hz) + "]");
  }
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> values, double q) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, q);
}

double iqr(const SampleSeries& s) {
  if (s.size() < 4) throw std::invalid_argument("iqr: series needs at least 4 samples");
  std::vector<double> sorted(s.samples().begin(), s.samples().end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
}

double crossing_rate(const SampleSeries& s, double level) {
  if (s.size() < 2) throw std::invalid_argument("crossing_rate: series needs at least 2 samples");
  int last_sign = 0;
  std::size_t crossings = 0;
  for (double x : s.samples()) {
    const double d = x - level;
    const int sign = (d > 0.0) - (d < 0.0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++crossings;
    last_sign = sign;
  }
  return static_cast<double>(crossings) / s.duration();
}

double par_db(const SampleSeries& s) {
  double peak = 0.0;
  double sum = 0.0;
  for (double x : s.samples()) {
    peak = std::max(peak, x * x);
    sum += x * x;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("par: series has zero power");
  return 10.0 * std::log10(peak / (sum / static_cast<double>(s.size())));
}

double rms(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double x : values) sum += x * x;
  return std::sqrt(sum / static_cast<double>(values.size()));
}

double max_slew(const SampleSeries& s) {
  double best = 0.0;
  for (std::size_t n = 1; n < s.size(); ++n) best = std::max(best, std::abs(s[n] - s[n - 1]));
  return best * s.rate_hz();
}

void require_aligned(const SampleSeries& a, const SampleSeries& b, const char* what) {
  if (a.size() != b.size() || a.rate_hz() != b.rate_hz()) {
    throw std::invalid_argument(std::string(what) + ": series differ in length or rate");
  }
}

}  // namespace qtfkit
