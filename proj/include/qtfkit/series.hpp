#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtfkit {

/// Thrown when input data (files, series contents) cannot be used.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniformly sampled real-valued signal. Immutable after construction.
///
/// Sample n sits at time t0 + n / rate_hz. Every sample is finite.
class SampleSeries {
 public:
  SampleSeries(double rate_hz, std::vector<double> samples, double t0 = 0.0);

  double rate_hz() const { return rate_hz_; }
  double t0() const { return t0_; }
  double step() const { return 1.0 / rate_hz_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  /// Record length in seconds: size() / rate_hz.
  double duration() const { return static_cast<double>(samples_.size()) / rate_hz_; }
  double time(std::size_t n) const { return t0_ + static_cast<double>(n) / rate_hz_; }

  double operator[](std::size_t n) const { return samples_[n]; }
  std::span<const double> samples() const { return samples_; }
  const std::vector<double>& values() const { return samples_; }

  /// Same rate and start time, new samples.
  SampleSeries with_samples(std::vector<double> samples) const {
    return SampleSeries(rate_hz_, std::move(samples), t0_);
  }

 private:
  double rate_hz_;
  double t0_;
  std::vector<double> samples_;
};

/// Frequency band [f_lo, f_hi] in Hz.
struct BandSpec {
  double f_lo = 0.0;
  double f_hi = 0.0;

  double width() const { return f_hi - f_lo; }
  double center() const { return 0.5 * (f_lo + f_hi); }
  /// Throws std::invalid_argument unless 0 <= f_lo < f_hi <= rate_hz / 2.
  void validate(double rate_hz) const;
};

/// Empirical q-quantile with linear interpolation between order statistics
/// (position (n-1)q in the sorted sample). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double q);

/// Sorts a copy and calls quantile_sorted.
double quantile(std::span<const double> values, double q);

/// Q3 - Q1 over the whole series. Requires at least 4 samples.
double iqr(const SampleSeries& s);

/// Sign changes of (x - level) per second of record. A sample equal to
/// `level` inherits the sign of the last nonzero deviation.
double crossing_rate(const SampleSeries& s, double level);

/// Peak-to-average power ratio in dB.
double par_db(const SampleSeries& s);

double rms(std::span<const double> values);

/// Largest |x[n] - x[n-1]| * rate over the series (discrete slew rate).
double max_slew(const SampleSeries& s);

/// Throws std::invalid_argument when the two series differ in rate or length.
void require_aligned(const SampleSeries& a, const SampleSeries& b, const char* what);

}  // namespace qtfkit
