#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qtfkit/series.hpp"

namespace qtfkit {

inline constexpr std::size_t kWelchSegment = 1024;
inline constexpr double kWelchOverlap = 0.5;

/// One-sided PSD estimate in units^2/Hz over [0, rate/2].
struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> power_density;
  std::size_t segment_len = 0;
  double overlap_fraction = 0.0;
  std::string window_name;
};

/// Welch average of Hann-windowed periodograms, scaled so the integral over
/// frequency approximates the signal's mean square.
PsdEstimate psd_welch(const SampleSeries& s, std::size_t segment_len = kWelchSegment,
                      double overlap_fraction = kWelchOverlap);

/// Trapezoidal integral of the density over [f_lo, f_hi], interpolating the
/// density linearly at band edges that fall between bins.
double band_power(const PsdEstimate& p, const BandSpec& band);

/// RMS of a - b, skipping the first `skip_warmup_s` seconds.
double residual_rms(const SampleSeries& a, const SampleSeries& b, double skip_warmup_s = 0.0);

/// 10 log10(a / b).
double db_ratio(double a, double b);

}  // namespace qtfkit
