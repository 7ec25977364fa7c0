#pragma once

#include <cstddef>

#include "qtfkit/series.hpp"

// Slow references used to check the streaming filters. Nothing here is
// meant for a real-time path: windowed operations cost O(W) per sample.

namespace qtfkit::oracle {

enum class Alignment { kCausal, kCentered };

/// Boxcar window of `width_s` seconds, ending at (causal) or centered on
/// the output sample.
struct WindowSpec {
  double width_s = 0.0;
  Alignment alignment = Alignment::kCausal;

  /// Window width in samples at `rate_hz`; throws when fewer than 2.
  std::size_t samples(double rate_hz) const;
};

/// Linear-interpolation q-quantile of the samples in a moving window.
/// Edge outputs use the truncated window, so output length == input length.
SampleSeries windowed_quantile(const SampleSeries& s, const WindowSpec& w, double q);

/// The constant Q solving mean(sgn(x - Q)) = 1 - 2q over the whole record,
/// taken as the empirical quantile of the sorted samples.
double stationary_quantile(const SampleSeries& s, double q);

/// Classic Hampel filter: a sample farther than k * 1.4826 * MAD from the
/// windowed median is replaced by that median.
SampleSeries hampel(const SampleSeries& s, const WindowSpec& w, double k);

inline constexpr double kMadScale = 1.4826;

}  // namespace qtfkit::oracle
