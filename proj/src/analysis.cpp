#include "qtfkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qtfkit/fft.hpp"

namespace qtfkit {

PsdEstimate psd_welch(const SampleSeries& s, std::size_t segment_len, double overlap_fraction) {
  if (segment_len < 2 || segment_len > s.size()) {
    throw std::invalid_argument("psd_welch: segment length must be in [2, series length]");
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw std::invalid_argument("psd_welch: overlap must lie in [0, 1)");
  }
  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(segment_len * (1.0 - overlap_fraction))));

  // Periodic Hann window.
  std::vector<double> window(segment_len);
  double window_power = 0.0;
  for (std::size_t i = 0; i < segment_len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(segment_len));
    window_power += window[i] * window[i];
  }

  const std::size_t bins = segment_len / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::vector<double> segment(segment_len);
  std::size_t count = 0;
  for (std::size_t start = 0; start + segment_len <= s.size(); start += hop) {
    for (std::size_t i = 0; i < segment_len; ++i) segment[i] = window[i] * s[start + i];
    const auto spectrum = rfft(segment);
    for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(spectrum[k]);
    ++count;
  }

  PsdEstimate p;
  p.segment_len = segment_len;
  p.overlap_fraction = overlap_fraction;
  p.window_name = "hann";
  p.freqs_hz.resize(bins);
  p.power_density.resize(bins);
  const double norm = 1.0 / (s.rate_hz() * window_power * static_cast<double>(count));
  for (std::size_t k = 0; k < bins; ++k) {
    p.freqs_hz[k] = static_cast<double>(k) * s.rate_hz() / static_cast<double>(segment_len);
    // Interior bins carry the power of their negative-frequency twins too.
    const bool edge = k == 0 || (segment_len % 2 == 0 && k == bins - 1);
    p.power_density[k] = acc[k] * norm * (edge ? 1.0 : 2.0);
  }
  return p;
}

double band_power(const PsdEstimate& p, const BandSpec& band) {
  if (p.freqs_hz.size() < 2) throw std::invalid_argument("band_power: empty PSD");
  if (!(band.f_hi > band.f_lo)) throw std::invalid_argument("band_power: empty band");
  if (band.f_lo < 0.0 || band.f_hi > p.freqs_hz.back() * (1.0 + 1e-12)) {
    throw std::invalid_argument("band_power: band outside [0, Nyquist]");
  }
  const auto& f = p.freqs_hz;
  const auto& d = p.power_density;
  auto density_at = [&](double x) {
    const auto it = std::upper_bound(f.begin(), f.end(), x);
    if (it == f.end()) return d.back();
    const std::size_t hi = static_cast<std::size_t>(it - f.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - f[lo]) / (f[hi] - f[lo]);
    return d[lo] + t * (d[hi] - d[lo]);
  };

  const double hi_edge = std::min(band.f_hi, f.back());
  double total = 0.0;
  double prev_f = band.f_lo;
  double prev_d = density_at(band.f_lo);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] <= band.f_lo) continue;
    if (f[k] >= hi_edge) break;
    total += 0.5 * (prev_d + d[k]) * (f[k] - prev_f);
    prev_f = f[k];
    prev_d = d[k];
  }
  total += 0.5 * (prev_d + density_at(hi_edge)) * (hi_edge - prev_f);
  return total;
}

double residual_rms(const SampleSeries& a, const SampleSeries& b, double skip_warmup_s) {
  require_aligned(a, b, "residual_rms");
  const auto skip = std::min(a.size(), static_cast<std::size_t>(std::ceil(skip_warmup_s * a.rate_hz())));
  double sum = 0.0;
  for (std::size_t i = skip; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  const std::size_t n = a.size() - skip;
  return n == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n));
}

double db_ratio(double a, double b) { return 10.0 * std::log10(a / b); }

}  // namespace qtfkit
