#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qtfkit/fencing.hpp"
#include "qtfkit/linfilt.hpp"
#include "qtfkit/series.hpp"

namespace qtfkit {

inline constexpr std::size_t kDefaultFirTaps = 511;

/// Complementary INF: split the input with a bandpass / spectral-inversion
/// bandstop pair, run INF on the bandstop ("excess band") output, add the
/// bandpass output back and bandpass the sum.
struct CinfConfig {
  BandSpec signal_band;
  std::size_t fir_taps = kDefaultFirTaps;
  FenceParams fence;
  BandSpec final_band;
  double warmup_s = 0.0;

  void validate(double rate_hz) const;
};

/// Every trace is causal. The split traces (excess_band, excess_band_inf,
/// cleaned, bandpassed) lag the input by `split_delay` samples; the two
/// passband traces lag it by `passband_delay`.
struct CinfOutput {
  SampleSeries cleaned;
  SampleSeries bandpassed;
  SampleSeries passband_linear;
  SampleSeries passband_cinf;
  SampleSeries excess_band;
  SampleSeries excess_band_inf;
  OutlierMask mask;
  std::size_t split_delay = 0;
  std::size_t passband_delay = 0;
};

/// The bandpass, its complement and the final passband filter of a config.
struct CinfFilters {
  FirFilter bandpass;
  FirFilter bandstop;
  FirFilter final_filter;
};

CinfFilters design_cinf_filters(const CinfConfig& cfg, double rate_hz);

CinfOutput cinf_run(const SampleSeries& s, const CinfConfig& cfg);

/// Sample-at-a-time CINF producing the same values as cinf_run.
class CinfStream {
 public:
  struct Output {
    double cleaned;
    double passband_linear;
    double passband_cinf;
    bool flagged;
  };

  CinfStream(const CinfConfig& cfg, double rate_hz);
  CinfStream(const CinfFilters& filters, const FenceParams& fence, double rate_hz);
  Output push(double x);

  std::size_t split_delay() const { return split_delay_; }
  std::size_t passband_delay() const { return passband_delay_; }

 private:
  FirStream bandpass_;
  FirStream bandstop_;
  StreamingInf inf_;
  FirStream final_cinf_;
  FirStream final_linear_;
  std::vector<double> linear_delay_;  // circular
  std::size_t delay_head_ = 0;
  std::size_t split_delay_;
  std::size_t passband_delay_;
};

/// cinf_run with the split, INF and final-filter stages on separate threads
/// joined by bounded block queues. Results are identical to cinf_run.
CinfOutput cinf_run_pipelined(const SampleSeries& s, const CinfConfig& cfg, std::size_t block = 4096,
                              std::size_t queue_blocks = 4);

/// Wide/narrow separation. The mixture is all-pass filtered with a seeded
/// random phase (turning a suitably built wide signal into outliers), run
/// through CINF on the narrow band and restored with the conjugate all-pass.
/// The record is processed as one period of a circular signal so the block
/// all-pass and the causal filters commute.
struct SeparationResult {
  SampleSeries wide;
  SampleSeries narrow;
  SampleSeries wide_linear;
  SampleSeries narrow_linear;
  double delta_linear = 0.0;
  double delta_cinf = 0.0;
  std::size_t flagged = 0;
};

SeparationResult separate_wide_narrow(const SampleSeries& mix, const CinfConfig& cfg,
                                      std::uint64_t allpass_seed, const SampleSeries& narrow_truth);

/// Fencing of a chirp + wideband outlier mixture three ways: directly with a
/// tight rate (2 mu_max), directly with a robust rate (mu_factor * mu_max),
/// and on the excess-band filtered mixture with the robust rate.
struct ChirpDemoResult {
  OutlierMask mask_tight;
  OutlierMask mask_direct;
  OutlierMask mask_excess;
  SampleSeries excess;
  double mu_max = 0.0;
  double mu_robust = 0.0;
};

ChirpDemoResult chirp_excess_band_demo(const SampleSeries& mix, double f_c, double chirp_amplitude,
                                       double mu_factor = 0.2, double beta = kDefaultBeta);

}  // namespace qtfkit
