#pragma once

#include <cstddef>
#include <vector>

#include "qtfkit/qtf.hpp"
#include "qtfkit/series.hpp"

namespace qtfkit {

inline constexpr double kDefaultBeta = 1.5;

struct FenceParams {
  double beta = kDefaultBeta;
  double mu = 1.0;
  double eps = 0.0;

  void validate() const;
};

/// Tukey fences built from a quartile tracker pair.
///
///     lower = Q1 - beta (Q3 - Q1),  upper = Q3 + beta (Q3 - Q1)
///
/// q1/q3 hold the ordered pair (swapped where the trackers cross during
/// start-up), so upper >= lower and midhinge == (q1 + q3) / 2 everywhere.
struct FenceSeries {
  SampleSeries lower;
  SampleSeries upper;
  SampleSeries midhinge;
  SampleSeries q1;
  SampleSeries q3;
  double beta = kDefaultBeta;
  /// Leading samples (2 IQR / mu seconds) before the trackers settle.
  std::size_t warmup_samples = 0;
};

struct OutlierMask {
  std::vector<bool> flags;

  std::size_t size() const { return flags.size(); }
  std::size_t count() const;
  bool any() const { return count() > 0; }
};

enum class Replacement {
  kMidhinge,   ///< (Q1 + Q3) / 2
  kClampToFence,
};

/// Samples before the trackers reach their stationary regime: 2 IQR / mu.
std::size_t fence_warmup_samples(const SampleSeries& s, double mu);

/// Runs q = 1/4 and q = 3/4 trackers (same mu, eps) and forms Tukey fences.
FenceSeries compute_fences(const SampleSeries& s, const FenceParams& p);

/// (2 beta + 1)(Q3 - Q1) per sample.
SampleSeries range_width(const FenceSeries& f, double beta);

/// Flags samples strictly above the upper or strictly below the lower fence.
OutlierMask detect_outliers(const SampleSeries& s, const FenceSeries& f);

/// Replaces flagged samples; unflagged samples are copied bit-for-bit.
SampleSeries inf_apply(const SampleSeries& s, const FenceSeries& f, const OutlierMask& m,
                       Replacement mode = Replacement::kMidhinge);

struct InfResult {
  SampleSeries cleaned;
  OutlierMask mask;
  FenceSeries fences;
};

/// compute_fences + detect_outliers + inf_apply in one call.
InfResult inf_filter(const SampleSeries& s, const FenceParams& p,
                     Replacement mode = Replacement::kMidhinge);

/// Rate that keeps fences inclusive of any signal whose slew never exceeds
/// `max_slew`: 2 max_slew / (3 + 2 beta).
double inclusive_mu(double max_slew, double beta = kDefaultBeta);

/// Slew a signal must exceed to cross a fence: (3/2 + beta) mu.
double protrusion_slew(double mu, double beta = kDefaultBeta);

/// Sample-in, sample-out INF with the same semantics as inf_filter.
class StreamingInf {
 public:
  struct Output {
    double value;
    bool flagged;
    double lower;
    double upper;
    double midhinge;
  };

  StreamingInf(const FenceParams& p, double rate_hz, Replacement mode = Replacement::kMidhinge);

  Output push(double x);

 private:
  FenceParams params_;
  double h_;
  Replacement mode_;
  QuantileTracker q1_;
  QuantileTracker q3_;
  bool primed_ = false;
};

}  // namespace qtfkit
