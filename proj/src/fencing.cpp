#include "qtfkit/fencing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qtfkit {
namespace {

struct FencePoint {
  double q1;
  double q3;
  double lower;
  double upper;
  double midhinge;
};

FencePoint fence_point(double a, double b, double beta) {
  const double q1 = std::min(a, b);
  const double q3 = std::max(a, b);
  const double spread = q3 - q1;
  return {q1, q3, q1 - beta * spread, q3 + beta * spread, 0.5 * (q1 + q3)};
}

double replacement_value(double x, const FencePoint& f, Replacement mode) {
  if (mode == Replacement::kClampToFence) return std::clamp(x, f.lower, f.upper);
  return f.midhinge;
}

}  // namespace

void FenceParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("fence: beta must be positive");
  QtfParams{0.25, mu, eps}.validate();
}

std::size_t OutlierMask::count() const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

std::size_t fence_warmup_samples(const SampleSeries& s, double mu) {
  if (s.size() < 4) return s.size();
  const double seconds = 2.0 * iqr(s) / mu;
  return std::min(s.size(), static_cast<std::size_t>(std::ceil(seconds * s.rate_hz())));
}

FenceSeries compute_fences(const SampleSeries& s, const FenceParams& p) {
  p.validate();
  if (s.empty()) throw std::invalid_argument("compute_fences: empty series");
  const SampleSeries raw1 = qtf_run(s, {0.25, p.mu, p.eps});
  const SampleSeries raw3 = qtf_run(s, {0.75, p.mu, p.eps});

  const std::size_t n = s.size();
  std::vector<double> lower(n), upper(n), mid(n), q1(n), q3(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FencePoint f = fence_point(raw1[i], raw3[i], p.beta);
    lower[i] = f.lower;
    upper[i] = f.upper;
    mid[i] = f.midhinge;
    q1[i] = f.q1;
    q3[i] = f.q3;
  }
  return FenceSeries{s.with_samples(std::move(lower)),
                     s.with_samples(std::move(upper)),
                     s.with_samples(std::move(mid)),
                     s.with_samples(std::move(q1)),
                     s.with_samples(std::move(q3)),
                     p.beta,
                     fence_warmup_samples(s, p.mu)};
}

SampleSeries range_width(const FenceSeries& f, double beta) {
  std::vector<double> out(f.q1.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (2.0 * beta + 1.0) * (f.q3[i] - f.q1[i]);
  return f.q1.with_samples(std::move(out));
}

OutlierMask detect_outliers(const SampleSeries& s, const FenceSeries& f) {
  require_aligned(s, f.upper, "detect_outliers");
  OutlierMask mask{std::vector<bool>(s.size())};
  for (std::size_t i = 0; i < s.size(); ++i) mask.flags[i] = s[i] > f.upper[i] || s[i] < f.lower[i];
  return mask;
}

SampleSeries inf_apply(const SampleSeries& s, const FenceSeries& f, const OutlierMask& m,
                       Replacement mode) {
  require_aligned(s, f.midhinge, "inf_apply");
  if (m.size() != s.size()) throw std::invalid_argument("inf_apply: mask length differs from series");
  std::vector<double> out(s.samples().begin(), s.samples().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!m.flags[i]) continue;
    out[i] = mode == Replacement::kClampToFence ? std::clamp(s[i], f.lower[i], f.upper[i])
                                                : f.midhinge[i];
  }
  return s.with_samples(std::move(out));
}

InfResult inf_filter(const SampleSeries& s, const FenceParams& p, Replacement mode) {
  if (s.empty()) throw std::invalid_argument("inf_filter: empty series");
  FenceSeries fences = compute_fences(s, p);
  OutlierMask mask = detect_outliers(s, fences);
  SampleSeries cleaned = inf_apply(s, fences, mask, mode);
  return {std::move(cleaned), std::move(mask), std::move(fences)};
}

double inclusive_mu(double max_slew, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("inclusive_mu: beta must be positive");
  return 2.0 * max_slew / (3.0 + 2.0 * beta);
}

double protrusion_slew(double mu, double beta) { return (1.5 + beta) * mu; }

StreamingInf::StreamingInf(const FenceParams& p, double rate_hz, Replacement mode)
    : params_(p),
      h_(1.0 / rate_hz),
      mode_(mode),
      q1_({0.25, p.mu, p.eps}, 0.0),
      q3_({0.75, p.mu, p.eps}, 0.0) {
  p.validate();
  if (!(rate_hz > 0.0)) throw std::invalid_argument("StreamingInf: rate must be positive");
}

StreamingInf::Output StreamingInf::push(double x) {
  if (!primed_) {
    // First sample initializes both trackers, as qtf_run does.
    q1_.reset(x);
    q3_.reset(x);
    primed_ = true;
  } else {
    q1_.advance(x, h_);
    q3_.advance(x, h_);
  }
  const FencePoint f = fence_point(q1_.value(), q3_.value(), params_.beta);
  const bool flagged = x > f.upper || x < f.lower;
  return {flagged ? replacement_value(x, f, mode_) : x, flagged, f.lower, f.upper, f.midhinge};
}

}  // namespace qtfkit
