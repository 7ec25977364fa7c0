#pragma once

#include <optional>

#include "qtfkit/series.hpp"

namespace qtfkit {

/// Parameters of one quantile tracker.
///
/// q is the tracked quantile level, mu the slew budget in amplitude units per
/// second, eps the half-width of the comparator's linear region (0 selects the
/// hard sign comparator with the overshoot clamp).
struct QtfParams {
  double q = 0.5;
  double mu = 1.0;
  double eps = 0.0;

  /// Throws std::invalid_argument unless 0 < q < 1, mu > 0, eps >= 0.
  void validate() const;
};

/// Quantile Tracking Filter: a first-order nonlinear tracker whose output
/// follows the q-quantile of its input,
///
///     dQ/dt = mu * (S(x - Q) + 2q - 1),
///
/// with S the sign function (eps == 0) or a piecewise-linear comparator of
/// half-width eps. State is one double; every step is O(1) in time and memory.
class QuantileTracker {
 public:
  QuantileTracker(QtfParams params, double initial_value);

  const QtfParams& params() const { return params_; }
  double value() const { return value_; }
  void reset(double value);

  /// Explicit Euler step of the sign-comparator ODE with the overshoot clamp.
  ///
  /// With gamma = mu*h and d = x - Q: if 2*gamma*(q-1) < d < 2*gamma*q the
  /// output snaps to x, otherwise Q += gamma*(sgn(d) + 2q - 1), sgn(0) = 0.
  double step(double x, double h);

  /// Euler step with the comparator S(d) = d/eps for |d| < eps, sgn(d)
  /// otherwise. No clamp. Requires eps > 0.
  double step_smooth(double x, double h);

  /// step() when eps == 0, step_smooth() otherwise.
  double advance(double x, double h) { return params_.eps > 0.0 ? step_smooth(x, h) : step(x, h); }

 private:
  QtfParams params_;
  double value_;
};

/// Runs a tracker over a series. Output[0] is `init` (the first sample when
/// not given); each later output is advance(x[n], 1/rate).
SampleSeries qtf_run(const SampleSeries& s, const QtfParams& params,
                     std::optional<double> init = std::nullopt);

// Parameter helpers. These return the bound itself; the underlying
// conditions are strict, so callers choose mu with their own margin.

/// Smallest rate that lets a q-tracker keep up with a linear trend:
/// |slope| / (2 min(q, 1-q)).
double min_mu_for_trend(double trend_slope, double q);

/// Quantile actually tracked (in detrended coordinates) when the input has a
/// linear trend of `trend_slope`: q - slope / (2 mu). Throws when the result
/// leaves (0, 1).
double trend_effective_quantile(double q, double trend_slope, double mu);

/// Rate above which the tracker follows any signal with |dx/dt| <= mu_max
/// exactly after convergence: mu_max / (2 min(q, 1-q)).
double tightest_mu(double q, double mu_max);

/// Upper bound on the time to enter the |x - Q| < eps band from an initial
/// gap, for mu > mu_q: (gap - eps) / (mu - mu_q).
double convergence_time_bound(double x0_gap, double eps, double mu, double mu_q);

}  // namespace qtfkit
