#include "qtfkit/qtf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qtfkit {
namespace {

double sign(double d) { return static_cast<double>((d > 0.0) - (d < 0.0)); }

void check_step_inputs(double x, double h) {
  if (!std::isfinite(x)) throw DataError("qtf: non-finite input sample");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("qtf: time step must be positive");
}

void check_q(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("qtf: q must lie in (0, 1)");
}

}  // namespace

void QtfParams::validate() const {
  check_q(q);
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("qtf: mu must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("qtf: eps must be >= 0");
}

QuantileTracker::QuantileTracker(QtfParams params, double initial_value)
    : params_(params), value_(initial_value) {
  params_.validate();
  if (!std::isfinite(initial_value)) throw std::invalid_argument("qtf: initial value must be finite");
}

void QuantileTracker::reset(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("qtf: reset value must be finite");
  value_ = value;
}

double QuantileTracker::step(double x, double h) {
  check_step_inputs(x, h);
  const double gamma = params_.mu * h;
  const double q = params_.q;
  const double d = x - value_;
  if (d > 2.0 * gamma * (q - 1.0) && d < 2.0 * gamma * q) {
    value_ = x;
  } else {
    value_ += gamma * (sign(d) + 2.0 * q - 1.0);
  }
  return value_;
}

double QuantileTracker::step_smooth(double x, double h) {
  check_step_inputs(x, h);
  const double eps = params_.eps;
  if (!(eps > 0.0)) throw std::invalid_argument("qtf: step_smooth requires eps > 0");
  const double d = x - value_;
  const double comparator = std::abs(d) < eps ? d / eps : sign(d);
  value_ += params_.mu * h * (comparator + 2.0 * params_.q - 1.0);
  return value_;
}

SampleSeries qtf_run(const SampleSeries& s, const QtfParams& params, std::optional<double> init) {
  if (s.empty()) throw std::invalid_argument("qtf_run: empty series");
  QuantileTracker tracker(params, init.value_or(s[0]));
  const double h = s.step();
  std::vector<double> out(s.size());
  out[0] = tracker.value();
  for (std::size_t n = 1; n < s.size(); ++n) out[n] = tracker.advance(s[n], h);
  return s.with_samples(std::move(out));
}

double min_mu_for_trend(double trend_slope, double q) {
  check_q(q);
  return std::abs(trend_slope) / (2.0 * std::min(q, 1.0 - q));
}

double trend_effective_quantile(double q, double trend_slope, double mu) {
  check_q(q);
  if (!(mu > 0.0)) throw std::invalid_argument("trend_effective_quantile: mu must be positive");
  const double q_hat = q - trend_slope / (2.0 * mu);
  if (!(q_hat > 0.0 && q_hat < 1.0)) {
    throw std::domain_error("trend_effective_quantile: trend too steep for mu (effective quantile " +
                            std::to_string(q_hat) + " outside (0,1))");
  }
  return q_hat;
}

double tightest_mu(double q, double mu_max) {
  check_q(q);
  if (!(mu_max >= 0.0)) throw std::invalid_argument("tightest_mu: mu_max must be >= 0");
  return mu_max / (2.0 * std::min(q, 1.0 - q));
}

double convergence_time_bound(double x0_gap, double eps, double mu, double mu_q) {
  if (!(mu > mu_q)) throw std::domain_error("convergence_time_bound: requires mu > mu_q");
  if (!(x0_gap >= eps) || eps < 0.0) {
    throw std::invalid_argument("convergence_time_bound: requires gap >= eps >= 0");
  }
  return (x0_gap - eps) / (mu - mu_q);
}

}  // namespace qtfkit
