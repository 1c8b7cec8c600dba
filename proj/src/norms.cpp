#include "ddebound/norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddebound {

PositivityViolation::PositivityViolation(double t, double value)
    : std::runtime_error("denominator " + std::to_string(value) +
                         " is not positive at t = " + std::to_string(t)),
      t_(t),
      value_(value) {}

std::vector<double> grid_times(double t0, const GridSpec& g) {
  g.check();
  const auto n = static_cast<std::size_t>(std::floor(g.horizon / g.step + 1e-9));
  std::vector<double> times;
  times.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) times.push_back(t0 + static_cast<double>(i) * g.step);
  const double end = t0 + g.horizon;
  if (end - times.back() > 1e-12 * (1.0 + std::fabs(end))) times.push_back(end);
  return times;
}

NormEstimate sup_abs(std::span<const double> times, std::span<const double> values,
                     const GridSpec& g) {
  NormEstimate est{0.0, times.empty() ? 0.0 : times.front(), g};
  double best = -1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = std::fabs(values[i]);
    if (v > best) {
      best = v;
      est.argmax_t = times[i];
    }
  }
  est.value = (1.0 + g.margin) * std::max(best, 0.0);
  return est;
}

NormEstimate sup_abs_ratio(std::span<const double> times, std::span<const double> numer,
                           std::span<const double> denom, const GridSpec& g) {
  NormEstimate est{0.0, times.empty() ? 0.0 : times.front(), g};
  double best = -1.0;
  for (std::size_t i = 0; i < numer.size(); ++i) {
    if (!(denom[i] > 0.0)) throw PositivityViolation(times[i], denom[i]);
    const double v = std::fabs(numer[i] / denom[i]);
    if (v > best) {
      best = v;
      est.argmax_t = times[i];
    }
  }
  est.value = (1.0 + g.margin) * std::max(best, 0.0);
  return est;
}

double min_deflated(std::span<const double> values, const GridSpec& g) {
  double lo = INFINITY;
  for (double v : values) lo = std::min(lo, v);
  return lo - g.margin * std::fabs(lo);
}

double tail_min(double t0, std::span<const double> times, std::span<const double> values,
                const GridSpec& g) {
  const double start = t0 + g.tail_start;
  double lo = INFINITY;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (times[i] >= start) lo = std::min(lo, values[i]);
  return lo;
}

namespace {

std::vector<double> sample(const Sampler& s, std::span<const double> times) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(s(t));
  return out;
}

}  // namespace

NormEstimate sup_norm(const Expr& e, double t0, const GridSpec& g) {
  return sup_norm(Sampler([&e](double t) { return e.eval(t); }), t0, g);
}

NormEstimate sup_norm(const Sampler& s, double t0, const GridSpec& g) {
  const auto times = grid_times(t0, g);
  const auto values = sample(s, times);
  return sup_abs(times, values, g);
}

NormEstimate sup_ratio_norm(const Sampler& numer, const Sampler& denom, double t0,
                            const GridSpec& g) {
  const auto times = grid_times(t0, g);
  const auto n = sample(numer, times);
  const auto d = sample(denom, times);
  return sup_abs_ratio(times, n, d, g);
}

double inf_bound(const Sampler& s, double t0, const GridSpec& g) {
  const auto times = grid_times(t0, g);
  return min_deflated(sample(s, times), g);
}

double liminf_estimate(const Sampler& s, double t0, const GridSpec& g) {
  const auto times = grid_times(t0, g);
  return tail_min(t0, times, sample(s, times), g);
}

double initial_function_norm(const DDEProblem& p, double step) {
  const Expr& phi = p.initial_function();
  if (!(p.tau_max() > 0.0)) return std::fabs(phi.eval(p.t0()));
  const auto n = static_cast<std::size_t>(std::ceil(p.tau_max() / step));
  double best = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = p.t0() - p.tau_max() + p.tau_max() * static_cast<double>(i) / n;
    best = std::max(best, std::fabs(phi.eval(t)));
  }
  return best;
}

}  // namespace ddebound
