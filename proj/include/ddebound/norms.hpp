#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ddebound/expr.hpp"
#include "ddebound/problem.hpp"

namespace ddebound {

using Sampler = std::function<double(double)>;

/// Grid estimate of an essential supremum over [t0, t0 + horizon].
struct NormEstimate {
  double value = 0.0;
  double argmax_t = 0.0;
  GridSpec grid;
};

/// A denominator that should stay positive was not; the hypothesis that
/// needs it fails at `t`.
class PositivityViolation : public std::runtime_error {
 public:
  PositivityViolation(double t, double value);
  double t() const { return t_; }
  double value() const { return value_; }

 private:
  double t_;
  double value_;
};

/// t0 + i*step for i = 0..N with the endpoint t0 + horizon always included.
std::vector<double> grid_times(double t0, const GridSpec& g);

// Kernels over values already sampled on `times`. Ties resolve to the
// smallest t.
NormEstimate sup_abs(std::span<const double> times, std::span<const double> values,
                     const GridSpec& g);
NormEstimate sup_abs_ratio(std::span<const double> times, std::span<const double> numer,
                           std::span<const double> denom, const GridSpec& g);
double min_deflated(std::span<const double> values, const GridSpec& g);
double tail_min(double t0, std::span<const double> times, std::span<const double> values,
                const GridSpec& g);

NormEstimate sup_norm(const Expr& e, double t0, const GridSpec& g);
NormEstimate sup_norm(const Sampler& s, double t0, const GridSpec& g);

/// Grid max of |numer/denom|; throws PositivityViolation when denom <= 0 at a
/// grid point.
NormEstimate sup_ratio_norm(const Sampler& numer, const Sampler& denom, double t0,
                            const GridSpec& g);

/// Grid minimum, deflated by the margin. Used as the positivity witness.
double inf_bound(const Sampler& s, double t0, const GridSpec& g);

/// Minimum over [t0 + tail_start, t0 + horizon]; stands in for liminf.
double liminf_estimate(const Sampler& s, double t0, const GridSpec& g);

/// sup |phi| over [t0 - tau_max, t0] sampled with spacing at most `step`;
/// |phi(t0)| when tau_max is zero.
double initial_function_norm(const DDEProblem& p, double step);

}  // namespace ddebound
