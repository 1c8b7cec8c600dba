#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddebound/expr.hpp"

namespace ddebound {

/// One delayed term b(t) x(h(t)) with declared lag bounds
/// delta <= t - h(t) <= tau.
struct DelayTerm {
  Expr b;
  Expr h;
  double delta = 0.0;
  double tau = 0.0;
};

/// x'(t) + sum_k b_k(t) x(h_k(t)) = f(t) for t >= t0, x(t) = phi(t) for
/// t < t0, x(t0) = x0.
class DDEProblem {
 public:
  /// Throws std::invalid_argument when there are no terms or a declared bound
  /// is non-finite or out of order.
  DDEProblem(std::vector<DelayTerm> terms, Expr forcing, Expr initial_function, double t0,
             double x0);

  const std::vector<DelayTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  const Expr& forcing() const { return forcing_; }
  const Expr& initial_function() const { return phi_; }
  double t0() const { return t0_; }
  double x0() const { return x0_; }
  double tau_max() const { return tau_max_; }
  bool has_forcing() const;

  /// Stable 64-bit fingerprint of the canonical problem text.
  std::uint64_t fingerprint() const;
  std::string canonical_text() const;

 private:
  std::vector<DelayTerm> terms_;
  Expr forcing_;
  Expr phi_;
  double t0_;
  double x0_;
  double tau_max_;
};

/// Sampling grid t0 + i*step over [t0, t0 + horizon] that stands in for the
/// half line in every norm estimate.
struct GridSpec {
  double horizon = 100.0;
  double step = 0.01;
  double tail_start = 50.0;  // offset into the horizon where liminf scanning begins
  double margin = 0.0;       // sup estimates are inflated by (1 + margin)

  /// Throws std::invalid_argument when an invariant is violated.
  void check() const;
};

GridSpec default_grid(const DDEProblem& p);

/// Solver step used when none is configured: min(tau_min/20, 0.01), at least
/// 1e-4, where tau_min is the smallest positive declared upper lag.
double default_solver_step(const DDEProblem& p);

struct TermReport {
  double observed_min_lag = 0.0;
  double observed_max_lag = 0.0;
  double b_norm = 0.0;
  bool bounds_hold = true;
};

struct BoundViolation {
  std::size_t term = 0;
  double t = 0.0;
  double lag = 0.0;
  std::string bound;  // "delta" or "tau"
  double declared = 0.0;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<TermReport> terms;
  std::optional<BoundViolation> first_violation;
  bool accepted() const { return !first_violation.has_value(); }
};

/// Checks every declared lag bound on the grid. Expression domain errors
/// propagate as DomainError.
ValidationReport validate(const DDEProblem& p, const GridSpec& g);

}  // namespace ddebound
