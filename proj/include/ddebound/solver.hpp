#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddebound/expr.hpp"
#include "ddebound/problem.hpp"

namespace ddebound {

class StepTooLarge : public std::invalid_argument {
 public:
  StepTooLarge(double step, double limit);
  double step() const { return step_; }
  double limit() const { return limit_; }

 private:
  double step_;
  double limit_;
};

/// Dense numerical solution on a uniform node grid with cubic Hermite
/// interpolation between nodes. Queries before t_start fall back to the
/// initial function.
class Trajectory {
 public:
  /// `slopes` are right derivatives at the nodes. `left_slopes` may be empty
  /// when the derivative is continuous at every node.
  Trajectory(double t_start, double step, std::vector<double> values,
             std::vector<double> slopes, Expr initial_function,
             std::vector<double> left_slopes = {});

  double t_start() const { return t_start_; }
  double t_end() const { return t_start_ + step_ * static_cast<double>(values_.size() - 1); }
  double step() const { return step_; }
  std::size_t size() const { return values_.size(); }
  double time(std::size_t i) const { return t_start_ + step_ * static_cast<double>(i); }
  std::span<const double> values() const { return values_; }
  std::span<const double> slopes() const { return slopes_; }

  /// Hermite interpolant on [t_start, t_end]; the initial function before
  /// t_start. Throws std::out_of_range past t_end.
  double operator()(double t) const;

  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  /// `t,x` rows at node resolution.
  void write_csv(std::ostream& os) const;

 private:
  double t_start_;
  double step_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  std::vector<double> left_slopes_;
  Expr phi_;
  std::vector<std::string> warnings_;
};

/// Fixed-step classical RK4 over [t0, t_end]. The step is shrunk so nodes
/// land on t_end. Delayed values come from phi before t0, from the Hermite
/// interpolant of completed steps, and otherwise from the current step:
/// the stage state when h(t) == t, else an Euler predictor that is refined
/// by up to two corrector sweeps. Stages after a step's start take left
/// limits, so a lag reaching t0 from below still reads phi there.
///
/// Throws StepTooLarge when every delta_k > 0 and step > tau_min/4.
Trajectory solve(const DDEProblem& p, double t_end, double step);

/// X(., s): zero history before s, X(s, s) = 1, no forcing.
Trajectory fundamental(const DDEProblem& p, double s, double t_end, double step);

/// Fundamental solutions X(., s_j) for s_j = t0 + j*ds covering [t0, s_max],
/// each integrated to t_end. Built concurrently.
class FundamentalTable {
 public:
  FundamentalTable(const DDEProblem& p, double s_max, double ds, double t_end, double step);

  /// X(t, s): linear in s between table nodes, 0 for t < s, 1 at t == s.
  double operator()(double t, double s) const;

  double ds() const { return ds_; }
  double s_max() const { return s_max_; }
  double t_end() const { return t_end_; }

 private:
  double t0_;
  double ds_;
  double s_max_;
  double t_end_;
  std::vector<Trajectory> columns_;
};

/// Solution value at t from the variation-of-constants representation,
/// integrated by composite trapezoid on the table's s spacing. phi(h_k(s)) is
/// taken as 0 once h_k(s) >= t0.
double reconstruct_via_representation(const DDEProblem& p, const FundamentalTable& X, double t);

}  // namespace ddebound
