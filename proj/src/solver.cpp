#include "ddebound/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <exception>
#include <optional>
#include <thread>

#include "ddebound/format.hpp"

namespace ddebound {

StepTooLarge::StepTooLarge(double step, double limit)
    : std::invalid_argument("solver step " + std::to_string(step) +
                            " exceeds tau_min/4 = " + std::to_string(limit)),
      step_(step),
      limit_(limit) {}

namespace {

double hermite(double x0, double d0, double x1, double d1, double h, double theta) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * x0 + h10 * h * d0 + h01 * x1 + h11 * h * d1;
}

// Integrates one problem. Nodes t0 + i*H; values_/slopes_ grow as steps
// complete.
class Integrator {
 public:
  Integrator(const DDEProblem& p, double t_end, double step) : p_(p) {
    const double span = t_end - p.t0();
    if (!(span > 0.0)) throw std::invalid_argument("t_end must exceed t0");
    if (!(step > 0.0)) throw std::invalid_argument("solver step must be positive");
    steps_ = static_cast<std::size_t>(std::ceil(span / step - 1e-9));
    steps_ = std::max<std::size_t>(steps_, 1);
    H_ = span / static_cast<double>(steps_);
  }

  Trajectory run() {
    std::vector<std::string> warnings;
    check_step(warnings);

    values_.reserve(steps_ + 1);
    slopes_.reserve(steps_ + 1);
    values_.push_back(p_.x0());
    slopes_.push_back(0.0);
    left_slopes_.reserve(steps_ + 1);
    // No step in progress yet: lookups at t0 resolve to x0.
    in_step_ = false;
    slopes_[0] = rhs(p_.t0(), p_.x0());
    left_slopes_.push_back(slopes_[0]);

    for (std::size_t n = 0; n < steps_; ++n) advance(n);

    Trajectory traj(p_.t0(), H_, std::move(values_), std::move(slopes_), p_.initial_function(),
                    std::move(left_slopes_));
    for (auto& w : warnings) traj.add_warning(std::move(w));
    return traj;
  }

 private:
  const DDEProblem& p_;
  std::size_t steps_ = 0;
  double H_ = 0.0;
  std::vector<double> values_;
  std::vector<double> slopes_;       // right derivative at each node
  std::vector<double> left_slopes_;  // left derivative; differs only at a jump

  // Current step state used by in-step lookups.
  bool in_step_ = false;
  double tn_ = 0.0;
  double xn_ = 0.0;
  double dn_ = 0.0;
  bool corrected_ = false;  // false: Euler predictor, true: Hermite through (x1_, d1_)
  double x1_ = 0.0;
  double d1_ = 0.0;
  bool interior_hit_ = false;
  // Stages after the step start take left limits in t: a lag that reaches t0
  // exactly from below sees phi rather than the jump to x0.
  bool left_limit_ = false;
  bool jump_seen_ = false;

  void check_step(std::vector<std::string>& warnings) const {
    double tau_min = INFINITY;
    bool all_positive_delta = true;
    for (const auto& term : p_.terms()) {
      if (term.tau > 0.0) tau_min = std::min(tau_min, term.tau);
      all_positive_delta = all_positive_delta && term.delta > 0.0;
    }
    if (!std::isfinite(tau_min)) return;
    const double limit = tau_min / 4.0;
    if (H_ > limit) {
      if (all_positive_delta) throw StepTooLarge(H_, limit);
      warnings.push_back("solver step " + format_number(H_) + " exceeds tau_min/4 = " + format_number(limit) +
                         " with a vanishing lag present");
    }
  }

  double completed(double s) const {
    // s in [t0, t_n]
    const std::size_t last = values_.size() - 1;
    if (last == 0) return values_[0];
    double pos = (s - p_.t0()) / H_;
    auto i = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
    if (i >= last) {
      if (s >= p_.t0() + H_ * static_cast<double>(last)) return values_[last];
      i = last - 1;
    }
    const double theta = pos - static_cast<double>(i);
    return hermite(values_[i], slopes_[i], values_[i + 1], left_slopes_[i + 1], H_, theta);
  }

  // x(s) for a stage at time t_stage whose own state estimate is x_stage.
  double history(double s, double t_stage, double x_stage) {
    if (s < p_.t0()) return p_.initial_function().eval(s);
    if (!in_step_ || s <= tn_) return in_step_ ? completed(s) : p_.x0();
    if (s >= t_stage) return x_stage;
    interior_hit_ = true;
    if (!corrected_) return xn_ + (s - tn_) * dn_;
    return hermite(xn_, dn_, x1_, d1_, H_, (s - tn_) / H_);
  }

  double rhs(double t, double x_here) {
    double acc = p_.forcing().eval(t);
    for (const auto& term : p_.terms()) {
      const double b = term.b.eval(t);
      if (b == 0.0) continue;
      const double s = term.h.eval(t);
      if (left_limit_ && s == p_.t0() && term.h.eval(t - 1e-6 * H_) < s)
      {
        acc -= b * p_.initial_function().eval(s);
        jump_seen_ = true;
      }
      else
        acc -= b * history(s, t, x_here);
    }
    return acc;
  }

  void sweep(double& x_next, double& d_left, double& d_right) {
    const double H = H_;
    const double tm = tn_ + 0.5 * H;
    const double t1 = tn_ + H;
    const double k1 = dn_;
    left_limit_ = true;
    const double k2 = rhs(tm, xn_ + 0.5 * H * k1);
    const double k3 = rhs(tm, xn_ + 0.5 * H * k2);
    const double k4 = rhs(t1, xn_ + H * k3);
    left_limit_ = false;
    x_next = xn_ + H / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // Slope at the new node from the dense data available after this sweep.
    x1_ = x_next;
    d1_ = corrected_ ? d1_ : k4;
    const bool was_corrected = corrected_;
    corrected_ = true;
    left_limit_ = true;
    jump_seen_ = false;
    d_left = rhs(t1, x_next);
    left_limit_ = false;
    d_right = jump_seen_ ? rhs(t1, x_next) : d_left;
    corrected_ = was_corrected;
  }

  void advance(std::size_t n) {
    in_step_ = true;
    tn_ = p_.t0() + H_ * static_cast<double>(n);
    xn_ = values_[n];
    dn_ = slopes_[n];
    corrected_ = false;
    interior_hit_ = false;

    double x_next = 0.0;
    double d_left = 0.0;
    double d_right = 0.0;
    sweep(x_next, d_left, d_right);
    if (interior_hit_) {
      for (int pass = 0; pass < 2; ++pass) {
        corrected_ = true;
        x1_ = x_next;
        d1_ = d_left;
        sweep(x_next, d_left, d_right);
      }
    }
    values_.push_back(x_next);
    slopes_.push_back(d_right);
    left_slopes_.push_back(d_left);
    in_step_ = false;
    // Subsequent lookups at or before t_{n+1} use the completed data.
    tn_ = p_.t0() + H_ * static_cast<double>(n + 1);
  }
};

}  // namespace

Trajectory::Trajectory(double t_start, double step, std::vector<double> values,
                       std::vector<double> slopes, Expr initial_function,
                       std::vector<double> left_slopes)
    : t_start_(t_start),
      step_(step),
      values_(std::move(values)),
      slopes_(std::move(slopes)),
      left_slopes_(std::move(left_slopes)),
      phi_(std::move(initial_function)) {
  if (left_slopes_.empty()) left_slopes_ = slopes_;
  if (values_.empty() || values_.size() != slopes_.size() || slopes_.size() != left_slopes_.size())
    throw std::invalid_argument("trajectory needs matching, non-empty values and slopes");
}

double Trajectory::operator()(double t) const {
  if (t < t_start_) return phi_.eval(t);
  const std::size_t last = values_.size() - 1;
  const double pos = (t - t_start_) / step_;
  if (pos > static_cast<double>(last) * (1.0 + 1e-12) + 1e-9)
    throw std::out_of_range("trajectory queried at t = " + format_number(t) + " beyond t_end = " +
                            format_number(t_end()));
  if (last == 0) return values_[0];
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i >= last) {
    if (pos >= static_cast<double>(last)) return values_[last];
    i = last - 1;
  }
  return hermite(values_[i], slopes_[i], values_[i + 1], left_slopes_[i + 1], step_,
                 pos - static_cast<double>(i));
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t,x\n";
  for (std::size_t i = 0; i < values_.size(); ++i) os << format_number(time(i)) << ',' << format_number(values_[i]) << '\n';
}

Trajectory solve(const DDEProblem& p, double t_end, double step) {
  return Integrator(p, t_end, step).run();
}

Trajectory fundamental(const DDEProblem& p, double s, double t_end, double step) {
  if (s < p.t0()) throw std::invalid_argument("fundamental function needs s >= t0");
  DDEProblem homogeneous(p.terms(), Expr::constant(0.0), Expr::constant(0.0), s, 1.0);
  return solve(homogeneous, t_end, step);
}

FundamentalTable::FundamentalTable(const DDEProblem& p, double s_max, double ds, double t_end,
                                   double step)
    : t0_(p.t0()), ds_(ds), s_max_(s_max), t_end_(t_end) {
  if (!(ds > 0.0)) throw std::invalid_argument("table spacing must be positive");
  if (s_max < t0_ || t_end < s_max) throw std::invalid_argument("need t0 <= s_max <= t_end");
  const auto count = static_cast<std::size_t>(std::ceil((s_max - t0_) / ds - 1e-9)) + 1;

  std::vector<std::optional<Trajectory>> slots(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8u));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t j = w; j < count; j += workers) {
          const double s = t0_ + ds_ * static_cast<double>(j);
          if (s < t_end_)
            slots[j] = fundamental(p, s, t_end_, step);
          else
            slots[j] = Trajectory(s, step, {1.0}, {0.0}, Expr::constant(0.0));
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  columns_.reserve(count);
  for (auto& slot : slots) columns_.push_back(std::move(*slot));
}

double FundamentalTable::operator()(double t, double s) const {
  if (t < s) return 0.0;
  if (t == s) return 1.0;
  const double pos = (s - t0_) / ds_;
  auto j = static_cast<std::size_t>(std::max(0.0, std::floor(pos)));
  if (j >= columns_.size()) throw std::out_of_range("s outside the fundamental table");
  auto column_at = [&](std::size_t idx) {
    const Trajectory& col = columns_[idx];
    return t >= col.t_start() ? col(t) : 0.0;
  };
  const double s_left = t0_ + ds_ * static_cast<double>(j);
  const double x_left = column_at(j);
  const double theta = pos - static_cast<double>(j);
  if (theta <= 0.0) return x_left;
  double s_right = s_left + ds_;
  double x_right = 0.0;
  if (s_right > t) {
    s_right = t;
    x_right = 1.0;
  } else {
    if (j + 1 >= columns_.size()) throw std::out_of_range("s outside the fundamental table");
    x_right = column_at(j + 1);
  }
  const double w = (s - s_left) / (s_right - s_left);
  return (1.0 - w) * x_left + w * x_right;
}

namespace {

// Composite trapezoid of g over [a, b] on the nodes a + j*ds plus b.
template <class F>
double trapezoid(double a, double b, double ds, F&& g) {
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  double s_prev = a;
  double g_prev = g(a);
  for (std::size_t j = 1;; ++j) {
    double s = a + ds * static_cast<double>(j);
    const bool last = s >= b - 1e-12 * ds;
    if (last) s = b;
    const double gs = g(s);
    sum += 0.5 * (s - s_prev) * (g_prev + gs);
    if (last) break;
    s_prev = s;
    g_prev = gs;
  }
  return sum;
}

}  // namespace

double reconstruct_via_representation(const DDEProblem& p, const FundamentalTable& X, double t) {
  const double t0 = p.t0();
  double x = X(t, t0) * p.x0();
  for (const auto& term : p.terms()) {
    const double upper = std::min(t0 + term.tau, t);
    x -= trapezoid(t0, upper, X.ds(), [&](double s) {
      const double hs = term.h.eval(s);
      if (hs >= t0) return 0.0;
      const double phi = p.initial_function().eval(hs);
      if (phi == 0.0) return 0.0;
      return X(t, s) * term.b.eval(s) * phi;
    });
  }
  if (p.has_forcing()) {
    x += trapezoid(t0, t, X.ds(), [&](double s) {
      const double fs = p.forcing().eval(s);
      return fs == 0.0 ? 0.0 : X(t, s) * fs;
    });
  }
  return x;
}

}  // namespace ddebound
