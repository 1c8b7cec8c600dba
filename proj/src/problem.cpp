#include "ddebound/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ddebound/format.hpp"
#include "ddebound/norms.hpp"

namespace ddebound {

namespace {

// Lag comparisons tolerate rounding in expressions such as (2-sin t)/12 whose
// exact maximum equals the declared bound.
double lag_slack(double bound) { return 1e-9 * (1.0 + std::fabs(bound)); }

}  // namespace

DDEProblem::DDEProblem(std::vector<DelayTerm> terms, Expr forcing, Expr initial_function,
                       double t0, double x0)
    : terms_(std::move(terms)),
      forcing_(std::move(forcing)),
      phi_(std::move(initial_function)),
      t0_(t0),
      x0_(x0),
      tau_max_(0.0) {
  if (terms_.empty()) throw std::invalid_argument("problem needs at least one delay term");
  if (!std::isfinite(t0_) || !std::isfinite(x0_))
    throw std::invalid_argument("t0 and x0 must be finite");
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    if (!std::isfinite(term.delta) || !std::isfinite(term.tau))
      throw std::invalid_argument("term " + std::to_string(k + 1) + ": lag bounds must be finite");
    if (term.delta < 0.0 || term.tau < term.delta)
      throw std::invalid_argument("term " + std::to_string(k + 1) +
                                  ": need 0 <= delta <= tau");
    tau_max_ = std::max(tau_max_, term.tau);
  }
}

bool DDEProblem::has_forcing() const {
  return !(forcing_.kind() == Expr::Kind::Constant && forcing_.constant_value() == 0.0);
}

std::string DDEProblem::canonical_text() const {
  std::ostringstream os;
  os << "t0=" << format_number(t0_) << ";x0=" << format_number(x0_) << ";phi=" << phi_.str()
     << ";f=" << forcing_.str();
  for (const auto& term : terms_)
    os << ";term(b=" << term.b.str() << ",h=" << term.h.str() << ",delta=" << format_number(term.delta)
       << ",tau=" << format_number(term.tau) << ")";
  return os.str();
}

std::uint64_t DDEProblem::fingerprint() const {
  // FNV-1a
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : canonical_text()) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

void GridSpec::check() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("grid horizon must be positive");
  if (!(step > 0.0) || !(step < horizon))
    throw std::invalid_argument("grid step must satisfy 0 < step < horizon");
  if (!(tail_start >= 0.0) || !(tail_start < horizon))
    throw std::invalid_argument("grid tail_start must lie in [0, horizon)");
  if (!(margin >= 0.0)) throw std::invalid_argument("grid margin must be non-negative");
}

GridSpec default_grid(const DDEProblem& p) {
  bool trig = p.forcing().uses_trig();
  for (const auto& term : p.terms()) trig = trig || term.b.uses_trig() || term.h.uses_trig();

  GridSpec g;
  g.horizon = std::max({20.0 * p.tau_max(), trig ? 10.0 * 2.0 * std::numbers::pi : 0.0, 100.0});
  g.step = p.tau_max() > 0.0 ? p.tau_max() / 200.0 : 0.01;
  g.tail_start = 0.5 * g.horizon;
  g.margin = 0.0;
  return g;
}

double default_solver_step(const DDEProblem& p) {
  double tau_min = 0.0;
  for (const auto& term : p.terms())
    if (term.tau > 0.0) tau_min = tau_min > 0.0 ? std::min(tau_min, term.tau) : term.tau;
  double step = tau_min > 0.0 ? std::min(tau_min / 20.0, 0.01) : 0.01;
  return std::max(step, 1e-4);
}

std::string BoundViolation::describe() const {
  std::ostringstream os;
  os << "term " << term + 1 << ": lag t-h(t) = " << lag << " at t = " << t
     << (bound == "tau" ? " exceeds declared tau = " : " is below declared delta = ")
     << declared;
  return os.str();
}

ValidationReport validate(const DDEProblem& p, const GridSpec& g) {
  g.check();
  const auto times = grid_times(p.t0(), g);
  ValidationReport report;
  report.terms.resize(p.size());

  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& term = p.terms()[k];
    auto& tr = report.terms[k];
    tr.observed_min_lag = INFINITY;
    tr.observed_max_lag = -INFINITY;
    double bmax = 0.0;
    for (double t : times) {
      const double lag = t - term.h.eval(t);
      tr.observed_min_lag = std::min(tr.observed_min_lag, lag);
      tr.observed_max_lag = std::max(tr.observed_max_lag, lag);
      bmax = std::max(bmax, std::fabs(term.b.eval(t)));

      const bool below = lag < term.delta - lag_slack(term.delta);
      const bool above = lag > term.tau + lag_slack(term.tau);
      if ((below || above) && tr.bounds_hold) {
        tr.bounds_hold = false;
        if (!report.first_violation || t < report.first_violation->t) {
          report.first_violation = BoundViolation{k, t, lag, above ? "tau" : "delta",
                                                  above ? term.tau : term.delta};
        }
      }
    }
    tr.b_norm = (1.0 + g.margin) * bmax;
  }
  return report;
}

}  // namespace ddebound
