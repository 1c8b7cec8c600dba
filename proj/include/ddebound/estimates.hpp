#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ddebound/expr.hpp"
#include "ddebound/problem.hpp"

namespace ddebound {

enum class Direction { Decaying, Growing };

enum class CertificateSource { Theorem41, Theorem42, Theorem43, Corollary41a, TrivialGrowth };

/// How the ratio norms ||a_k / a|| are bounded. Factored uses
/// e^{+-lambda*lag_bound} ||b_k / a||, which is never smaller than the direct
/// grid value and matches the constants expected by the built-in examples.
enum class RatioBound { Factored, Direct };

const char* to_string(Direction d);
const char* to_string(CertificateSource s);
const char* to_string(RatioBound r);

/// A named number attached to a certificate. When `threshold` is set the
/// hypothesis is value < threshold (or value > threshold for positivity
/// witnesses, see `lower_bound`).
struct ConditionValue {
  std::string name;
  double value = 0.0;
  std::optional<double> threshold;
  bool lower_bound = false;

  /// Signed distance to the threshold, positive when the hypothesis holds.
  std::optional<double> margin() const;
};

/// Explicit exponential envelope for solutions of one problem.
///
/// Decaying: M0 e^{-lambda (t-t0)} [|x0| + sum_k c_k ||phi||] + (M0/lambda) ||f||_{[t0,t]}
/// Growing:  M0 e^{lambda (t-t0)} [|x0| + sum_k c_k ||phi|| + ||f||_{[t0,t]} / lambda]
struct EnvelopeCertificate {
  Direction direction = Direction::Decaying;
  CertificateSource source = CertificateSource::Theorem41;
  double lambda = 0.0;
  double M0 = 1.0;
  std::vector<double> init_coeffs;
  double forcing_coeff = 0.0;  // M0 / lambda
  double alpha = 0.0;
  std::vector<ConditionValue> conditions;
  double horizon = 0.0;
  std::uint64_t problem_hash = 0;

  /// Exponent of the envelope: -lambda when decaying, +lambda when growing.
  double rate() const { return direction == Direction::Decaying ? -lambda : lambda; }

  /// Envelope constant for the homogeneous problem.
  double amplitude(double x0_abs, double phi_norm) const;

  /// forcing_sup is ||f|| over [t0, t].
  double envelope(double t, double t0, double x0_abs, double phi_norm, double forcing_sup) const;

  /// Throws std::out_of_range for an unknown name.
  const ConditionValue& condition(std::string_view name) const;
};

/// A theorem hypothesis that does not hold, with the offending number.
struct HypothesisFailure {
  std::string hypothesis;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;

  std::string describe() const;
};

class BadOutcomeAccess : public std::logic_error {
 public:
  explicit BadOutcomeAccess(const HypothesisFailure& f);
};

template <class T>
class Outcome {
 public:
  Outcome(T value) : v_(std::move(value)) {}
  Outcome(HypothesisFailure failure) : v_(std::move(failure)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const {
    if (!ok()) throw BadOutcomeAccess(failure());
    return std::get<0>(v_);
  }
  T& value() {
    if (!ok()) throw BadOutcomeAccess(failure());
    return std::get<0>(v_);
  }
  const HypothesisFailure& failure() const { return std::get<1>(v_); }

 private:
  std::variant<T, HypothesisFailure> v_;
};

/// Coefficients and lags of a problem sampled once on a grid, shared by the
/// repeated lambda evaluations of the searches below.
class ProblemSamples {
 public:
  ProblemSamples(DDEProblem p, GridSpec g);

  const DDEProblem& problem() const { return problem_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& b(std::size_t k) const { return b_[k]; }
  const std::vector<double>& lag(std::size_t k) const { return lag_[k]; }
  const std::vector<double>& sum_b() const { return sum_b_; }
  double b_norm(std::size_t k) const { return b_norm_[k]; }
  double sum_b_norm() const;
  double phi_norm() const { return phi_norm_; }

 private:
  DDEProblem problem_;
  GridSpec grid_;
  std::vector<double> times_;
  std::vector<std::vector<double>> b_;
  std::vector<std::vector<double>> lag_;
  std::vector<double> sum_b_;
  std::vector<double> b_norm_;
  double phi_norm_ = 0.0;
};

struct CertifyOptions {
  RatioBound ratio = RatioBound::Factored;
};

/// Uniform bound K = (1 - K0)^{-1} on the fundamental function of
/// y' = c(t) y - sum_k d_k(t) y(h_k(t)); d_k lives in DelayTerm::b.
struct AuxiliaryBound {
  double alpha0 = 0.0;  // grid min of d - c
  double K0 = 0.0;
  double K = 1.0;
};

Outcome<AuxiliaryBound> auxiliary_bound(const Expr& c, const std::vector<DelayTerm>& d_terms,
                                        double t0, const GridSpec& g);

Outcome<EnvelopeCertificate> certify_decay_thm41(const ProblemSamples& s, double lambda,
                                                 CertifyOptions opts = {});
Outcome<EnvelopeCertificate> certify_decay_thm41(const DDEProblem& p, double lambda,
                                                 const GridSpec& g, CertifyOptions opts = {});

struct StabilityCheck {
  bool holds = false;
  double alpha = 0.0;
  double product = 0.0;  // sum ||b_k|| * sum tau_k ||b_k||
};

/// Positivity of sum e^{lambda0 lag_k} b_k - lambda0 plus the product test.
StabilityCheck certify_decay_cor41(const DDEProblem& p, double lambda0, const GridSpec& g);

struct Lambda0Result {
  double lambda0 = 0.0;
  double b0 = 0.0;          // liminf of sum b_k
  double g_at_zero = 0.0;
  std::vector<std::pair<double, double>> evaluations;  // (lambda, g(lambda))
  bool strictly_increasing = true;
};

/// Left side of the root equation; +inf once sum b_k - lambda fails to stay
/// positive on the grid.
double lambda0_function(const ProblemSamples& s, double lambda);

/// Bisects the root equation on (0, b0). Requires b_k >= 0, b0 > 0 and
/// g(0) < 1; failures name the violated part.
Outcome<Lambda0Result> find_lambda0_thm42(const ProblemSamples& s, double tol);
Outcome<Lambda0Result> find_lambda0_thm42(const DDEProblem& p, const GridSpec& g, double tol);

/// Certificate at lambda = fraction * lambda0, tagged Theorem42.
Outcome<EnvelopeCertificate> certify_decay_thm42(const ProblemSamples& s, double tol,
                                                 double fraction = 0.95,
                                                 CertifyOptions opts = {});

Outcome<EnvelopeCertificate> certify_growth_thm43(const ProblemSamples& s, double lambda,
                                                  CertifyOptions opts = {});
Outcome<EnvelopeCertificate> certify_growth_thm43(const DDEProblem& p, double lambda,
                                                  const GridSpec& g, CertifyOptions opts = {});

Outcome<EnvelopeCertificate> certify_growth_cor41a(const ProblemSamples& s, double lambda);
Outcome<EnvelopeCertificate> certify_growth_cor41a(const DDEProblem& p, double lambda,
                                                   const GridSpec& g);

/// lambda = sup sum |b_k|, M0 = 1.
EnvelopeCertificate trivial_growth_bound(const ProblemSamples& s);
EnvelopeCertificate trivial_growth_bound(const DDEProblem& p, const GridSpec& g);

struct ClassicCheck {
  bool holds = false;
  bool nonnegative = false;
  double liminf_sum = 0.0;
  double weighted_sum = 0.0;  // sum beta_k tau_k
  std::vector<double> beta;
};

/// 0 <= b_k <= beta_k, liminf sum b_k > 0 and sum beta_k tau_k < 1.
ClassicCheck classic_stability_check(const DDEProblem& p, const GridSpec& g);

struct DecayOptimum {
  double lambda_best = 0.0;
  EnvelopeCertificate certificate;
  /// (failing lambda, larger lambda that succeeded) when feasibility is not a
  /// threshold in lambda.
  std::optional<std::pair<double, double>> nonmonotone;
};

/// Largest lambda (to `tol`) accepted by certify_decay_thm41.
Outcome<DecayOptimum> optimize_decay_rate(const ProblemSamples& s, double tol,
                                          CertifyOptions opts = {});

/// Smallest lambda (to `tol`) accepted by the given growth test, reported at
/// the feasible end of the final bracket.
Outcome<EnvelopeCertificate> minimize_growth_rate(const ProblemSamples& s,
                                                  CertificateSource source, double tol,
                                                  CertifyOptions opts = {});

}  // namespace ddebound
