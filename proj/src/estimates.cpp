#include "ddebound/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddebound/norms.hpp"

namespace ddebound {

const char* to_string(Direction d) { return d == Direction::Decaying ? "decaying" : "growing"; }

const char* to_string(CertificateSource s) {
  switch (s) {
    case CertificateSource::Theorem41: return "decay-transform";
    case CertificateSource::Theorem42: return "decay-root";
    case CertificateSource::Theorem43: return "growth-transform";
    case CertificateSource::Corollary41a: return "growth-product";
    case CertificateSource::TrivialGrowth: return "trivial-growth";
  }
  return "unknown";
}

const char* to_string(RatioBound r) { return r == RatioBound::Factored ? "factored" : "direct"; }

std::optional<double> ConditionValue::margin() const {
  if (!threshold) return std::nullopt;
  return lower_bound ? value - *threshold : *threshold - value;
}

double EnvelopeCertificate::amplitude(double x0_abs, double phi_norm) const {
  double bracket = x0_abs;
  for (double c : init_coeffs) bracket += c * phi_norm;
  return M0 * bracket;
}

double EnvelopeCertificate::envelope(double t, double t0, double x0_abs, double phi_norm,
                                     double forcing_sup) const {
  const double dt = t - t0;
  const double homogeneous = amplitude(x0_abs, phi_norm) * std::exp(rate() * dt);
  if (forcing_sup == 0.0) return homogeneous;
  if (direction == Direction::Decaying) return homogeneous + forcing_coeff * forcing_sup;
  if (lambda == 0.0) return homogeneous + M0 * dt * forcing_sup;
  return homogeneous + std::exp(lambda * dt) * forcing_coeff * forcing_sup;
}

const ConditionValue& EnvelopeCertificate::condition(std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw std::out_of_range("certificate has no condition '" + std::string(name) + "'");
}

std::string HypothesisFailure::describe() const {
  std::ostringstream os;
  os << "hypothesis '" << hypothesis << "' fails: value " << value << " vs threshold "
     << threshold;
  if (!detail.empty()) os << " (" << detail << ")";
  return os.str();
}

BadOutcomeAccess::BadOutcomeAccess(const HypothesisFailure& f)
    : std::logic_error("no value: " + f.describe()) {}

ProblemSamples::ProblemSamples(DDEProblem p, GridSpec g)
    : problem_(std::move(p)), grid_(g), times_(grid_times(problem_.t0(), grid_)) {
  const std::size_t m = problem_.size();
  const std::size_t n = times_.size();
  b_.assign(m, std::vector<double>(n));
  lag_.assign(m, std::vector<double>(n));
  sum_b_.assign(n, 0.0);
  b_norm_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& term = problem_.terms()[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double t = times_[i];
      b_[k][i] = term.b.eval(t);
      lag_[k][i] = t - term.h.eval(t);
      sum_b_[i] += b_[k][i];
    }
    b_norm_[k] = sup_abs(times_, b_[k], grid_).value;
  }
  phi_norm_ = initial_function_norm(problem_, grid_.step);
}

double ProblemSamples::sum_b_norm() const {
  double s = 0.0;
  for (double v : b_norm_) s += v;
  return s;
}

namespace {

std::string term_key(const char* base, std::size_t k) {
  return std::string(base) + "." + std::to_string(k + 1);
}

bool all_lags_zero(const DDEProblem& p) {
  return std::all_of(p.terms().begin(), p.terms().end(),
                     [](const DelayTerm& term) { return term.tau == 0.0; });
}

HypothesisFailure positivity_failure(const char* what, double alpha,
                                     std::span<const double> times,
                                     std::span<const double> values) {
  const auto it = std::min_element(values.begin(), values.end());
  std::ostringstream os;
  os << what << " reaches its minimum at t = " << times[static_cast<std::size_t>(it - values.begin())];
  return HypothesisFailure{"alpha > 0", alpha, 0.0, os.str()};
}

// Shared core of the two transformed-equation tests. sign = +1 for decay,
// -1 for growth.
struct TransformedTerms {
  std::vector<std::vector<double>> a_k;
  std::vector<double> a;
  double alpha = 0.0;
};

TransformedTerms transform(const ProblemSamples& s, double lambda, double sign) {
  const std::size_t m = s.problem().size();
  const std::size_t n = s.times().size();
  TransformedTerms out;
  out.a_k.assign(m, std::vector<double>(n));
  out.a.assign(n, sign * -lambda);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& b = s.b(k);
    const auto& lag = s.lag(k);
    for (std::size_t i = 0; i < n; ++i) {
      out.a_k[k][i] = std::exp(sign * lambda * lag[i]) * b[i];
      out.a[i] += out.a_k[k][i];
    }
  }
  out.alpha = min_deflated(out.a, s.grid());
  return out;
}

Outcome<EnvelopeCertificate> transformed_certificate(const ProblemSamples& s, double lambda,
                                                     Direction dir, CertifyOptions opts) {
  const DDEProblem& p = s.problem();
  const std::size_t m = p.size();
  if (!(lambda > 0.0)) return HypothesisFailure{"lambda > 0", lambda, 0.0, ""};

  const double sign = dir == Direction::Decaying ? 1.0 : -1.0;
  const TransformedTerms tt = transform(s, lambda, sign);
  const bool no_delay = all_lags_zero(p);
  // Without delays the transformed equation integrates exactly and a >= 0 suffices.
  if (no_delay ? tt.alpha < 0.0 : !(tt.alpha > 0.0))
    return positivity_failure("a(t)", tt.alpha, s.times(), tt.a);

  double lead = lambda;
  double factored = 0.0;
  double direct = 0.0;
  double ak_norm_sum = 0.0;
  std::vector<ConditionValue> per_term;
  EnvelopeCertificate cert;
  cert.direction = dir;
  cert.source = dir == Direction::Decaying ? CertificateSource::Theorem41
                                           : CertificateSource::Theorem43;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& term = p.terms()[k];
    // Lag bound entering the exponential weights: tau for decay, delta for growth.
    const double weight = std::exp(sign * lambda * (dir == Direction::Decaying ? term.tau : term.delta));
    lead += weight * s.b_norm(k);
    const double ak_norm = sup_abs(s.times(), tt.a_k[k], s.grid()).value;
    ak_norm_sum += ak_norm;
    per_term.push_back({term_key("b_norm", k), s.b_norm(k), std::nullopt, false});
    if (term.tau > 0.0) {
      const double b_over_a = sup_abs_ratio(s.times(), s.b(k), tt.a, s.grid()).value;
      const double ak_over_a = sup_abs_ratio(s.times(), tt.a_k[k], tt.a, s.grid()).value;
      factored += term.tau * weight * b_over_a;
      direct += term.tau * ak_over_a;
      per_term.push_back({term_key("b_over_a", k), b_over_a, std::nullopt, false});
      per_term.push_back({term_key("ak_over_a", k), ak_over_a, std::nullopt, false});
    }
    cert.init_coeffs.push_back(dir == Direction::Decaying
                                   ? std::expm1(lambda * term.tau) / lambda * s.b_norm(k)
                                   : -std::expm1(-lambda * term.tau) / lambda * s.b_norm(k));
  }
  const double value_factored = lead * factored;
  const double value_direct = lead * direct;
  const double value = opts.ratio == RatioBound::Factored ? value_factored : value_direct;
  const double k0 = (lambda + ak_norm_sum) * direct;
  const char* name = dir == Direction::Decaying ? "M1" : "M2";

  if (!(value < 1.0)) {
    std::ostringstream os;
    os << to_string(opts.ratio) << " ratio bound, lambda = " << lambda;
    return HypothesisFailure{std::string(name) + " < 1", value, 1.0, os.str()};
  }

  cert.lambda = lambda;
  cert.M0 = 1.0 / (1.0 - value);
  cert.forcing_coeff = cert.M0 / lambda;
  cert.alpha = tt.alpha;
  cert.horizon = s.grid().horizon;
  cert.problem_hash = p.fingerprint();
  cert.conditions.push_back({"alpha", tt.alpha, 0.0, true});
  cert.conditions.push_back({name, value, 1.0, false});
  cert.conditions.push_back({std::string(name) + "_factored", value_factored, std::nullopt, false});
  cert.conditions.push_back({std::string(name) + "_direct", value_direct, std::nullopt, false});
  cert.conditions.push_back({"K0", k0, 1.0, false});
  for (auto& c : per_term) cert.conditions.push_back(std::move(c));
  cert.conditions.push_back({"horizon", s.grid().horizon, std::nullopt, false});
  return cert;
}

}  // namespace

Outcome<AuxiliaryBound> auxiliary_bound(const Expr& c, const std::vector<DelayTerm>& d_terms,
                                        double t0, const GridSpec& g) {
  if (d_terms.empty()) throw std::invalid_argument("auxiliary equation needs delay terms");
  const auto times = grid_times(t0, g);
  const std::size_t n = times.size();
  std::vector<double> cv(n);
  std::vector<double> gap(n);  // d - c
  std::vector<std::vector<double>> dk(d_terms.size(), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    cv[i] = c.eval(times[i]);
    gap[i] = -cv[i];
    for (std::size_t k = 0; k < d_terms.size(); ++k) {
      dk[k][i] = d_terms[k].b.eval(times[i]);
      gap[i] += dk[k][i];
    }
  }
  AuxiliaryBound out;
  out.alpha0 = min_deflated(gap, g);
  if (!(out.alpha0 > 0.0)) return positivity_failure("d(t) - c(t)", out.alpha0, times, gap);

  double lead = sup_abs(times, cv, g).value;
  double ratio_sum = 0.0;
  for (std::size_t k = 0; k < d_terms.size(); ++k) {
    lead += sup_abs(times, dk[k], g).value;
    if (d_terms[k].tau > 0.0)
      ratio_sum += d_terms[k].tau * sup_abs_ratio(times, dk[k], gap, g).value;
  }
  out.K0 = lead * ratio_sum;
  if (!(out.K0 < 1.0)) return HypothesisFailure{"K0 < 1", out.K0, 1.0, ""};
  out.K = 1.0 / (1.0 - out.K0);
  return out;
}

Outcome<EnvelopeCertificate> certify_decay_thm41(const ProblemSamples& s, double lambda,
                                                 CertifyOptions opts) {
  return transformed_certificate(s, lambda, Direction::Decaying, opts);
}

Outcome<EnvelopeCertificate> certify_decay_thm41(const DDEProblem& p, double lambda,
                                                 const GridSpec& g, CertifyOptions opts) {
  return certify_decay_thm41(ProblemSamples(p, g), lambda, opts);
}

StabilityCheck certify_decay_cor41(const DDEProblem& p, double lambda0, const GridSpec& g) {
  const ProblemSamples s(p, g);
  StabilityCheck out;
  out.alpha = transform(s, lambda0, 1.0).alpha;
  double weighted = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) weighted += p.terms()[k].tau * s.b_norm(k);
  out.product = s.sum_b_norm() * weighted;
  out.holds = lambda0 > 0.0 && out.alpha > 0.0 && out.product < out.alpha;
  return out;
}

double lambda0_function(const ProblemSamples& s, double lambda) {
  const DDEProblem& p = s.problem();
  const auto& sum = s.sum_b();
  std::vector<double> denom(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    denom[i] = sum[i] - lambda;
    if (!(denom[i] > 0.0)) return INFINITY;
  }
  double lead = lambda;
  double tail = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double tau = p.terms()[k].tau;
    const double w = std::exp(lambda * tau);
    lead += w * s.b_norm(k);
    if (tau > 0.0) tail += tau * w * sup_abs_ratio(s.times(), s.b(k), denom, s.grid()).value;
  }
  return lead * tail;
}

Outcome<Lambda0Result> find_lambda0_thm42(const ProblemSamples& s, double tol) {
  const DDEProblem& p = s.problem();
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& b = s.b(k);
    const auto it = std::min_element(b.begin(), b.end());
    if (*it < 0.0) {
      std::ostringstream os;
      os << "b_" << k + 1 << " takes the value " << *it << " at t = "
         << s.times()[static_cast<std::size_t>(it - b.begin())];
      return HypothesisFailure{"b_k >= 0", *it, 0.0, os.str()};
    }
  }
  Lambda0Result r;
  r.b0 = tail_min(p.t0(), s.times(), s.sum_b(), s.grid());
  if (!(r.b0 > 0.0)) return HypothesisFailure{"liminf sum b_k > 0", r.b0, 0.0, ""};
  r.g_at_zero = lambda0_function(s, 0.0);
  if (!(r.g_at_zero < 1.0))
    return HypothesisFailure{"sum ||b_k|| * sum tau_k ||b_k / sum b_i|| < 1", r.g_at_zero, 1.0, ""};
  r.evaluations.emplace_back(0.0, r.g_at_zero);

  const double near_top = r.b0 * (1.0 - 1e-12);
  const double g_top = lambda0_function(s, near_top);
  r.evaluations.emplace_back(near_top, g_top);
  if (g_top <= 1.0)
    return HypothesisFailure{"g(b0-) > 1 (bracket)", g_top, 1.0,
                             "root equation does not cross 1 below b0 on the scanned grid"};

  double lo = 0.0;
  double hi = r.b0;
  for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double gm = lambda0_function(s, mid);
    r.evaluations.emplace_back(mid, gm);
    if (gm < 1.0)
      lo = mid;
    else
      hi = mid;
  }
  r.lambda0 = 0.5 * (lo + hi);

  auto sorted = r.evaluations;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double prev = sorted[i - 1].second;
    const double cur = sorted[i].second;
    if (std::isinf(prev) && std::isinf(cur)) continue;
    if (!(cur > prev)) r.strictly_increasing = false;
  }
  return r;
}

Outcome<Lambda0Result> find_lambda0_thm42(const DDEProblem& p, const GridSpec& g, double tol) {
  return find_lambda0_thm42(ProblemSamples(p, g), tol);
}

Outcome<EnvelopeCertificate> certify_decay_thm42(const ProblemSamples& s, double tol,
                                                 double fraction, CertifyOptions opts) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("fraction of lambda0 must lie in (0, 1)");
  auto root = find_lambda0_thm42(s, tol);
  if (!root) return root.failure();
  auto cert = certify_decay_thm41(s, fraction * root.value().lambda0, opts);
  if (!cert) return cert;
  auto& c = cert.value();
  c.source = CertificateSource::Theorem42;
  c.conditions.push_back({"lambda0", root.value().lambda0, std::nullopt, false});
  c.conditions.push_back({"b0", root.value().b0, std::nullopt, false});
  c.conditions.push_back({"g0", root.value().g_at_zero, 1.0, false});
  return cert;
}

Outcome<EnvelopeCertificate> certify_growth_thm43(const ProblemSamples& s, double lambda,
                                                  CertifyOptions opts) {
  return transformed_certificate(s, lambda, Direction::Growing, opts);
}

Outcome<EnvelopeCertificate> certify_growth_thm43(const DDEProblem& p, double lambda,
                                                  const GridSpec& g, CertifyOptions opts) {
  return certify_growth_thm43(ProblemSamples(p, g), lambda, opts);
}

Outcome<EnvelopeCertificate> certify_growth_cor41a(const ProblemSamples& s, double lambda) {
  const DDEProblem& p = s.problem();
  if (!(lambda > 0.0)) return HypothesisFailure{"lambda > 0", lambda, 0.0, ""};
  const TransformedTerms tt = transform(s, lambda, -1.0);
  if (!(tt.alpha > 0.0)) return positivity_failure("a(t)", tt.alpha, s.times(), tt.a);

  double lead = lambda;
  double weighted = 0.0;
  EnvelopeCertificate cert;
  cert.direction = Direction::Growing;
  cert.source = CertificateSource::Corollary41a;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& term = p.terms()[k];
    const double w = std::exp(-lambda * term.delta);
    lead += w * s.b_norm(k);
    weighted += term.tau * w * s.b_norm(k);
    cert.init_coeffs.push_back(-std::expm1(-lambda * term.tau) / lambda * s.b_norm(k));
  }
  const double m3 = lead * weighted;
  if (!(m3 < tt.alpha)) {
    std::ostringstream os;
    os << "lambda = " << lambda;
    return HypothesisFailure{"M3 < alpha", m3, tt.alpha, os.str()};
  }
  cert.lambda = lambda;
  cert.alpha = tt.alpha;
  cert.M0 = tt.alpha / (tt.alpha - m3);
  cert.forcing_coeff = cert.M0 / lambda;
  cert.horizon = s.grid().horizon;
  cert.problem_hash = p.fingerprint();
  cert.conditions.push_back({"alpha", tt.alpha, 0.0, true});
  cert.conditions.push_back({"M3", m3, tt.alpha, false});
  for (std::size_t k = 0; k < p.size(); ++k)
    cert.conditions.push_back({term_key("b_norm", k), s.b_norm(k), std::nullopt, false});
  cert.conditions.push_back({"horizon", s.grid().horizon, std::nullopt, false});
  return cert;
}

Outcome<EnvelopeCertificate> certify_growth_cor41a(const DDEProblem& p, double lambda,
                                                   const GridSpec& g) {
  return certify_growth_cor41a(ProblemSamples(p, g), lambda);
}

EnvelopeCertificate trivial_growth_bound(const ProblemSamples& s) {
  const DDEProblem& p = s.problem();
  std::vector<double> total(s.times().size(), 0.0);
  for (std::size_t k = 0; k < p.size(); ++k)
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += std::fabs(s.b(k)[i]);
  const double lambda = sup_abs(s.times(), total, s.grid()).value;

  EnvelopeCertificate cert;
  cert.direction = Direction::Growing;
  cert.source = CertificateSource::TrivialGrowth;
  cert.lambda = lambda;
  cert.M0 = 1.0;
  cert.forcing_coeff = lambda > 0.0 ? 1.0 / lambda : 0.0;
  cert.alpha = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double tau = p.terms()[k].tau;
    const double c = lambda > 0.0 ? -std::expm1(-lambda * tau) / lambda : tau;
    cert.init_coeffs.push_back(c * s.b_norm(k));
  }
  cert.horizon = s.grid().horizon;
  cert.problem_hash = p.fingerprint();
  cert.conditions.push_back({"sum_abs_b", lambda, std::nullopt, false});
  cert.conditions.push_back({"horizon", s.grid().horizon, std::nullopt, false});
  return cert;
}

EnvelopeCertificate trivial_growth_bound(const DDEProblem& p, const GridSpec& g) {
  return trivial_growth_bound(ProblemSamples(p, g));
}

ClassicCheck classic_stability_check(const DDEProblem& p, const GridSpec& g) {
  const ProblemSamples s(p, g);
  ClassicCheck out;
  out.nonnegative = true;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& b = s.b(k);
    if (*std::min_element(b.begin(), b.end()) < 0.0) out.nonnegative = false;
    out.beta.push_back(s.b_norm(k));
    out.weighted_sum += s.b_norm(k) * p.terms()[k].tau;
  }
  out.liminf_sum = tail_min(p.t0(), s.times(), s.sum_b(), g);
  out.holds = out.nonnegative && out.liminf_sum > 0.0 && out.weighted_sum < 1.0;
  return out;
}

Outcome<DecayOptimum> optimize_decay_rate(const ProblemSamples& s, double tol,
                                          CertifyOptions opts) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  auto best = certify_decay_thm41(s, tol, opts);
  if (!best)
    return HypothesisFailure{"feasible lambda exists", tol, 0.0,
                             "no feasible lambda: " + best.failure().describe()};
  double lo = tol;
  double hi = 2.0 * tol;
  for (int i = 0; i < 200; ++i) {
    auto c = certify_decay_thm41(s, hi, opts);
    if (!c) break;
    best = std::move(c);
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto c = certify_decay_thm41(s, mid, opts);
    if (c) {
      best = std::move(c);
      lo = mid;
    } else {
      hi = mid;
    }
  }
  DecayOptimum out{lo, best.value(), std::nullopt};
  for (double factor : {1.25, 1.5, 2.0, 4.0}) {
    if (certify_decay_thm41(s, hi * factor, opts)) {
      out.nonmonotone = std::make_pair(hi, hi * factor);
      break;
    }
  }
  return out;
}

Outcome<EnvelopeCertificate> minimize_growth_rate(const ProblemSamples& s,
                                                  CertificateSource source, double tol,
                                                  CertifyOptions opts) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  auto attempt = [&](double lambda) -> Outcome<EnvelopeCertificate> {
    switch (source) {
      case CertificateSource::Theorem43: return certify_growth_thm43(s, lambda, opts);
      case CertificateSource::Corollary41a: return certify_growth_cor41a(s, lambda);
      default: throw std::invalid_argument("minimize_growth_rate needs a growth test");
    }
  };
  if (auto c = attempt(tol)) return c;

  double lo = tol;
  double hi = std::max(trivial_growth_bound(s).lambda, 2.0 * tol);
  auto best = attempt(hi);
  for (int i = 0; i < 60 && !best; ++i) {
    lo = hi;
    hi *= 2.0;
    best = attempt(hi);
  }
  if (!best) return best.failure();
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto c = attempt(mid);
    if (c) {
      best = std::move(c);
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return best;
}

}  // namespace ddebound
