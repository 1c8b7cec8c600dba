#include "ddebound/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ddebound/format.hpp"
#include "ddebound/norms.hpp"

namespace ddebound {

namespace {

std::string mismatch_message(std::uint64_t c, std::uint64_t p) {
  std::ostringstream os;
  os << "certificate was issued for problem " << std::hex << c << ", not " << p;
  return os.str();
}

}  // namespace

ProblemMismatch::ProblemMismatch(std::uint64_t certificate_hash, std::uint64_t problem_hash)
    : std::invalid_argument(mismatch_message(certificate_hash, problem_hash)) {}

const char* to_string(ViolationKind v) {
  switch (v) {
    case ViolationKind::None: return "none";
    case ViolationKind::Numerical: return "numerical";
    case ViolationKind::Counterexample: return "counterexample";
  }
  return "unknown";
}

double fit_log_slope(const Trajectory& traj, double from, double to) {
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    const double ax = std::fabs(traj.values()[i]);
    if (t < from || t > to || !(ax > 1e-12)) continue;
    const double y = std::log(ax);
    n += 1;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double den = n * stt - st * st;
  if (n < 2 || den == 0.0) return NAN;
  return (n * sty - st * sy) / den;
}

VerificationReport check_envelope(const Trajectory& traj, const EnvelopeCertificate& cert,
                                  const DDEProblem& p) {
  if (cert.problem_hash != p.fingerprint())
    throw ProblemMismatch(cert.problem_hash, p.fingerprint());

  VerificationReport r;
  r.phi_norm = initial_function_norm(p, traj.step());
  const double x0_abs = std::fabs(p.x0());
  const double limit = cert.horizon > 0.0 ? p.t0() + cert.horizon : INFINITY;
  const bool forced = p.has_forcing();
  double f_sup = 0.0;
  double x_max = 0.0;
  r.min_margin = INFINITY;
  double t_last = traj.t_start();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (t > limit * (1.0 + 1e-12) + 1e-12) break;
    if (forced) f_sup = std::max(f_sup, std::fabs(p.forcing().eval(t)));
    const double env = cert.envelope(t, p.t0(), x0_abs, r.phi_norm, f_sup);
    const double ax = std::fabs(traj.values()[i]);
    x_max = std::max(x_max, ax);
    r.envelope.push_back(env);
    const double margin = env - ax;
    if (margin < r.min_margin) {
      r.min_margin = margin;
      r.margin_argmin_t = t;
    }
    t_last = t;
    ++r.nodes_checked;
  }
  r.holds = r.min_margin >= 0.0;
  r.numerical_tolerance = 10.0 * std::pow(traj.step(), 4) * std::max(1.0, x_max);
  if (!r.holds)
    r.violation = -r.min_margin <= r.numerical_tolerance ? ViolationKind::Numerical
                                                        : ViolationKind::Counterexample;
  const double span = t_last - traj.t_start();
  r.empirical_rate = fit_log_slope(traj, t_last - span / 3.0, t_last);
  r.envelope_rate = cert.rate();
  r.tightness = r.empirical_rate - r.envelope_rate;
  return r;
}

std::optional<double> crossover_time(double amp_a, double rate_a, double amp_b, double rate_b,
                                     double t0) {
  if (!(amp_a > 0.0 && amp_b > 0.0))
    throw std::invalid_argument("crossover needs positive amplitudes");
  if (rate_a == rate_b) {
    if (amp_a == amp_b) return t0;
    return std::nullopt;
  }
  const double s = std::log(amp_a / amp_b) / (rate_b - rate_a);
  if (s < 0.0) return std::nullopt;
  return t0 + s;
}

std::optional<double> crossover_time(const EnvelopeCertificate& a, const EnvelopeCertificate& b,
                                     double t0, double x0_abs, double phi_norm) {
  return crossover_time(a.amplitude(x0_abs, phi_norm), a.rate(), b.amplitude(x0_abs, phi_norm),
                        b.rate(), t0);
}

void write_figure_csv(std::ostream& os, const Trajectory& traj, const VerificationReport& report) {
  os << "t,abs_x,envelope\n";
  for (std::size_t i = 0; i < report.envelope.size(); ++i)
    os << format_number(traj.time(i)) << ',' << format_number(std::fabs(traj.values()[i])) << ','
       << format_number(report.envelope[i]) << '\n';
}

}  // namespace ddebound
