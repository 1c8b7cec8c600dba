#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ddebound/estimates.hpp"
#include "ddebound/problem.hpp"
#include "ddebound/solver.hpp"

namespace ddebound {

/// The certificate was issued for a different problem.
class ProblemMismatch : public std::invalid_argument {
 public:
  ProblemMismatch(std::uint64_t certificate_hash, std::uint64_t problem_hash);
};

enum class ViolationKind { None, Numerical, Counterexample };

const char* to_string(ViolationKind v);

struct VerificationReport {
  bool holds = true;
  double min_margin = 0.0;  // min over nodes of envelope - |x|
  double margin_argmin_t = 0.0;
  double empirical_rate = 0.0;
  double envelope_rate = 0.0;
  double tightness = 0.0;  // empirical_rate - envelope_rate
  double numerical_tolerance = 0.0;
  ViolationKind violation = ViolationKind::None;
  std::size_t nodes_checked = 0;
  double phi_norm = 0.0;
  std::vector<double> envelope;  // per checked node
};

/// Evaluates the envelope at every trajectory node inside the certificate's
/// scanned horizon, with ||f|| taken as a running maximum over the nodes.
/// Throws ProblemMismatch when the certificate fingerprint differs from p.
VerificationReport check_envelope(const Trajectory& traj, const EnvelopeCertificate& cert,
                                  const DDEProblem& p);

/// Least-squares slope of ln|x| over nodes with t >= from and |x| > 1e-12.
double fit_log_slope(const Trajectory& traj, double from, double to);

/// Where amp_a e^{rate_a (t-t0)} and amp_b e^{rate_b (t-t0)} cross, if at or
/// after t0. Equal rates give t0 for equal amplitudes and no crossing
/// otherwise.
std::optional<double> crossover_time(double amp_a, double rate_a, double amp_b, double rate_b,
                                     double t0);

/// Homogeneous envelopes of two certificates for the same initial data.
std::optional<double> crossover_time(const EnvelopeCertificate& a, const EnvelopeCertificate& b,
                                     double t0, double x0_abs, double phi_norm);

/// `t,abs_x,envelope` rows for the nodes covered by `report`.
void write_figure_csv(std::ostream& os, const Trajectory& traj, const VerificationReport& report);

}  // namespace ddebound
