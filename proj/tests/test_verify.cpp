#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ddebound/verify.hpp"

using namespace ddebound;

namespace {

DDEProblem ode(double b0, double x0, const char* f = "0") {
  return DDEProblem({{parse(std::to_string(b0)), parse("t"), 0, 0}}, parse(f), parse("0"), 0, x0);
}

EnvelopeCertificate envelope_for(const DDEProblem& p, Direction d, double lambda, double m0) {
  EnvelopeCertificate c;
  c.direction = d;
  c.lambda = lambda;
  c.M0 = m0;
  c.forcing_coeff = m0 / lambda;
  c.problem_hash = p.fingerprint();
  return c;
}

}  // namespace

TEST_CASE("log slope fit recovers an exact exponential") {
  const auto p = ode(0.5, 1);
  const auto traj = solve(p, 10, 0.01);
  CHECK(fit_log_slope(traj, 5, 10) == doctest::Approx(-0.5).epsilon(1e-8));
}

TEST_CASE("valid envelope holds") {
  const auto p = ode(0.5, 1);
  const auto traj = solve(p, 10, 0.01);
  const auto rep = check_envelope(traj, envelope_for(p, Direction::Decaying, 0.4, 1.0), p);
  CHECK(rep.holds);
  CHECK(rep.violation == ViolationKind::None);
  CHECK(rep.min_margin == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.margin_argmin_t == 0.0);
  CHECK(rep.empirical_rate == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(rep.envelope_rate == doctest::Approx(-0.4));
  CHECK(rep.tightness == doctest::Approx(-0.1).epsilon(1e-5));
  CHECK(rep.nodes_checked == traj.size());
}

TEST_CASE("halved amplitude is a counterexample") {
  const auto p = ode(0.5, 1);
  const auto traj = solve(p, 10, 0.01);
  const auto rep = check_envelope(traj, envelope_for(p, Direction::Decaying, 0.5, 0.5), p);
  CHECK_FALSE(rep.holds);
  CHECK(rep.violation == ViolationKind::Counterexample);
  CHECK(rep.margin_argmin_t == 0.0);
  CHECK(rep.min_margin == doctest::Approx(-0.5));
}

TEST_CASE("roundoff-level excess is numerical") {
  const auto p = ode(0.5, 1);
  const auto traj = solve(p, 10, 0.01);
  auto c = envelope_for(p, Direction::Decaying, 0.5, 1.0 - 1e-14);
  const auto rep = check_envelope(traj, c, p);
  CHECK_FALSE(rep.holds);
  CHECK(rep.violation == ViolationKind::Numerical);
}

TEST_CASE("forcing uses the running maximum") {
  const auto p = ode(1.0, 0, "t");
  const auto traj = solve(p, 2, 0.01);
  auto c = envelope_for(p, Direction::Decaying, 1.0, 1.0);
  const auto rep = check_envelope(traj, c, p);
  // Envelope at t is |f| sup over [0, t] = t.
  CHECK(rep.envelope[100] == doctest::Approx(1.0));
  CHECK(rep.holds);
}

TEST_CASE("horizon limits the checked nodes") {
  const auto p = ode(0.5, 1);
  const auto traj = solve(p, 10, 0.01);
  auto c = envelope_for(p, Direction::Decaying, 0.5, 1.0);
  c.horizon = 5;
  CHECK(check_envelope(traj, c, p).nodes_checked == 501);
}

TEST_CASE("certificates for other problems are rejected") {
  const auto p = ode(0.5, 1);
  const auto q = ode(0.6, 1);
  const auto traj = solve(p, 1, 0.01);
  CHECK_THROWS_AS(check_envelope(traj, envelope_for(q, Direction::Decaying, 0.5, 1), p),
                  ProblemMismatch);
}

TEST_CASE("crossover times") {
  CHECK(*crossover_time(10, 0.8, 1, 2, 0) == doctest::Approx(std::log(10.0) / 1.2));
  CHECK(*crossover_time(2.6, 0.2, 1, 0.6, 0) == doctest::Approx(2.389).epsilon(5e-4));
  CHECK(*crossover_time(3, 0.5, 3, 0.5, 1.5) == 1.5);
  CHECK_FALSE(crossover_time(3, 0.5, 2, 0.5, 0));
  // Swapping the envelopes yields the same crossing when rates differ.
  CHECK(*crossover_time(1, 2, 10, 0.8, 0) == doctest::Approx(*crossover_time(10, 0.8, 1, 2, 0)));
  CHECK_FALSE(crossover_time(1, 0.8, 10, 2, 0));
}

TEST_CASE("figure csv") {
  const auto p = ode(0.5, 1);
  const auto traj = solve(p, 0.02, 0.01);
  const auto rep = check_envelope(traj, envelope_for(p, Direction::Decaying, 0.4, 2.0), p);
  std::ostringstream os;
  write_figure_csv(os, traj, rep);
  CHECK(os.str().rfind("t,abs_x,envelope\n0,1,2\n0.01,", 0) == 0);
}
