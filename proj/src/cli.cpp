#include "ddebound/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ddebound/format.hpp"
#include "ddebound/reproduce.hpp"
#include "ddebound/solver.hpp"
#include "ddebound/verify.hpp"

namespace ddebound {

namespace {

using Report = std::vector<std::pair<std::string, std::string>>;

void add(Report& r, std::string key, double v) { r.emplace_back(std::move(key), format_number(v)); }
void add(Report& r, std::string key, std::string v) { r.emplace_back(std::move(key), std::move(v)); }

void add_failure(Report& r, const std::string& prefix, const HypothesisFailure& f) {
  add(r, prefix + ".status", "failed");
  add(r, prefix + ".hypothesis", f.hypothesis);
  add(r, prefix + ".value", f.value);
  add(r, prefix + ".threshold", f.threshold);
  if (!f.detail.empty()) add(r, prefix + ".detail", f.detail);
}

void add_candidate(Report& r, const std::string& prefix, const EnvelopeCertificate& c) {
  add(r, prefix + ".status", "ok");
  add(r, prefix + ".lambda", c.lambda);
  add(r, prefix + ".M0", c.M0);
}

std::optional<EnvelopeCertificate> try_decay(const ProblemSamples& s, const CertifySettings& cs,
                                             Report& r) {
  const auto classic = classic_stability_check(s.problem(), s.grid());
  add(r, "classic.holds", classic.holds ? "true" : "false");
  add(r, "classic.nonnegative", classic.nonnegative ? "true" : "false");
  add(r, "classic.liminf_sum", classic.liminf_sum);
  add(r, "classic.weighted_sum", classic.weighted_sum);

  auto root = find_lambda0_thm42(s, cs.tol);
  if (root) {
    const auto& rv = root.value();
    add(r, "lambda0", rv.lambda0);
    add(r, "lambda0.b0", rv.b0);
    add(r, "lambda0.g0", rv.g_at_zero);
    add(r, "lambda0.strictly_increasing", rv.strictly_increasing ? "true" : "false");
    Outcome<EnvelopeCertificate> c =
        cs.lambda && *cs.lambda < rv.lambda0 ? certify_decay_thm41(s, *cs.lambda)
                                             : certify_decay_thm42(s, cs.tol);
    if (c) {
      c.value().source = CertificateSource::Theorem42;
      add_candidate(r, "decay.root", c.value());
      return c.value();
    }
    add_failure(r, "decay.root", c.failure());
  } else {
    add_failure(r, "lambda0", root.failure());
  }

  if (cs.lambda) {
    auto c = certify_decay_thm41(s, *cs.lambda);
    if (c) {
      add_candidate(r, "decay.direct", c.value());
      return c.value();
    }
    add_failure(r, "decay.direct", c.failure());
  }
  auto best = optimize_decay_rate(s, std::max(cs.tol, 1e-6));
  if (best) {
    add_candidate(r, "decay.search", best.value().certificate);
    if (best.value().nonmonotone) {
      add(r, "decay.search.nonmonotone_fail", best.value().nonmonotone->first);
      add(r, "decay.search.nonmonotone_ok", best.value().nonmonotone->second);
    }
    return best.value().certificate;
  }
  add_failure(r, "decay.search", best.failure());
  return std::nullopt;
}

std::optional<EnvelopeCertificate> try_growth(const ProblemSamples& s, const CertifySettings& cs,
                                              Report& r) {
  std::vector<EnvelopeCertificate> valid;
  const double tol = std::max(cs.tol, 1e-6);
  for (auto src : {CertificateSource::Theorem43, CertificateSource::Corollary41a}) {
    const std::string prefix = std::string("growth.") + to_string(src);
    Outcome<EnvelopeCertificate> c =
        cs.lambda ? (src == CertificateSource::Theorem43 ? certify_growth_thm43(s, *cs.lambda)
                                                         : certify_growth_cor41a(s, *cs.lambda))
                  : minimize_growth_rate(s, src, tol);
    if (c) {
      add_candidate(r, prefix, c.value());
      valid.push_back(c.value());
    } else {
      add_failure(r, prefix, c.failure());
    }
  }
  const auto trivial = trivial_growth_bound(s);
  add_candidate(r, "growth.trivial-growth", trivial);
  valid.push_back(trivial);

  const EnvelopeCertificate* best = &valid.front();
  for (const auto& c : valid)
    if (c.lambda < best->lambda || (c.lambda == best->lambda && c.M0 < best->M0)) best = &c;
  if (best->source != CertificateSource::TrivialGrowth && trivial.lambda > 0.0) {
    const double x0 = std::fabs(s.problem().x0());
    if (x0 > 0.0) {
      const auto t = crossover_time(*best, trivial, s.problem().t0(), x0, s.phi_norm());
      add(r, "crossover.trivial", t ? format_number(*t) : std::string("none"));
    }
  }
  return *best;
}

}  // namespace

CertifyRun run_certify(const ProblemFile& pf, const CertifySettings& cs) {
  CertifyRun run;
  const ProblemSamples s(pf.problem, pf.grid);
  add(run.report, "mode", to_string(cs.mode));
  add(run.report, "grid.horizon", pf.grid.horizon);
  add(run.report, "grid.step", pf.grid.step);
  add(run.report, "grid.margin", pf.grid.margin);
  add(run.report, "phi_norm", s.phi_norm());
  if (cs.mode != CertifyMode::Growth) run.certificate = try_decay(s, cs, run.report);
  if (!run.certificate && cs.mode != CertifyMode::Decay)
    run.certificate = try_growth(s, cs, run.report);
  if (run.certificate) {
    for (const auto& c : run.certificate->conditions)
      if (auto m = c.margin()) add(run.report, "margin." + c.name, *m);
    add(run.report, "amplitude",
        run.certificate->amplitude(std::fabs(pf.problem.x0()), s.phi_norm()));
  }
  return run;
}

namespace {

void print(std::ostream& os, const Report& r) {
  for (const auto& [k, v] : r) os << k << " = " << v << '\n';
}

struct Options {
  std::string file;
  std::string out;
  std::string cert;
  std::string id;
  std::optional<double> step;
  std::optional<double> lambda;
  std::string mode;
  double tol = 1e-9;
};

ProblemFile load(const Options& o) {
  ProblemFile pf = load_problem_file(o.file);
  if (o.step) pf.solver_step = *o.step;
  if (o.lambda) pf.certify.lambda = *o.lambda;
  if (!o.mode.empty()) pf.certify.mode = parse_mode(o.mode);
  pf.certify.tol = o.tol;
  return pf;
}

// Returns false (after reporting) when a declared lag bound fails.
bool validated(const ProblemFile& pf, std::ostream& err) {
  const auto rep = validate(pf.problem, pf.grid);
  if (rep.accepted()) return true;
  err << "validation failed: " << rep.first_violation->describe() << '\n';
  return false;
}

void write_to(const std::string& path, std::ostream& fallback,
              const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  body(f);
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const ProblemFile pf = load(o);
  if (!validated(pf, err)) return kExitValidation;
  const auto traj = solve(pf.problem, pf.t_end, pf.solver_step);
  for (const auto& w : traj.warnings()) err << "warning: " << w << '\n';
  write_to(o.out, out, [&](std::ostream& os) { traj.write_csv(os); });
  if (!o.out.empty() && o.out != "-") {
    out << "nodes = " << traj.size() << '\n'
        << "step = " << format_number(traj.step()) << '\n'
        << "t_end = " << format_number(traj.t_end()) << '\n'
        << "x_end = " << format_number(traj.values().back()) << '\n';
  }
  return kExitOk;
}

int cmd_certify(const Options& o, std::ostream& out, std::ostream& err) {
  const ProblemFile pf = load(o);
  if (!validated(pf, err)) return kExitValidation;
  const auto run = run_certify(pf, pf.certify);
  print(out, run.report);
  if (!run.certificate) {
    out << "status = none\n";
    return kExitInvalid;
  }
  write_certificate(out, *run.certificate);
  out << "status = certified\n";
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const ProblemFile pf = load(o);
  if (!validated(pf, err)) return kExitValidation;
  EnvelopeCertificate cert;
  if (!o.cert.empty()) {
    cert = load_certificate(o.cert);
  } else {
    auto run = run_certify(pf, pf.certify);
    if (!run.certificate) {
      print(out, run.report);
      out << "status = none\n";
      return kExitInvalid;
    }
    cert = *run.certificate;
  }
  const auto traj = solve(pf.problem, pf.t_end, pf.solver_step);
  for (const auto& w : traj.warnings()) err << "warning: " << w << '\n';
  const auto rep = check_envelope(traj, cert, pf.problem);
  if (!o.out.empty()) write_to(o.out, out, [&](std::ostream& os) { write_figure_csv(os, traj, rep); });
  out << "source = " << to_string(cert.source) << '\n'
      << "lambda = " << format_number(cert.lambda) << '\n'
      << "M0 = " << format_number(cert.M0) << '\n'
      << "holds = " << (rep.holds ? "true" : "false") << '\n'
      << "violation = " << to_string(rep.violation) << '\n'
      << "min_margin = " << format_number(rep.min_margin) << '\n'
      << "margin_argmin_t = " << format_number(rep.margin_argmin_t) << '\n'
      << "numerical_tolerance = " << format_number(rep.numerical_tolerance) << '\n'
      << "nodes_checked = " << rep.nodes_checked << '\n'
      << "empirical_rate = " << format_number(rep.empirical_rate) << '\n'
      << "envelope_rate = " << format_number(rep.envelope_rate) << '\n'
      << "tightness = " << format_number(rep.tightness) << '\n';
  return rep.violation == ViolationKind::Counterexample ? kExitInvalid : kExitOk;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  const auto r = reproduce(o.id);
  for (const auto& c : r.checks)
    out << "check." << c.name << " = " << (c.passed ? "PASS" : "FAIL") << " value "
        << format_number(c.value) << " expected " << c.expected << '\n';
  out << "example = " << r.id << '\n' << "status = " << (r.passed() ? "PASS" : "FAIL") << '\n';
  return r.passed() ? kExitOk : kExitInvalid;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exponential envelope certificates for linear delay differential equations",
               "ddebound"};
  app.require_subcommand(1);
  Options o;
  auto mode_check = CLI::IsMember({"decay", "growth", "auto"});

  auto* solve_cmd = app.add_subcommand("solve", "integrate the problem and write t,x CSV");
  solve_cmd->add_option("file", o.file, "problem file")->required();
  solve_cmd->add_option("--out", o.out, "CSV path (default stdout)");
  solve_cmd->add_option("--step", o.step, "solver step");

  auto* cert_cmd = app.add_subcommand("certify", "search for an envelope certificate");
  cert_cmd->add_option("file", o.file, "problem file")->required();
  cert_cmd->add_option("--mode", o.mode, "decay, growth or auto")->check(mode_check);
  cert_cmd->add_option("--lambda", o.lambda, "rate to test instead of searching");
  cert_cmd->add_option("--tol", o.tol, "bisection tolerance")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "check a certificate against a numerical solution");
  verify_cmd->add_option("file", o.file, "problem file")->required();
  verify_cmd->add_option("--cert", o.cert, "certificate produced by certify");
  verify_cmd->add_option("--out", o.out, "t,abs_x,envelope CSV path");
  verify_cmd->add_option("--step", o.step, "solver step");
  verify_cmd->add_option("--mode", o.mode, "decay, growth or auto")->check(mode_check);
  verify_cmd->add_option("--lambda", o.lambda, "rate to test instead of searching");
  verify_cmd->add_option("--tol", o.tol, "bisection tolerance")->capture_default_str();

  auto* repro_cmd = app.add_subcommand("reproduce", "run a built-in example and check its constants");
  repro_cmd->add_option("example", o.id, "1, 1f, 2, 2a, 2a-floor or 3")
      ->required()
      ->check(CLI::IsMember(example_ids()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*solve_cmd) return cmd_solve(o, out, err);
    if (*cert_cmd) return cmd_certify(o, out, err);
    if (*verify_cmd) return cmd_verify(o, out, err);
    return cmd_reproduce(o, out);
  } catch (const ConfigError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ParseError& e) {
    err << "parse error at byte " << e.offset() << ": " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace ddebound
