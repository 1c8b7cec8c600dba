#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ddebound/estimates.hpp"
#include "ddebound/problem.hpp"

namespace ddebound {

/// Malformed problem or certificate text. `offset` is a byte offset into the
/// whole document.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, std::size_t line, std::size_t offset);
  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

enum class CertifyMode { Auto, Decay, Growth };

CertifyMode parse_mode(std::string_view s);
const char* to_string(CertifyMode m);

struct CertifySettings {
  CertifyMode mode = CertifyMode::Auto;
  std::optional<double> lambda;
  double tol = 1e-9;
};

/// A parsed problem file:
///
///   [problem]  t0, x0, phi, f, t_end
///   [term]     b, h, delta, tau        (one section per delay term)
///   [grid]     horizon, step, tail_start, margin
///   [solver]   step
///   [certify]  mode, lambda, tol
///
/// Lines are `key = value`; `#` starts a comment. Numeric values may be
/// constant expressions such as `1/12` or `4*pi`.
struct ProblemFile {
  DDEProblem problem;
  double t_end = 0.0;
  GridSpec grid;
  double solver_step = 0.0;
  CertifySettings certify;
};

ProblemFile parse_problem_file(std::string_view text);
ProblemFile load_problem_file(const std::string& path);

/// Flat `key = value` block; key order is stable.
void write_certificate(std::ostream& os, const EnvelopeCertificate& cert);
EnvelopeCertificate parse_certificate(std::string_view text);
EnvelopeCertificate load_certificate(const std::string& path);

}  // namespace ddebound
