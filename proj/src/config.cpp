#include "ddebound/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "ddebound/format.hpp"

namespace ddebound {

ConfigError::ConfigError(const std::string& msg, std::size_t line, std::size_t offset)
    : std::runtime_error("line " + std::to_string(line) + " (byte " + std::to_string(offset) +
                         "): " + msg),
      line_(line),
      offset_(offset) {}

CertifyMode parse_mode(std::string_view s) {
  if (s == "auto") return CertifyMode::Auto;
  if (s == "decay") return CertifyMode::Decay;
  if (s == "growth") return CertifyMode::Growth;
  throw std::invalid_argument("mode must be decay, growth or auto");
}

const char* to_string(CertifyMode m) {
  switch (m) {
    case CertifyMode::Auto: return "auto";
    case CertifyMode::Decay: return "decay";
    case CertifyMode::Growth: return "growth";
  }
  return "auto";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
  std::size_t offset;  // of the value
};

struct Section {
  std::string name;
  std::size_t line;
  std::size_t offset;
  std::vector<Entry> entries;
};

// Splits the document into sections of key/value entries. Entries before the
// first header land in an unnamed section.
std::vector<Section> split_sections(std::string_view text, bool allow_headers) {
  std::vector<Section> out;
  out.push_back({"", 1, 0, {}});
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    ++line_no;
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    const std::size_t line_start = pos;
    pos = nl + 1;
    const auto hash = raw.find('#');
    std::string_view line = trim(raw.substr(0, hash));
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const std::size_t col = static_cast<std::size_t>(line.data() - text.data()) - line_start;
    if (line.front() == '[') {
      if (!allow_headers || line.back() != ']')
        throw ConfigError("malformed section header", line_no, line_start + col);
      out.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no,
                     line_start + col, {}});
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("expected 'key = value'", line_no, line_start + col);
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key", line_no, line_start + col);
      const std::size_t voff =
          value.empty() ? line_start + col + eq + 1
                        : static_cast<std::size_t>(value.data() - text.data());
      out.back().entries.push_back({std::string(key), std::string(value), line_no, voff});
    }
    if (nl == text.size()) break;
  }
  return out;
}

Expr expression(const Entry& e) {
  try {
    return parse(e.value);
  } catch (const ParseError& err) {
    throw ConfigError("'" + e.key + "': " + err.what(), e.line, e.offset + err.offset());
  }
}

double number(const Entry& e) {
  try {
    return parse_constant(e.value);
  } catch (const ParseError& err) {
    throw ConfigError("'" + e.key + "': " + err.what(), e.line, e.offset + err.offset());
  } catch (const std::exception& err) {
    throw ConfigError("'" + e.key + "': " + err.what(), e.line, e.offset);
  }
}

using Handler = std::function<void(const Entry&)>;

void dispatch(const Section& s, const std::map<std::string, Handler>& handlers) {
  std::vector<std::string> seen;
  for (const auto& e : s.entries) {
    const auto it = handlers.find(e.key);
    if (it == handlers.end())
      throw ConfigError("unknown key '" + e.key + "' in [" + s.name + "]", e.line, e.offset);
    if (std::find(seen.begin(), seen.end(), e.key) != seen.end())
      throw ConfigError("duplicate key '" + e.key + "'", e.line, e.offset);
    seen.push_back(e.key);
    it->second(e);
  }
}

}  // namespace

ProblemFile parse_problem_file(std::string_view text) {
  const auto sections = split_sections(text, true);
  if (!sections.front().entries.empty()) {
    const auto& e = sections.front().entries.front();
    throw ConfigError("key '" + e.key + "' outside any section", e.line, e.offset);
  }

  double t0 = 0.0, x0 = 1.0;
  Expr phi = Expr::constant(0.0), f = Expr::constant(0.0);
  std::optional<double> t_end, solver_step;
  std::optional<double> horizon, grid_step, tail_start, margin;
  CertifySettings cert;
  std::vector<DelayTerm> terms;
  std::vector<std::string> singletons;

  for (std::size_t i = 1; i < sections.size(); ++i) {
    const Section& s = sections[i];
    if (s.name != "term") {
      if (std::find(singletons.begin(), singletons.end(), s.name) != singletons.end())
        throw ConfigError("duplicate section [" + s.name + "]", s.line, s.offset);
      singletons.push_back(s.name);
    }
    if (s.name == "problem") {
      dispatch(s, {{"t0", [&](const Entry& e) { t0 = number(e); }},
                   {"x0", [&](const Entry& e) { x0 = number(e); }},
                   {"phi", [&](const Entry& e) { phi = expression(e); }},
                   {"f", [&](const Entry& e) { f = expression(e); }},
                   {"t_end", [&](const Entry& e) { t_end = number(e); }}});
    } else if (s.name == "term") {
      DelayTerm term;
      bool has_b = false, has_h = false, has_tau = false;
      dispatch(s, {{"b", [&](const Entry& e) { term.b = expression(e); has_b = true; }},
                   {"h", [&](const Entry& e) { term.h = expression(e); has_h = true; }},
                   {"delta", [&](const Entry& e) { term.delta = number(e); }},
                   {"tau", [&](const Entry& e) { term.tau = number(e); has_tau = true; }}});
      if (!has_b || !has_h || !has_tau)
        throw ConfigError("[term] needs b, h and tau", s.line, s.offset);
      terms.push_back(std::move(term));
    } else if (s.name == "grid") {
      dispatch(s, {{"horizon", [&](const Entry& e) { horizon = number(e); }},
                   {"step", [&](const Entry& e) { grid_step = number(e); }},
                   {"tail_start", [&](const Entry& e) { tail_start = number(e); }},
                   {"margin", [&](const Entry& e) { margin = number(e); }}});
    } else if (s.name == "solver") {
      dispatch(s, {{"step", [&](const Entry& e) { solver_step = number(e); }}});
    } else if (s.name == "certify") {
      dispatch(s, {{"mode",
                    [&](const Entry& e) {
                      try {
                        cert.mode = parse_mode(e.value);
                      } catch (const std::invalid_argument& err) {
                        throw ConfigError(err.what(), e.line, e.offset);
                      }
                    }},
                   {"lambda", [&](const Entry& e) { cert.lambda = number(e); }},
                   {"tol", [&](const Entry& e) { cert.tol = number(e); }}});
    } else {
      throw ConfigError("unknown section [" + s.name + "]", s.line, s.offset);
    }
  }
  if (terms.empty()) throw ConfigError("at least one [term] is required", 1, 0);

  std::optional<DDEProblem> problem;
  try {
    problem.emplace(std::move(terms), f, phi, t0, x0);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what(), 1, 0);
  }
  ProblemFile out{std::move(*problem), 0.0, {}, 0.0, cert};
  out.grid = default_grid(out.problem);
  if (horizon) {
    out.grid.horizon = *horizon;
    out.grid.tail_start = *horizon / 2.0;
  }
  if (grid_step) out.grid.step = *grid_step;
  if (tail_start) out.grid.tail_start = *tail_start;
  if (margin) out.grid.margin = *margin;
  out.grid.check();
  out.t_end = t_end ? *t_end : t0 + out.grid.horizon;
  out.solver_step = solver_step ? *solver_step : default_solver_step(out.problem);
  if (!(out.t_end > t0)) throw ConfigError("t_end must exceed t0", 1, 0);
  if (!(out.solver_step > 0.0)) throw ConfigError("solver step must be positive", 1, 0);
  return out;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CertificateSource parse_source(const std::string& s) {
  for (auto src : {CertificateSource::Theorem41, CertificateSource::Theorem42,
                   CertificateSource::Theorem43, CertificateSource::Corollary41a,
                   CertificateSource::TrivialGrowth})
    if (s == to_string(src)) return src;
  throw std::invalid_argument("unknown certificate source '" + s + "'");
}

double plain_number(const Entry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw ConfigError("'" + e.key + "' is not a number", e.line, e.offset);
  return v;
}

}  // namespace

ProblemFile load_problem_file(const std::string& path) { return parse_problem_file(read_file(path)); }

void write_certificate(std::ostream& os, const EnvelopeCertificate& cert) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cert.problem_hash));
  os << "direction = " << to_string(cert.direction) << '\n'
     << "source = " << to_string(cert.source) << '\n'
     << "lambda = " << format_number(cert.lambda) << '\n'
     << "M0 = " << format_number(cert.M0) << '\n'
     << "alpha = " << format_number(cert.alpha) << '\n'
     << "forcing_coeff = " << format_number(cert.forcing_coeff) << '\n';
  for (std::size_t k = 0; k < cert.init_coeffs.size(); ++k)
    os << "init_coeff." << k + 1 << " = " << format_number(cert.init_coeffs[k]) << '\n';
  os << "horizon = " << format_number(cert.horizon) << '\n' << "problem_hash = " << hash << '\n';
  for (const auto& c : cert.conditions) {
    os << "condition." << c.name << " = " << format_number(c.value);
    if (c.threshold) os << (c.lower_bound ? " > " : " < ") << format_number(*c.threshold);
    os << '\n';
  }
}

EnvelopeCertificate parse_certificate(std::string_view text) {
  const auto sections = split_sections(text, false);
  EnvelopeCertificate cert;
  bool have_direction = false, have_lambda = false, have_m0 = false, have_hash = false;
  std::map<std::size_t, double> coeffs;
  for (const auto& e : sections.front().entries) {
    try {
      if (e.key == "direction") {
        if (e.value == "decaying")
          cert.direction = Direction::Decaying;
        else if (e.value == "growing")
          cert.direction = Direction::Growing;
        else
          throw ConfigError("direction must be decaying or growing", e.line, e.offset);
        have_direction = true;
      } else if (e.key == "source") {
        cert.source = parse_source(e.value);
      } else if (e.key == "lambda") {
        cert.lambda = plain_number(e);
        have_lambda = true;
      } else if (e.key == "M0") {
        cert.M0 = plain_number(e);
        have_m0 = true;
      } else if (e.key == "alpha") {
        cert.alpha = plain_number(e);
      } else if (e.key == "forcing_coeff") {
        cert.forcing_coeff = plain_number(e);
      } else if (e.key == "horizon") {
        cert.horizon = plain_number(e);
      } else if (e.key == "problem_hash") {
        cert.problem_hash = std::stoull(e.value, nullptr, 16);
        have_hash = true;
      } else if (e.key.rfind("init_coeff.", 0) == 0) {
        const auto k = std::stoul(e.key.substr(11));
        if (k == 0) throw ConfigError("init_coeff index starts at 1", e.line, e.offset);
        coeffs[k] = plain_number(e);
      } else if (e.key.rfind("condition.", 0) == 0) {
        ConditionValue c;
        c.name = e.key.substr(10);
        std::string_view v = e.value;
        const auto op = v.find_first_of("<>");
        Entry num = e;
        if (op != std::string_view::npos) {
          c.lower_bound = v[op] == '>';
          num.value = std::string(trim(v.substr(op + 1)));
          c.threshold = plain_number(num);
          num.value = std::string(trim(v.substr(0, op)));
        }
        c.value = plain_number(num);
        cert.conditions.push_back(std::move(c));
      }
      // Other keys (reports printed alongside the certificate) are ignored.
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& err) {
      throw ConfigError("'" + e.key + "': " + err.what(), e.line, e.offset);
    }
  }
  if (!have_direction || !have_lambda || !have_m0 || !have_hash)
    throw ConfigError("certificate needs direction, lambda, M0 and problem_hash", 1, 0);
  std::size_t expect = 1;
  for (const auto& [k, v] : coeffs) {
    if (k != expect) throw ConfigError("init_coeff indices must be contiguous", 1, 0);
    cert.init_coeffs.push_back(v);
    ++expect;
  }
  return cert;
}

EnvelopeCertificate load_certificate(const std::string& path) {
  return parse_certificate(read_file(path));
}

}  // namespace ddebound
