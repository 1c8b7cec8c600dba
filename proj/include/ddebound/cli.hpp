#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ddebound/config.hpp"
#include "ddebound/estimates.hpp"

namespace ddebound {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,     // no certificate, or the envelope is violated
  kExitValidation = 2,  // declared lag bounds do not hold
  kExitParse = 3,
};

struct CertifyRun {
  std::optional<EnvelopeCertificate> certificate;
  std::vector<std::pair<std::string, std::string>> report;  // key, value
};

/// The certify pipeline for one problem file. In auto mode: the classic
/// check, the lambda0 root and a decay certificate below it, a direct decay
/// search, then the growth tests, keeping the valid growth envelope with the
/// smallest rate.
CertifyRun run_certify(const ProblemFile& pf, const CertifySettings& settings);

/// `ddebound solve|certify|verify|reproduce ...`
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ddebound
