#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ddebound/cli.hpp"
#include "ddebound/reproduce.hpp"

using namespace ddebound;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ddebound");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("ddebound_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, std::string_view text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string value_of(const std::string& block, const std::string& key) {
  const auto pos = block.find("\n" + key + " = ");
  if (pos == std::string::npos) return {};
  const auto start = pos + key.size() + 4;
  return block.substr(start, block.find('\n', start) - start);
}

}  // namespace

TEST_CASE("solve writes a trajectory") {
  const auto file = write("ex1.txt", example_source("1"));
  const auto csv = (scratch() / "ex1.csv").string();
  const auto r = cli({"solve", file, "--out", csv});
  REQUIRE(r.code == kExitOk);
  const auto text = read(csv);
  CHECK(text.rfind("t,x\n0,1\n", 0) == 0);
  CHECK(std::stod(value_of("\n" + r.out, "x_end")) < 0.01);

  const auto to_stdout = cli({"solve", file, "--step", "0.05"});
  CHECK(to_stdout.code == kExitOk);
  CHECK(to_stdout.out.rfind("t,x\n", 0) == 0);
}

TEST_CASE("floor-delay solve") {
  const auto file = write("floor.txt", example_source("2a-floor"));
  const auto csv = (scratch() / "floor.csv").string();
  REQUIRE(cli({"solve", file, "--out", csv}).code == kExitOk);
  CHECK(read(csv).find("\n12.566,-4.02") != std::string::npos);
}

TEST_CASE("parse and validation failures") {
  const auto bad = write("bad.txt", "[term]\nb = 2*(1+\nh = t\ntau = 0\n");
  const auto r = cli({"solve", bad});
  CHECK(r.code == kExitParse);
  CHECK(r.err.find("byte") != std::string::npos);

  const auto invalid = write("invalid.txt", "[term]\nb = 1\nh = t-1\ntau = 0.1\n");
  const auto v = cli({"certify", invalid});
  CHECK(v.code == kExitValidation);
  CHECK(v.err.find("tau") != std::string::npos);

  CHECK(cli({"solve", (scratch() / "missing.txt").string()}).code == kExitInvalid);
  CHECK(cli({"reproduce", "9"}).code != kExitOk);
  CHECK(cli({}).code != kExitOk);
}

TEST_CASE("certify the examples") {
  const auto one = cli({"certify", write("c1.txt", example_source("1"))});
  REQUIRE(one.code == kExitOk);
  CHECK(value_of(one.out, "direction") == "decaying");
  CHECK(std::stod(value_of(one.out, "lambda0")) == doctest::Approx(0.159229).epsilon(5e-4 / 0.16));
  CHECK(value_of(one.out, "lambda") == "0.15");
  CHECK(value_of(one.out, "status") == "certified");

  const auto two = cli({"certify", write("c2.txt", example_source("2"))});
  REQUIRE(two.code == kExitOk);
  CHECK(value_of(two.out, "direction") == "growing");
  CHECK(value_of(two.out, "lambda") == "0.8");
  CHECK(std::stod(value_of(two.out, "M0")) < 10);
  CHECK(value_of(two.out, "growth.trivial-growth.lambda") == "2");
  CHECK(std::stod(value_of(two.out, "crossover.trivial")) == doctest::Approx(1.92).epsilon(0.01));

  const auto three = cli({"certify", write("c3.txt", example_source("3"))});
  REQUIRE(three.code == kExitOk);
  CHECK(value_of(three.out, "direction") == "decaying");
  CHECK(value_of(three.out, "classic.holds") == "false");

  const auto searched = cli({"certify", write("c2s.txt", example_source("2")), "--mode", "growth",
                             "--lambda", "0.75"});
  CHECK(searched.code == kExitOk);
  CHECK(value_of(searched.out, "lambda") == "0.75");

  const auto none = cli({"certify", write("c2d.txt", example_source("2")), "--mode", "decay"});
  CHECK(none.code == kExitInvalid);
  CHECK(value_of(none.out, "status") == "none");
}

TEST_CASE("certify is deterministic") {
  const auto file = write("det.txt", example_source("3"));
  CHECK(cli({"certify", file}).out == cli({"certify", file}).out);
}

TEST_CASE("verify a certificate and catch a corrupted one") {
  const auto file = write("ode.txt", "[problem]\nx0 = 1\nt_end = 10\n[term]\nb = 0.5\nh = t\ntau = 0\n"
                                     "[certify]\nlambda = 0.5\nmode = decay\n");
  const auto cert = cli({"certify", file});
  REQUIRE(cert.code == kExitOk);
  CHECK(value_of(cert.out, "M0") == "1");
  const auto good = write("good.cert", cert.out);
  const auto ok = cli({"verify", file, "--cert", good});
  CHECK(ok.code == kExitOk);

  std::string corrupted = cert.out;
  const auto pos = corrupted.find("\nM0 = 1\n");
  REQUIRE(pos != std::string::npos);
  corrupted.replace(pos, 8, "\nM0 = 0.5\n");
  const auto bad = cli({"verify", file, "--cert", write("bad.cert", corrupted)});
  CHECK(bad.code == kExitInvalid);
  CHECK(value_of("\n" + bad.out, "margin_argmin_t") == "0");
  CHECK(value_of("\n" + bad.out, "violation") == "counterexample");

  const auto other = write("other.txt", "[term]\nb = 0.6\nh = t\ntau = 0\n");
  CHECK(cli({"verify", other, "--cert", good}).code == kExitInvalid);
}

TEST_CASE("verify writes figure data") {
  const auto file = write("v2a.txt", example_source("2a"));
  const auto csv = (scratch() / "fig2.csv").string();
  const auto r = cli({"verify", file, "--out", csv});
  CHECK(r.code == kExitOk);
  CHECK(value_of("\n" + r.out, "holds") == "true");
  CHECK(read(csv).rfind("t,abs_x,envelope\n0,1,", 0) == 0);
}
