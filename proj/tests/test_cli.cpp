#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "odeq/canonical.hpp"

#ifndef ODEQ_CLI_PATH
#define ODEQ_CLI_PATH "./odeq"
#endif
#ifndef ODEQ_SOURCE_DIR
#define ODEQ_SOURCE_DIR "."
#endif

namespace {

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(ODEQ_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) {
    out.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("classify exit codes") {
  CHECK(run_cli("classify \"((x*r+3*q)^(4/3)-4*r)/x\"").exit_code == 0);
  CHECK(run_cli("classify 0").exit_code == 2);
  CHECK(run_cli("classify \"r^2+\"").exit_code == 1);
}

TEST_CASE("classify output names the match") {
  const CliResult r =
      run_cli("classify \"((x*r+3*q)^(4/3)-4*r)/x\" --format structured");
  CHECK(r.output.find("match.form = r^(4/3)") != std::string::npos);
  CHECK(r.output.find("branch.tag = T2") != std::string::npos);
}

TEST_CASE("identical invocations produce identical bytes") {
  const std::string cmd =
      "classify \"r^2/q + 4*q*r/p - 6*q^3/p^2\" --format structured";
  const CliResult a = run_cli(cmd);
  const CliResult b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  // A different seed still classifies identically but reports its seed.
  const CliResult c = run_cli(cmd + " --seed 7");
  CHECK(c.exit_code == 0);
  CHECK(c.output.find("config.seed = 7") != std::string::npos);
}

TEST_CASE("structure dump contains the e-structure aliases") {
  const CliResult r = run_cli(
      "structure \"(-24*p*q*r + 18*q^3 + 4*r^2*u)/(-6*p^2 + 3*q*u)\"");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("c8 = -3/8") != std::string::npos);
}

TEST_CASE("structure dump of a T2 member") {
  const CliResult r = run_cli("structure \"exp(r)\"");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("branch = T2") != std::string::npos);
  CHECK(r.output.find("constant = true") != std::string::npos);
}

TEST_CASE("structure dump of r^2 is constant") {
  const CliResult r = run_cli("structure \"r^2\"");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("constant = true") != std::string::npos);
}

TEST_CASE("verify command verdicts") {
  CHECK(run_cli("verify \"1/x\" \"x+u\" \"6*q*((1+p)*r-q^2)/(1+p)^2\" "
                "\"6*q*r/p-6*q^3/p^2\"")
            .exit_code == 0);
  CHECK(run_cli("verify x u \"r^2\" \"r^2\"").exit_code == 0);
  CHECK(run_cli("verify x u \"r^2\" \"exp(r)\"").exit_code == 2);
}

TEST_CASE("invariants dump") {
  const CliResult r = run_cli("invariants \"r^2\"");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("I0 = -2*r") != std::string::npos);
  CHECK(r.output.find("sample[0]") != std::string::npos);
}

TEST_CASE("emit-pde emits the documented equation counts") {
  const CliResult p1 = run_cli(
      "emit-pde \"((x*r+3*q)^(4/3)-4*r)/x\" \"r^(4/3)\"");
  CHECK(p1.exit_code == 0);
  CHECK(p1.output.find("prop1, 17 equations") != std::string::npos);
  CHECK(p1.output.find("D[x] phi = ") != std::string::npos);

  const CliResult p2 = run_cli(
      "emit-pde \"(-24*p*q*r + 18*q^3 + 4*r^2*u)/(-6*p^2 + 3*q*u)\" "
      "\"4/3*r^2/q\" --prop2");
  CHECK(p2.exit_code == 0);
  CHECK(p2.output.find("prop2, 21 equations") != std::string::npos);
  CHECK(p2.output.find("D[x] a13 = ") != std::string::npos);
}

TEST_CASE("list-canonical shows the twelve forms") {
  const CliResult r = run_cli("list-canonical");
  CHECK(r.exit_code == 0);
  int rows = 0;
  std::istringstream lines(r.output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find("(") != std::string::npos) ++rows;
  }
  CHECK(rows >= 12);
  CHECK(r.output.find("(25,5), r=3") != std::string::npos);
  CHECK(r.output.find("exp(r)") != std::string::npos);
  CHECK(r.output.find("(6,6)") != std::string::npos);
}

TEST_CASE("shipped database matches the embedded one") {
  std::ifstream in(std::string(ODEQ_SOURCE_DIR) + "/data/canonical_forms.txt");
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == odeq::canonical_database_text());
}
