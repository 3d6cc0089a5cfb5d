#include <doctest.h>

#include <cmath>

#include "odeq/classify.hpp"
#include "odeq/parser.hpp"

using namespace odeq;

namespace {

const ZeroTestConfig kCfg;

BranchReport run(const std::string& text, const ParamBinding& params = {}) {
  return classify(parse_expression(text), params, kCfg);
}

bool close(Complex a, Complex b, double tol = 1e-6) {
  return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

}  // namespace

TEST_CASE("worked example: x-dependent power form matches r^(4/3)") {
  const BranchReport r = run("((x*r + 3*q)^(4/3) - 4*r)/x");
  CHECK(r.branch == BranchTag::T2);
  CHECK(r.matched());
  CHECK(r.matched_id == "r^(4/3)");
}

TEST_CASE("worked example: rational form recovers K = 1") {
  const BranchReport r = run("r^2/q + 4*q*r/p - 6*q^3/p^2");
  CHECK(r.branch == BranchTag::T3);
  REQUIRE(r.matched());
  CHECK(r.matched_id == "K*r^2/q");
  REQUIRE(r.recovered.size() == 1);
  CHECK(r.recovered[0].name == "K");
  CHECK(close(r.recovered[0].value, Complex(1.0)));
  REQUIRE(r.fingerprint);
  CHECK(close(r.fingerprint->mean.at(3, 1, 3), Complex(-1.0), 1e-8));
}

TEST_CASE("worked example: six-symmetry rational form") {
  const BranchReport r =
      run("(-24*p*q*r + 18*q^3 + 4*r^2*u)/(-6*p^2 + 3*q*u)");
  CHECK(r.branch == BranchTag::T4);
  REQUIRE(r.matched());
  CHECK(r.matched_id == "(4/3)r^2/q");
}

TEST_CASE("worked example: I4 = 0 form matches the (15,5) K = 0 form") {
  const BranchReport r = run("6*q*((1+p)*r - q^2)/(1+p)^2");
  CHECK(r.branch == BranchTag::T1);
  REQUIRE(r.matched());
  CHECK(r.matched_id == "6qr/p-6q^3/p^2+K(3q^2-2pr)^(3/2)/p^2");
  REQUIRE(r.recovered.size() == 1);
  CHECK(close(r.recovered[0].value, Complex(0.0)));
}

TEST_CASE("zero input is outside the classified scope") {
  const BranchReport r = run("0");
  CHECK_FALSE(r.matched());
  CHECK(r.verdict == "outside-scope");
  CHECK(r.outside_reason.find("I6") != std::string::npos);
}

TEST_CASE("branch exclusivity and round trips over the canonical database") {
  struct Case {
    const char* text;
    ParamBinding params;
    BranchTag tag;
    const char* id;
  };
  const Case cases[] = {
      {"r^(4/3)", {}, BranchTag::T2, "r^(4/3)"},
      {"r^2", {}, BranchTag::T3, "r^2"},
      {"r^(3/2)", {}, BranchTag::T2, "r^(3/2)"},
      {"exp(r)", {}, BranchTag::T2, "exp(r)"},
      {"5/3*r^2/q + q^(5/3)", {}, BranchTag::T3, "(5/3)r^2/q+q^(5/3)"},
      {"4/3*r^2/q + q^(7/3)", {}, BranchTag::T3, "(4/3)r^2/q+q^(7/3)"},
      {"5/3*r^2/q", {}, BranchTag::T4, "(5/3)r^2/q"},
      {"4/3*r^2/q", {}, BranchTag::T4, "(4/3)r^2/q"},
      {"6*q*r/p - 6*q^3/p^2", {}, BranchTag::T1,
       "6qr/p-6q^3/p^2+K(3q^2-2pr)^(3/2)/p^2"},
  };
  for (const Case& c : cases) {
    INFO("f = ", c.text);
    const BranchReport r = run(c.text, c.params);
    CHECK(r.branch == c.tag);
    CHECK(r.matched_id == c.id);
  }
}

TEST_CASE("parameter round trips") {
  SUBCASE("b = 5 in the (b-3)/(b-2) family") {
    const BranchReport r = run("r^(2/3)");
    REQUIRE(r.matched());
    CHECK(r.matched_id == "r^((b-3)/(b-2))");
    REQUIRE(r.recovered.size() == 1);
    CHECK(close(r.recovered[0].value, Complex(5.0)));
  }
  SUBCASE("K = 2 in the (15,5) family") {
    const BranchReport r =
        run("6*q*r/p - 6*q^3/p^2 + 2*(3*q^2 - 2*p*r)^(3/2)/p^2");
    REQUIRE(r.matched());
    CHECK(r.matched_id == "6qr/p-6q^3/p^2+K(3q^2-2pr)^(3/2)/p^2");
    CHECK(close(r.recovered[0].value, Complex(2.0)));
    CHECK(r.recovered[0].roots.size() == 2);
  }
  SUBCASE("K = 2 in K r^2/q") {
    const BranchReport r = run("2*r^2/q");
    REQUIRE(r.matched());
    CHECK(r.matched_id == "K*r^2/q");
    CHECK(close(r.recovered[0].value, Complex(2.0)));
  }
}

TEST_CASE("recover_b and recover_K against the stated relations") {
  const Expr f = parse_expression("r^((b-3)/(b-2))");
  const ParamBinding b5{{"b", Complex(5.0)}};
  const StructureFingerprint fp =
      branch_fingerprint(f, BranchTag::T2, b5, kCfg);
  REQUIRE(fp.constant);
  CHECK(close(recover_b(fp, BVariant::iv), Complex(5.0)));

  const Expr g = parse_expression("r^((1-3*b)/(1-2*b))");
  const ParamBinding b4{{"b", Complex(4.0)}};
  const StructureFingerprint gp =
      branch_fingerprint(g, BranchTag::T2, b4, kCfg);
  REQUIRE(gp.constant);
  CHECK(close(recover_b(gp, BVariant::vi), Complex(4.0)));

  // r^2 sits in the T3 family; the T2 relation refuses it.
  const StructureFingerprint wrong =
      branch_fingerprint(parse_expression("r^2"), BranchTag::T3, {}, kCfg);
  REQUIRE(wrong.constant);
  CHECK_THROWS_AS(recover_b(wrong, BVariant::iv), BranchViolation);

  // T4_25 = -1/8 corresponds to K = +-1.
  StructureFingerprint synth = fp;  // a genuine T2 fingerprint
  synth.mean.set(4, 2, 5, Complex(-0.125));
  const KRecovery k = recover_K(synth, KVariant::T2_v);
  CHECK(close(k.primary, Complex(1.0)));
  REQUIRE(k.roots.size() == 2);
  CHECK(close(k.roots[1], Complex(-1.0)));
  // T3_13 = 1/2 corresponds to K = 2.
  StructureFingerprint synth3 = wrong;
  synth3.mean.set(3, 1, 3, Complex(0.5));
  CHECK(close(recover_K(synth3, KVariant::T3_ii).primary, Complex(2.0)));
}

TEST_CASE("excluded parameter values are rejected at lookup") {
  const CanonicalForm* form = find_canonical("K*r^2/q");
  REQUIRE(form);
  CHECK_THROWS_AS(check_parameter_admissible(*form, Complex(4.0 / 3.0), 1e-8),
                  BranchViolation);
  CHECK_THROWS_AS(
      canonical_fingerprint("r^((b-3)/(b-2))", {{"b", Complex(2.0)}}, kCfg),
      std::runtime_error);
}

TEST_CASE("reports are deterministic and well-formed") {
  const BranchReport a = run("exp(r)");
  const BranchReport b = run("exp(r)");
  CHECK(a.serialize_structured() == b.serialize_structured());
  CHECK(a.serialize_text() == b.serialize_text());
  const std::string s = a.serialize_structured();
  CHECK(s.find("branch.tag = T2") != std::string::npos);
  CHECK(s.find("match.form = exp(r)") != std::string::npos);
  CHECK(s.find("config.seed = 42") != std::string::npos);
  // Keys arrive sorted.
  std::string prev;
  std::istringstream lines(s);
  std::string line;
  while (std::getline(lines, line)) {
    const std::string key = line.substr(0, line.find(" = "));
    CHECK(prev <= key);
    prev = key;
  }
}

TEST_CASE("canonical database document") {
  const std::string text = canonical_database_text();
  CHECK(canonical_forms().size() == 12);
  CHECK(text.find("exp(r)|(25,5), r=3") != std::string::npos);
  CHECK(text.find("(5/3)r^2/q|(6,6)") != std::string::npos);
  // Every stored f parses, and every form lands in its declared branch.
  for (const auto& c : canonical_forms()) {
    CHECK_NOTHROW(c.f());
  }
}
