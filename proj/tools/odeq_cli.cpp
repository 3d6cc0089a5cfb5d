#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "odeq/parser.hpp"
#include "odeq/report.hpp"
#include "odeq/transform.hpp"

namespace {

using namespace odeq;

struct RunConfig {
  std::uint64_t seed = 42;
  int samples = 24;
  double tol = 1e-8;
  std::string format = "text";
  std::vector<std::string> params;
  std::vector<std::string> radical_branches;

  ZeroTestConfig zero_cfg() const {
    ZeroTestConfig cfg;
    cfg.seed = seed;
    cfg.sample_count = samples;
    cfg.tolerance = tol;
    return cfg;
  }

  ParamBinding bindings() const {
    ParamBinding out;
    for (const std::string& spec : params) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) {
        throw CLI::ValidationError("--param", "expected name=value");
      }
      const std::string name = spec.substr(0, eq);
      const std::string value = spec.substr(eq + 1);
      double re = 0, im = 0;
      const auto comma = value.find(',');
      try {
        if (comma == std::string::npos) {
          re = std::stod(value);
        } else {
          re = std::stod(value.substr(0, comma));
          im = std::stod(value.substr(comma + 1));
        }
      } catch (const std::exception&) {
        throw CLI::ValidationError("--param", "bad numeric value: " + value);
      }
      out[name] = Complex(re, im);
    }
    return out;
  }

  std::map<std::string, int> selectors() const {
    std::map<std::string, int> out;
    for (const std::string& spec : radical_branches) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) {
        throw CLI::ValidationError("--radical-branch", "expected NAME=digit");
      }
      out[spec.substr(0, eq)] = std::stoi(spec.substr(eq + 1));
    }
    return out;
  }
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "random seed (default 42)");
  cmd->add_option("--samples", cfg.samples, "sample count (default 24)");
  cmd->add_option("--tol", cfg.tol, "tolerance (default 1e-8)");
  cmd->add_option("--param", cfg.params,
                  "parameter binding name=re[,im] (repeatable)");
  cmd->add_option("--radical-branch", cfg.radical_branches,
                  "radical branch selector, e.g. J6=1 (repeatable)");
}

int run_classify(const std::string& text, const RunConfig& rc) {
  const Expr f = parse_expression(text);
  const BranchReport report =
      classify(f, rc.bindings(), rc.zero_cfg(), rc.selectors());
  std::cout << (rc.format == "structured" ? report.serialize_structured()
                                          : report.serialize_text());
  return report.matched() ? 0 : 2;
}

int run_invariants(const std::string& text, const RunConfig& rc) {
  std::cout << dump_invariants(parse_expression(text), rc.zero_cfg(),
                               rc.bindings());
  return 0;
}

int run_structure(const std::string& text, const RunConfig& rc) {
  std::cout << dump_structure(parse_expression(text), rc.zero_cfg(),
                              rc.bindings(), rc.selectors());
  return 0;
}

int run_verify(const std::string& phi, const std::string& psi,
               const std::string& src, const std::string& tgt,
               const RunConfig& rc) {
  const TransformCandidate t{parse_expression(phi), parse_expression(psi)};
  const VerifyResult res =
      verify_transform(t, parse_expression(src), parse_expression(tgt),
                       rc.zero_cfg(), rc.bindings());
  std::printf("%s  (samples=%d, max|residual|=%.3e, max rel=%.3e)\n",
              res.ok ? "PASS" : "FAIL", res.samples, res.max_abs, res.max_rel);
  return res.ok ? 0 : 2;
}

int run_emit_pde(const std::string& src, const std::string& tgt, bool prop2,
                 const RunConfig& rc) {
  const PdeSystem sys = pde_system_for_pair(
      parse_expression(src), parse_expression(tgt),
      prop2 ? PdeKind::Prop2 : PdeKind::Prop1, rc.zero_cfg(), rc.bindings());
  std::cout << sys.serialize();
  return 0;
}

int run_list_canonical() {
  std::printf("%-40s %-18s %-6s %-8s %s\n", "id", "algebra", "branch",
              "params", "f");
  for (const auto& c : canonical_forms()) {
    std::string params;
    for (const auto& p : c.params) params += (params.empty() ? "" : ",") + p;
    std::printf("%-40s %-18s %-6s %-8s %s\n", c.id.c_str(), c.algebra.c_str(),
                branch_name(c.branch), params.empty() ? "-" : params.c_str(),
                c.f_text.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "odeq: classification of scalar fourth-order ODEs up to point "
      "transformation via Cartan invariant coframes"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string expr_text, phi, psi, f_src, f_tgt;
  bool prop2 = false;

  auto* classify_cmd = app.add_subcommand(
      "classify", "classify an ODE u'''' = f(x,u,p,q,r) and match it against "
                  "the canonical forms");
  classify_cmd->add_option("expr", expr_text, "right-hand side f")->required();
  classify_cmd->add_option("--format", rc.format, "text|structured")
      ->check(CLI::IsMember({"text", "structured"}));
  add_common(classify_cmd, rc);

  auto* invariants_cmd = app.add_subcommand(
      "invariants", "dump the invariant family of f with numeric samples");
  invariants_cmd->add_option("expr", expr_text, "right-hand side f")
      ->required();
  add_common(invariants_cmd, rc);

  auto* structure_cmd = app.add_subcommand(
      "structure", "dump the structure-function fingerprint of f");
  structure_cmd->add_option("expr", expr_text, "right-hand side f")
      ->required();
  add_common(structure_cmd, rc);

  auto* verify_cmd = app.add_subcommand(
      "verify", "verify a point transformation between two ODEs");
  verify_cmd->add_option("phi", phi, "xbar = phi(x,u)")->required();
  verify_cmd->add_option("psi", psi, "ubar = psi(x,u)")->required();
  verify_cmd->add_option("f-src", f_src, "source f")->required();
  verify_cmd->add_option("f-tgt", f_tgt, "target f")->required();
  add_common(verify_cmd, rc);

  auto* emit_cmd = app.add_subcommand(
      "emit-pde",
      "emit the point-transformation PDE system for an equivalent pair");
  emit_cmd->add_option("f-src", f_src, "source f")->required();
  emit_cmd->add_option("f-tgt", f_tgt, "target f")->required();
  emit_cmd->add_flag("--prop2", prop2,
                     "use the six-dimensional system (targets (4/3) r^2/q "
                     "and (5/3) r^2/q)");
  add_common(emit_cmd, rc);

  app.add_subcommand("list-canonical", "list the canonical form database");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify_cmd->parsed()) return run_classify(expr_text, rc);
    if (invariants_cmd->parsed()) return run_invariants(expr_text, rc);
    if (structure_cmd->parsed()) return run_structure(expr_text, rc);
    if (verify_cmd->parsed()) return run_verify(phi, psi, f_src, f_tgt, rc);
    if (emit_cmd->parsed()) return run_emit_pde(f_src, f_tgt, prop2, rc);
    return run_list_canonical();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
