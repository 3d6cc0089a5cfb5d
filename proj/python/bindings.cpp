#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "odeq/parser.hpp"
#include "odeq/report.hpp"
#include "odeq/transform.hpp"

namespace py = pybind11;
using namespace odeq;

namespace {

ZeroTestConfig make_cfg(std::uint64_t seed, int samples, double tol) {
  ZeroTestConfig cfg;
  cfg.seed = seed;
  cfg.sample_count = samples;
  cfg.tolerance = tol;
  return cfg;
}

ParamBinding to_binding(const std::map<std::string, Complex>& params) {
  return ParamBinding(params.begin(), params.end());
}

JetVar to_var(const std::string& name) {
  if (name == "x") return JetVar::X;
  if (name == "u") return JetVar::U;
  if (name == "p") return JetVar::P;
  if (name == "q") return JetVar::Q;
  if (name == "r") return JetVar::R;
  if (name == "a13") return JetVar::A13;
  throw std::invalid_argument("unknown jet variable '" + name + "'");
}

py::dict report_to_dict(const BranchReport& r) {
  py::dict out;
  out["input"] = r.input_text;
  out["branch"] = r.branch ? branch_name(*r.branch) : py::str("none");
  out["verdict"] = r.verdict;
  out["matched"] = r.matched_id.empty() ? py::object(py::none())
                                        : py::object(py::str(r.matched_id));
  out["algebra"] = r.matched_algebra;
  out["reason"] = r.outside_reason;
  py::dict params;
  for (const auto& p : r.recovered) params[p.name.c_str()] = p.value;
  out["parameters"] = params;
  py::dict statuses;
  for (const auto& [name, st] : r.statuses) {
    statuses[name.c_str()] =
        st.status == ZeroStatus::Zero ? "Zero" : "NonZero";
  }
  out["invariants"] = statuses;
  if (r.fingerprint) {
    out["fingerprint_constant"] = r.fingerprint->constant;
    out["fingerprint"] = r.fingerprint->serialize();
  }
  out["report"] = r.serialize_text();
  out["report_structured"] = r.serialize_structured();
  return out;
}

}  // namespace

PYBIND11_MODULE(_odeq, m) {
  m.doc() =
      "Classification of scalar fourth-order ODEs u'''' = f(x,u,p,q,r) up to "
      "point transformation via Cartan invariant coframes";

  py::register_exception<ParseError>(m, "ExpressionParseError",
                                     PyExc_ValueError);

  m.def(
      "parse",
      [](const std::string& text) { return parse_expression(text).str(); },
      py::arg("text"),
      "Parse an expression and return its normalized text form.");

  m.def(
      "evaluate",
      [](const std::string& text, Complex x, Complex u, Complex p, Complex q,
         Complex r, const std::map<std::string, Complex>& params) {
        JetSample pt{x, u, p, q, r, std::nullopt};
        return evaluate(parse_expression(text), pt, to_binding(params));
      },
      py::arg("text"), py::arg("x"), py::arg("u"), py::arg("p"), py::arg("q"),
      py::arg("r"), py::arg("params") = std::map<std::string, Complex>{},
      "Evaluate an expression at a complex jet sample.");

  m.def(
      "partial",
      [](const std::string& text, const std::string& var) {
        return partial(parse_expression(text), to_var(var)).str();
      },
      py::arg("text"), py::arg("var"),
      "Symbolic partial derivative with respect to a jet variable.");

  m.def(
      "total_derivative",
      [](const std::string& text, const std::string& f) {
        return total_derivative(parse_expression(text), parse_expression(f))
            .str();
      },
      py::arg("text"), py::arg("f"),
      "Total derivative along solutions of u'''' = f.");

  m.def(
      "is_identically_zero",
      [](const std::string& text, const std::map<std::string, Complex>& params,
         std::uint64_t seed, int samples, double tol) {
        return is_identically_zero(parse_expression(text),
                                   make_cfg(seed, samples, tol),
                                   to_binding(params));
      },
      py::arg("text"), py::arg("params") = std::map<std::string, Complex>{},
      py::arg("seed") = 42, py::arg("samples") = 24, py::arg("tol") = 1e-8,
      "Probabilistic identity-zero test at seeded complex samples.");

  m.def(
      "classify",
      [](const std::string& text, const std::map<std::string, Complex>& params,
         std::uint64_t seed, int samples, double tol) {
        const BranchReport r = classify(parse_expression(text),
                                        to_binding(params),
                                        make_cfg(seed, samples, tol));
        return report_to_dict(r);
      },
      py::arg("text"), py::arg("params") = std::map<std::string, Complex>{},
      py::arg("seed") = 42, py::arg("samples") = 24, py::arg("tol") = 1e-8,
      "Classify an ODE against the canonical forms; returns a report dict.");

  m.def(
      "structure",
      [](const std::string& text, const std::map<std::string, Complex>& params,
         std::uint64_t seed, int samples, double tol) {
        return dump_structure(parse_expression(text),
                              make_cfg(seed, samples, tol),
                              to_binding(params));
      },
      py::arg("text"), py::arg("params") = std::map<std::string, Complex>{},
      py::arg("seed") = 42, py::arg("samples") = 24, py::arg("tol") = 1e-8,
      "Structure-function fingerprint dump.");

  m.def(
      "invariants",
      [](const std::string& text, const std::map<std::string, Complex>& params,
         std::uint64_t seed, int samples, double tol) {
        return dump_invariants(parse_expression(text),
                               make_cfg(seed, samples, tol),
                               to_binding(params));
      },
      py::arg("text"), py::arg("params") = std::map<std::string, Complex>{},
      py::arg("seed") = 42, py::arg("samples") = 24, py::arg("tol") = 1e-8,
      "Invariant family dump with numeric samples.");

  m.def(
      "verify_transform",
      [](const std::string& phi, const std::string& psi,
         const std::string& f_src, const std::string& f_tgt,
         const std::map<std::string, Complex>& params, std::uint64_t seed,
         int samples, double tol) {
        const VerifyResult res = verify_transform(
            {parse_expression(phi), parse_expression(psi)},
            parse_expression(f_src), parse_expression(f_tgt),
            make_cfg(seed, samples, tol), to_binding(params));
        py::dict out;
        out["ok"] = res.ok;
        out["max_abs"] = res.max_abs;
        out["max_rel"] = res.max_rel;
        out["samples"] = res.samples;
        return out;
      },
      py::arg("phi"), py::arg("psi"), py::arg("f_src"), py::arg("f_tgt"),
      py::arg("params") = std::map<std::string, Complex>{},
      py::arg("seed") = 42, py::arg("samples") = 24, py::arg("tol") = 1e-8,
      "Verify a point transformation xbar = phi(x,u), ubar = psi(x,u).");

  m.def(
      "emit_pde_system",
      [](const std::string& f_src, const std::string& f_tgt, bool prop2,
         const std::map<std::string, Complex>& params, std::uint64_t seed,
         int samples, double tol) {
        return pde_system_for_pair(parse_expression(f_src),
                                   parse_expression(f_tgt),
                                   prop2 ? PdeKind::Prop2 : PdeKind::Prop1,
                                   make_cfg(seed, samples, tol),
                                   to_binding(params))
            .serialize();
      },
      py::arg("f_src"), py::arg("f_tgt"), py::arg("prop2") = false,
      py::arg("params") = std::map<std::string, Complex>{},
      py::arg("seed") = 42, py::arg("samples") = 24, py::arg("tol") = 1e-8,
      "Emit the point-transformation PDE system for an equivalent pair.");

  m.def(
      "canonical_forms",
      []() {
        py::list out;
        for (const CanonicalForm& c : canonical_forms()) {
          py::dict d;
          d["id"] = c.id;
          d["algebra"] = c.algebra;
          d["f"] = c.f_text;
          d["branch"] = branch_name(c.branch);
          py::list params;
          for (const auto& p : c.params) params.append(p);
          d["params"] = params;
          out.append(d);
        }
        return out;
      },
      "The canonical form database.");

  m.def("canonical_database_text", &canonical_database_text,
        "The canonical database as its versioned text serialization.");
}
