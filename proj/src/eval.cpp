#include "odeq/eval.hpp"

#include <cmath>

namespace odeq {

namespace {

bool finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

Complex int_pow(Complex z, std::int64_t e) {
  if (e < 0) return Complex(1.0) / int_pow(z, -e);
  Complex acc(1.0);
  while (e > 0) {
    if (e & 1) acc *= z;
    z *= z;
    e >>= 1;
  }
  return acc;
}

// Exact phases for the admitted root indices; avoids trig rounding.
Complex root_phase(int index, int branch) {
  const int k = (branch * 4) / index;  // quarter turns
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

Complex JetSample::coord(JetVar v) const {
  switch (v) {
    case JetVar::X: return x;
    case JetVar::U: return u;
    case JetVar::P: return p;
    case JetVar::Q: return q;
    case JetVar::R: return r;
    case JetVar::A13:
      if (!a13) {
        throw EvalError(EvalErrorKind::MissingA13,
                        "a13 evaluated outside a six-dimensional context");
      }
      return *a13;
  }
  return {};
}

const Evaluator::Entry& Evaluator::eval(const Expr& e) {
  auto it = cache_.find(e.ptr());
  if (it != cache_.end()) return it->second;

  const ExprNode& n = e.node();
  Entry out{Complex(0.0), 0.0};
  switch (n.kind) {
    case ExprKind::Const:
      out.v = Complex(n.cval.as_double());
      break;
    case ExprKind::Var:
      out.v = pt_.coord(n.var);
      break;
    case ExprKind::Param: {
      auto p = params_.find(n.pname);
      if (p == params_.end()) {
        throw EvalError(EvalErrorKind::UnboundParam,
                        "unbound parameter '" + n.pname + "'");
      }
      out.v = p->second;
      break;
    }
    case ExprKind::Sum: {
      Complex acc(0.0);
      for (const auto& k : n.kids) {
        const Entry& ke = eval(k);
        acc += ke.v;
        out.scale = std::max(out.scale, ke.scale);
      }
      out.v = acc;
      break;
    }
    case ExprKind::Product: {
      Complex acc(1.0);
      for (const auto& k : n.kids) {
        const Entry& ke = eval(k);
        acc *= ke.v;
        out.scale = std::max(out.scale, ke.scale);
      }
      out.v = acc;
      break;
    }
    case ExprKind::Power: {
      const Entry& b = eval(n.kids[0]);
      const Entry& x = eval(n.kids[1]);
      out.scale = std::max(b.scale, x.scale);
      const Expr& ex = n.kids[1];
      if (ex.is_const() && ex.node().cval.is_integer() &&
          std::abs(ex.node().cval.num()) <= 1024) {
        const std::int64_t ie = ex.node().cval.num();
        if (b.v == Complex(0.0) && ie < 0) {
          throw EvalError(EvalErrorKind::NonFinite,
                          "zero raised to a negative power");
        }
        out.v = int_pow(b.v, ie);
      } else if (b.v == Complex(0.0)) {
        if (x.v == Complex(0.0)) {
          out.v = Complex(1.0);
        } else if (x.v.real() > 0.0) {
          out.v = Complex(0.0);
        } else {
          throw EvalError(EvalErrorKind::NonFinite,
                          "zero base with non-positive exponent");
        }
      } else {
        out.v = std::pow(b.v, x.v);
      }
      break;
    }
    case ExprKind::Exp: {
      const Entry& a = eval(n.kids[0]);
      out.scale = a.scale;
      out.v = std::exp(a.v);
      break;
    }
    case ExprKind::Root: {
      const Entry& a = eval(n.kids[0]);
      out.scale = a.scale;
      out.v = std::pow(a.v, 1.0 / n.root_index) *
              root_phase(n.root_index, n.root_branch);
      break;
    }
  }
  if (!finite(out.v)) {
    throw EvalError(EvalErrorKind::NonFinite, "non-finite value (pole)");
  }
  out.scale = std::max(out.scale, std::abs(out.v));
  return cache_.emplace(e.ptr(), out).first->second;
}

Complex Evaluator::value(const Expr& e) { return eval(e).v; }

double Evaluator::scale(const Expr& e) { return eval(e).scale; }

Complex evaluate(const Expr& e, const JetSample& pt, const ParamBinding& params) {
  Evaluator ev(pt, params);
  return ev.value(e);
}

}  // namespace odeq
