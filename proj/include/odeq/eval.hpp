#pragma once

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "odeq/expr.hpp"

namespace odeq {

using Complex = std::complex<double>;

/// A complex point of the (prolonged) jet space at which expressions and
/// forms are evaluated. a13 is present only in six-dimensional contexts.
struct JetSample {
  Complex x, u, p, q, r;
  std::optional<Complex> a13;

  Complex coord(JetVar v) const;
};

using ParamBinding = std::map<std::string, Complex>;

enum class EvalErrorKind {
  NonFinite,      // pole, division by zero, zero to a negative power
  UnboundParam,   // parameter without a binding
  MissingA13,     // a13 used outside a six-dimensional context
};

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  EvalErrorKind kind() const { return kind_; }

 private:
  EvalErrorKind kind_;
};

/// Evaluates expressions at a fixed sample with per-subtree memoization.
/// Reuse one evaluator for all expressions sharing a sample so common
/// subtrees are computed once.
class Evaluator {
 public:
  Evaluator(const JetSample& pt, const ParamBinding& params)
      : pt_(pt), params_(params) {}

  Complex value(const Expr& e);
  /// Largest |value| over all subterms of e (including e itself); used to
  /// scale zero-test tolerances.
  double scale(const Expr& e);

 private:
  struct Entry {
    Complex v;
    double scale;
  };
  const Entry& eval(const Expr& e);

  const JetSample& pt_;
  const ParamBinding& params_;
  std::unordered_map<const ExprNode*, Entry> cache_;
};

Complex evaluate(const Expr& e, const JetSample& pt, const ParamBinding& params = {});

}  // namespace odeq
