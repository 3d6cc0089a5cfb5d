#pragma once

#include <map>
#include <string>
#include <unordered_map>

#include "odeq/expr.hpp"

namespace odeq {

/// Simultaneous substitution targets for jet variables and parameters.
struct SubstMap {
  std::map<JetVar, Expr> vars;
  std::map<std::string, Expr> params;
};

/// Shared derivative/substitution cache. Invariant chains differentiate the
/// same subtrees many times over; keeping one context per pipeline keeps the
/// expression DAG compact.
class DiffContext {
 public:
  /// Exact symbolic partial derivative. Radicals differentiate by
  /// d root_k(g) = (1/k) dg root_k(g)^(1-k).
  Expr partial(const Expr& e, JetVar v);

  /// Total derivative along solutions: e_x + p e_u + q e_p + r e_q + f e_r.
  /// Rejects expressions containing a13.
  Expr total(const Expr& e, const Expr& f);

 private:
  std::unordered_map<const ExprNode*, Expr> cache_[6];
};

Expr partial(const Expr& e, JetVar v);
Expr total_derivative(const Expr& e, const Expr& f);

Expr substitute(const Expr& e, const SubstMap& bindings);

/// Explicit rewrite pass: integer powers of formal radicals collapse,
/// root_k(g)^(m*k) -> g^m. Radicals are never collapsed implicitly.
Expr rewrite_radical_powers(const Expr& e);

}  // namespace odeq
