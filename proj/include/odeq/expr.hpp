#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "odeq/rational.hpp"

namespace odeq {

/// Third-order jet coordinates plus the prolongation coordinate a13.
enum class JetVar : int { X = 0, U = 1, P = 2, Q = 3, R = 4, A13 = 5 };

const char* jetvar_name(JetVar v);

enum class ExprKind : int {
  Const = 0,
  Var,
  Param,
  Sum,
  Product,
  Power,
  Exp,
  Root,
};

class Expr;

struct ExprNode {
  ExprKind kind;
  Rational cval;            // Const
  JetVar var = JetVar::X;   // Var
  std::string pname;        // Param
  std::vector<Expr> kids;   // Sum/Product children, Power {base, exponent},
                            // Exp {arg}, Root {radicand}
  int root_index = 0;       // Root: 2 or 4
  int root_branch = 0;      // Root: 0 .. root_index-1
  std::size_t hash = 0;
  unsigned var_mask = 0;    // bit i set iff JetVar(i) occurs in the subtree
  bool has_param = false;
};

/// Immutable symbolic expression over jet variables, named parameters,
/// rationals, powers, exponentials and formal radicals. Nodes are interned,
/// so structurally equal trees share storage and compare by pointer.
///
/// Construction applies structural simplification only: sums and products
/// are flattened and sorted, rational constants folded, and syntactically
/// identical factors/terms collected. No gcd or radical simplification.
class Expr {
 public:
  Expr() : node_(zero_node()) {}

  static Expr constant(const Rational& r);
  static Expr integer(std::int64_t n) { return constant(Rational(n)); }
  static Expr rational(std::int64_t n, std::int64_t d) {
    return constant(Rational(n, d));
  }
  static Expr var(JetVar v);
  static Expr param(const std::string& name);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr pow(const Expr& base, const Expr& exponent);
  static Expr exp(const Expr& arg);
  /// Formal index-th root, evaluated as the principal root rotated by
  /// exp(2*pi*i*branch/index). index must be 2 or 4.
  static Expr root(int index, const Expr& radicand, int branch = 0);

  const ExprNode& node() const { return *node_; }
  const ExprNode* ptr() const { return node_.get(); }
  ExprKind kind() const { return node_->kind; }

  bool is_const() const { return node_->kind == ExprKind::Const; }
  bool is_zero() const { return is_const() && node_->cval.is_zero(); }
  bool is_one() const { return is_const() && node_->cval.is_one(); }
  bool contains(JetVar v) const {
    return node_->var_mask & (1u << static_cast<int>(v));
  }
  bool has_jet_vars() const { return node_->var_mask != 0; }
  bool has_params() const { return node_->has_param; }

  /// Sorted list of distinct parameter names in the tree.
  std::vector<std::string> param_names() const;

  bool same(const Expr& o) const { return node_ == o.node_; }
  bool operator==(const Expr& o) const;
  bool operator!=(const Expr& o) const { return !(*this == o); }

  /// Deterministic structural total order (independent of addresses).
  static int compare(const Expr& a, const Expr& b);

  Expr operator+(const Expr& o) const { return sum({*this, o}); }
  Expr operator-(const Expr& o) const;
  Expr operator-() const;
  Expr operator*(const Expr& o) const { return product({*this, o}); }
  Expr operator/(const Expr& o) const;

  /// Round-trippable text form (see the parser for the grammar).
  std::string str() const;

  std::size_t tree_hash() const { return node_->hash; }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  static std::shared_ptr<const ExprNode> zero_node();
  static Expr intern(ExprNode&& n);

  std::shared_ptr<const ExprNode> node_;
};

inline Expr operator*(std::int64_t c, const Expr& e) {
  return Expr::integer(c) * e;
}
inline Expr operator+(std::int64_t c, const Expr& e) {
  return Expr::integer(c) + e;
}
inline Expr operator-(std::int64_t c, const Expr& e) {
  return Expr::integer(c) - e;
}

}  // namespace odeq
