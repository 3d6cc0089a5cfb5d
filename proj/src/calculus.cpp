#include "odeq/calculus.hpp"

#include <stdexcept>

namespace odeq {

Expr DiffContext::partial(const Expr& e, JetVar v) {
  if (!e.contains(v)) return Expr::integer(0);
  auto& cache = cache_[static_cast<int>(v)];
  auto it = cache.find(e.ptr());
  if (it != cache.end()) return it->second;

  const ExprNode& n = e.node();
  Expr out;
  switch (n.kind) {
    case ExprKind::Const:
    case ExprKind::Param:
      out = Expr::integer(0);
      break;
    case ExprKind::Var:
      out = Expr::integer(n.var == v ? 1 : 0);
      break;
    case ExprKind::Sum: {
      std::vector<Expr> terms;
      terms.reserve(n.kids.size());
      for (const auto& k : n.kids) terms.push_back(partial(k, v));
      out = Expr::sum(std::move(terms));
      break;
    }
    case ExprKind::Product: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (!n.kids[i].contains(v)) continue;
        std::vector<Expr> factors = n.kids;
        factors[i] = partial(n.kids[i], v);
        terms.push_back(Expr::product(std::move(factors)));
      }
      out = Expr::sum(std::move(terms));
      break;
    }
    case ExprKind::Power: {
      // Exponents never contain jet variables, so only the base varies.
      const Expr& base = n.kids[0];
      const Expr& expo = n.kids[1];
      out = Expr::product(
          {expo, Expr::pow(base, expo - Expr::integer(1)), partial(base, v)});
      break;
    }
    case ExprKind::Exp:
      out = Expr::product({e, partial(n.kids[0], v)});
      break;
    case ExprKind::Root: {
      const Expr& g = n.kids[0];
      out = Expr::product({Expr::rational(1, n.root_index), partial(g, v),
                           Expr::pow(e, Expr::integer(1 - n.root_index))});
      break;
    }
  }
  cache.emplace(e.ptr(), out);
  return out;
}

Expr DiffContext::total(const Expr& e, const Expr& f) {
  if (e.contains(JetVar::A13)) {
    throw std::invalid_argument(
        "total derivative rejects expressions containing a13");
  }
  return partial(e, JetVar::X) + Expr::var(JetVar::P) * partial(e, JetVar::U) +
         Expr::var(JetVar::Q) * partial(e, JetVar::P) +
         Expr::var(JetVar::R) * partial(e, JetVar::Q) +
         f * partial(e, JetVar::R);
}

Expr partial(const Expr& e, JetVar v) {
  DiffContext ctx;
  return ctx.partial(e, v);
}

Expr total_derivative(const Expr& e, const Expr& f) {
  DiffContext ctx;
  return ctx.total(e, f);
}

namespace {

Expr substitute_rec(const Expr& e, const SubstMap& b,
                    std::unordered_map<const ExprNode*, Expr>& cache) {
  const ExprNode& n = e.node();
  if (n.kind == ExprKind::Var) {
    auto it = b.vars.find(n.var);
    return it != b.vars.end() ? it->second : e;
  }
  if (n.kind == ExprKind::Param) {
    auto it = b.params.find(n.pname);
    return it != b.params.end() ? it->second : e;
  }
  if (n.kids.empty()) return e;
  auto hit = cache.find(e.ptr());
  if (hit != cache.end()) return hit->second;

  std::vector<Expr> kids;
  kids.reserve(n.kids.size());
  bool changed = false;
  for (const auto& k : n.kids) {
    kids.push_back(substitute_rec(k, b, cache));
    changed = changed || !kids.back().same(k);
  }
  Expr out = e;
  if (changed) {
    switch (n.kind) {
      case ExprKind::Sum: out = Expr::sum(std::move(kids)); break;
      case ExprKind::Product: out = Expr::product(std::move(kids)); break;
      case ExprKind::Power: out = Expr::pow(kids[0], kids[1]); break;
      case ExprKind::Exp: out = Expr::exp(kids[0]); break;
      case ExprKind::Root:
        out = Expr::root(n.root_index, kids[0], n.root_branch);
        break;
      default: break;
    }
  }
  cache.emplace(e.ptr(), out);
  return out;
}

}  // namespace

Expr substitute(const Expr& e, const SubstMap& bindings) {
  std::unordered_map<const ExprNode*, Expr> cache;
  return substitute_rec(e, bindings, cache);
}

namespace {

Expr rewrite_rec(const Expr& e,
                 std::unordered_map<const ExprNode*, Expr>& cache) {
  const ExprNode& n = e.node();
  if (n.kids.empty()) return e;
  auto hit = cache.find(e.ptr());
  if (hit != cache.end()) return hit->second;

  std::vector<Expr> kids;
  kids.reserve(n.kids.size());
  for (const auto& k : n.kids) kids.push_back(rewrite_rec(k, cache));

  Expr out;
  switch (n.kind) {
    case ExprKind::Sum: out = Expr::sum(std::move(kids)); break;
    case ExprKind::Product: out = Expr::product(std::move(kids)); break;
    case ExprKind::Exp: out = Expr::exp(kids[0]); break;
    case ExprKind::Root:
      out = Expr::root(n.root_index, kids[0], n.root_branch);
      break;
    case ExprKind::Power: {
      out = Expr::pow(kids[0], kids[1]);
      // After reconstruction the base may be a radical with an integer
      // exponent that is a multiple of the root index.
      if (out.kind() == ExprKind::Power) {
        const Expr& base = out.node().kids[0];
        const Expr& expo = out.node().kids[1];
        if (base.kind() == ExprKind::Root && expo.is_const() &&
            expo.node().cval.is_integer()) {
          const std::int64_t m = expo.node().cval.num();
          const int k = base.node().root_index;
          if (m % k == 0) {
            out = Expr::pow(base.node().kids[0], Expr::integer(m / k));
          }
        }
      }
      break;
    }
    default:
      out = e;
      break;
  }
  cache.emplace(e.ptr(), out);
  return out;
}

}  // namespace

Expr rewrite_radical_powers(const Expr& e) {
  std::unordered_map<const ExprNode*, Expr> cache;
  return rewrite_rec(e, cache);
}

}  // namespace odeq
