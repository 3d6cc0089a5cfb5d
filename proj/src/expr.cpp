#include "odeq/expr.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace odeq {

namespace {

constexpr int kPrecSum = 1;
constexpr int kPrecProd = 2;
constexpr int kPrecPow = 3;
constexpr int kPrecAtom = 4;

std::size_t hash_mix(std::size_t h, std::size_t v) {
  v += 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h ^ v;
}

std::size_t node_hash(const ExprNode& n) {
  std::size_t h = hash_mix(0x517cc1b727220a95ull, static_cast<std::size_t>(n.kind));
  switch (n.kind) {
    case ExprKind::Const:
      h = hash_mix(h, static_cast<std::size_t>(n.cval.num()));
      h = hash_mix(h, static_cast<std::size_t>(n.cval.den()));
      break;
    case ExprKind::Var:
      h = hash_mix(h, static_cast<std::size_t>(n.var));
      break;
    case ExprKind::Param:
      h = hash_mix(h, std::hash<std::string>()(n.pname));
      break;
    case ExprKind::Root:
      h = hash_mix(h, static_cast<std::size_t>(n.root_index * 8 + n.root_branch));
      break;
    default:
      break;
  }
  for (const auto& k : n.kids) h = hash_mix(h, k.tree_hash());
  return h;
}

bool node_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Const:
      return a.cval == b.cval;
    case ExprKind::Var:
      return a.var == b.var;
    case ExprKind::Param:
      return a.pname == b.pname;
    case ExprKind::Root:
      if (a.root_index != b.root_index || a.root_branch != b.root_branch)
        return false;
      break;
    default:
      break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (a.kids[i] != b.kids[i]) return false;
  }
  return true;
}

struct InternTable {
  std::mutex mu;
  std::unordered_multimap<std::size_t, std::shared_ptr<const ExprNode>> map;
};

InternTable& intern_table() {
  static InternTable* t = new InternTable;
  return *t;
}

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const {
    return Expr::compare(a, b) < 0;
  }
};

bool is_reserved_word(const std::string& s) {
  return s == "exp" || s == "root" || s == "root2" || s == "root4" ||
         s == "x" || s == "u" || s == "p" || s == "q" || s == "r";
}

}  // namespace

const char* jetvar_name(JetVar v) {
  switch (v) {
    case JetVar::X: return "x";
    case JetVar::U: return "u";
    case JetVar::P: return "p";
    case JetVar::Q: return "q";
    case JetVar::R: return "r";
    case JetVar::A13: return "a13";
  }
  return "?";
}

std::shared_ptr<const ExprNode> Expr::zero_node() {
  static std::shared_ptr<const ExprNode> z = [] {
    ExprNode n;
    n.kind = ExprKind::Const;
    n.cval = Rational(0);
    n.hash = node_hash(n);
    auto p = std::make_shared<const ExprNode>(std::move(n));
    std::lock_guard<std::mutex> lock(intern_table().mu);
    intern_table().map.emplace(p->hash, p);
    return p;
  }();
  return z;
}

Expr Expr::intern(ExprNode&& n) {
  n.hash = node_hash(n);
  n.var_mask = 0;
  n.has_param = false;
  if (n.kind == ExprKind::Var) {
    n.var_mask = 1u << static_cast<int>(n.var);
  } else if (n.kind == ExprKind::Param) {
    n.has_param = true;
  }
  for (const auto& k : n.kids) {
    n.var_mask |= k.node().var_mask;
    n.has_param = n.has_param || k.node().has_param;
  }
  auto& tbl = intern_table();
  std::lock_guard<std::mutex> lock(tbl.mu);
  auto range = tbl.map.equal_range(n.hash);
  for (auto it = range.first; it != range.second; ++it) {
    if (node_equal(*it->second, n)) return Expr(it->second);
  }
  auto p = std::make_shared<const ExprNode>(std::move(n));
  tbl.map.emplace(p->hash, p);
  return Expr(p);
}

Expr Expr::constant(const Rational& r) {
  ExprNode n;
  n.kind = ExprKind::Const;
  n.cval = r;
  return intern(std::move(n));
}

Expr Expr::var(JetVar v) {
  ExprNode n;
  n.kind = ExprKind::Var;
  n.var = v;
  return intern(std::move(n));
}

Expr Expr::param(const std::string& name) {
  if (name.empty() ||
      !std::all_of(name.begin(), name.end(),
                   [](unsigned char c) { return std::isalpha(c); })) {
    throw std::invalid_argument("parameter name must be non-empty letters: '" +
                                name + "'");
  }
  if (is_reserved_word(name)) {
    throw std::invalid_argument("parameter name is reserved: '" + name + "'");
  }
  ExprNode n;
  n.kind = ExprKind::Param;
  n.pname = name;
  return intern(std::move(n));
}

int Expr::compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  const ExprNode& x = a.node();
  const ExprNode& y = b.node();
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  switch (x.kind) {
    case ExprKind::Const:
      if (x.cval == y.cval) return 0;
      return x.cval < y.cval ? -1 : 1;
    case ExprKind::Var:
      return x.var == y.var ? 0 : (x.var < y.var ? -1 : 1);
    case ExprKind::Param:
      return x.pname.compare(y.pname) < 0 ? -1
             : x.pname == y.pname          ? 0
                                           : 1;
    case ExprKind::Root:
      if (x.root_index != y.root_index)
        return x.root_index < y.root_index ? -1 : 1;
      if (x.root_branch != y.root_branch)
        return x.root_branch < y.root_branch ? -1 : 1;
      break;
    default:
      break;
  }
  if (x.kids.size() != y.kids.size())
    return x.kids.size() < y.kids.size() ? -1 : 1;
  for (std::size_t i = 0; i < x.kids.size(); ++i) {
    const int c = compare(x.kids[i], y.kids[i]);
    if (c != 0) return c;
  }
  return 0;
}

bool Expr::operator==(const Expr& o) const {
  if (node_ == o.node_) return true;
  // Interning makes equal trees pointer-equal; keep the structural fallback
  // for nodes created before interning kicked in (none in practice).
  return node_equal(*node_, *o.node_);
}

Expr Expr::sum(std::vector<Expr> terms) {
  Rational c(0);
  std::map<Expr, Rational, ExprLess> collected;
  std::vector<Expr> stack(terms.rbegin(), terms.rend());
  while (!stack.empty()) {
    Expr t = stack.back();
    stack.pop_back();
    const ExprNode& n = t.node();
    if (n.kind == ExprKind::Sum) {
      for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it)
        stack.push_back(*it);
      continue;
    }
    if (n.kind == ExprKind::Const) {
      c = c + n.cval;
      continue;
    }
    Rational coef(1);
    Expr core = t;
    if (n.kind == ExprKind::Product && !n.kids.empty() &&
        n.kids.front().is_const()) {
      coef = n.kids.front().node().cval;
      std::vector<Expr> rest(n.kids.begin() + 1, n.kids.end());
      core = rest.size() == 1 ? rest.front() : product(std::move(rest));
    }
    auto [it, inserted] = collected.emplace(core, coef);
    if (!inserted) it->second = it->second + coef;
  }
  std::vector<Expr> out;
  out.reserve(collected.size() + 1);
  if (!c.is_zero()) out.push_back(constant(c));
  for (const auto& [core, coef] : collected) {
    if (coef.is_zero()) continue;
    if (coef.is_one()) {
      out.push_back(core);
    } else {
      out.push_back(product({constant(coef), core}));
    }
  }
  if (out.empty()) return integer(0);
  if (out.size() == 1) return out.front();
  ExprNode n;
  n.kind = ExprKind::Sum;
  n.kids = std::move(out);
  return intern(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  Rational c(1);
  std::map<Expr, Rational, ExprLess> powers;    // base -> rational exponent
  std::vector<Expr> opaque;                     // powers with symbolic exponent
  std::vector<Expr> stack(factors.rbegin(), factors.rend());
  while (!stack.empty()) {
    Expr f = stack.back();
    stack.pop_back();
    const ExprNode& n = f.node();
    if (n.kind == ExprKind::Product) {
      for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it)
        stack.push_back(*it);
      continue;
    }
    if (n.kind == ExprKind::Const) {
      if (n.cval.is_zero()) return integer(0);
      c = c * n.cval;
      continue;
    }
    Expr base = f;
    Rational e(1);
    if (n.kind == ExprKind::Power && n.kids[1].is_const()) {
      base = n.kids[0];
      e = n.kids[1].node().cval;
    }
    if (n.kind == ExprKind::Power && !n.kids[1].is_const()) {
      opaque.push_back(f);
      continue;
    }
    auto [it, inserted] = powers.emplace(base, e);
    if (!inserted) it->second = it->second + e;
  }
  std::vector<Expr> out;
  out.reserve(powers.size() + opaque.size() + 1);
  for (const auto& [base, e] : powers) {
    if (e.is_zero()) continue;
    out.push_back(pow(base, constant(e)));
  }
  std::sort(opaque.begin(), opaque.end(),
            [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  for (const auto& f : opaque) out.push_back(f);
  // pow() may have folded factors back into constants; sweep them out.
  std::vector<Expr> clean;
  clean.reserve(out.size() + 1);
  for (const auto& f : out) {
    if (f.is_const()) {
      if (f.is_zero()) return integer(0);
      c = c * f.node().cval;
    } else {
      clean.push_back(f);
    }
  }
  if (clean.empty()) return constant(c);
  std::vector<Expr> final_factors;
  final_factors.reserve(clean.size() + 1);
  if (!c.is_one()) final_factors.push_back(constant(c));
  for (auto& f : clean) final_factors.push_back(f);
  if (final_factors.size() == 1) return final_factors.front();
  ExprNode n;
  n.kind = ExprKind::Product;
  n.kids = std::move(final_factors);
  return intern(std::move(n));
}

Expr Expr::pow(const Expr& base, const Expr& exponent) {
  if (exponent.has_jet_vars()) {
    throw std::invalid_argument(
        "power exponents must not contain jet variables");
  }
  if (exponent.is_zero()) return integer(1);
  if (exponent.is_one()) return base;
  if (base.is_one()) return integer(1);
  if (base.is_zero()) {
    if (exponent.is_const()) {
      if (exponent.node().cval.is_negative()) {
        throw std::domain_error("division by exact zero");
      }
      return integer(0);
    }
    // 0^(symbolic exponent): keep, evaluation decides.
  }
  const bool exp_int =
      exponent.is_const() && exponent.node().cval.is_integer();
  if (base.is_const() && exp_int) {
    return constant(base.node().cval.pow(exponent.node().cval.num()));
  }
  if (exp_int) {
    // Integer outer powers are plain repeated products, so these rewrites
    // are exact over the complex domain.
    if (base.kind() == ExprKind::Power) {
      return pow(base.node().kids[0],
                 product({base.node().kids[1], exponent}));
    }
    if (base.kind() == ExprKind::Product) {
      std::vector<Expr> parts;
      parts.reserve(base.node().kids.size());
      for (const auto& k : base.node().kids) parts.push_back(pow(k, exponent));
      return product(std::move(parts));
    }
  }
  ExprNode n;
  n.kind = ExprKind::Power;
  n.kids = {base, exponent};
  return intern(std::move(n));
}

Expr Expr::exp(const Expr& arg) {
  if (arg.is_zero()) return integer(1);
  ExprNode n;
  n.kind = ExprKind::Exp;
  n.kids = {arg};
  return intern(std::move(n));
}

Expr Expr::root(int index, const Expr& radicand, int branch) {
  if (index != 2 && index != 4) {
    throw std::invalid_argument("root index must be 2 or 4");
  }
  if (branch < 0 || branch >= index) {
    throw std::invalid_argument("root branch out of range");
  }
  if (radicand.is_zero()) return integer(0);
  ExprNode n;
  n.kind = ExprKind::Root;
  n.kids = {radicand};
  n.root_index = index;
  n.root_branch = branch;
  return intern(std::move(n));
}

Expr Expr::operator-(const Expr& o) const {
  return sum({*this, product({integer(-1), o})});
}

Expr Expr::operator-() const { return product({integer(-1), *this}); }

Expr Expr::operator/(const Expr& o) const {
  if (o.is_const()) {
    return product({*this, constant(o.node().cval.reciprocal())});
  }
  return product({*this, pow(o, integer(-1))});
}

std::vector<std::string> Expr::param_names() const {
  std::set<std::string> names;
  std::vector<const ExprNode*> stack{node_.get()};
  std::set<const ExprNode*> seen;
  while (!stack.empty()) {
    const ExprNode* n = stack.back();
    stack.pop_back();
    if (!n->has_param || !seen.insert(n).second) continue;
    if (n->kind == ExprKind::Param) names.insert(n->pname);
    for (const auto& k : n->kids) stack.push_back(k.ptr());
  }
  return {names.begin(), names.end()};
}

namespace {

void print_expr(const Expr& e, int parent_prec, std::string& out);

void print_power_parts(const Expr& base, const Rational& expo,
                       std::string& out) {
  print_expr(base, kPrecAtom, out);
  if (expo.is_one()) return;
  out += "^";
  if (expo.is_integer()) {
    out += expo.str();
  } else {
    out += "(" + expo.str() + ")";
  }
}

void print_product(const Expr& e, int parent_prec, std::string& out) {
  const auto& kids = e.node().kids;
  std::string text;
  std::vector<std::pair<Expr, Rational>> nums, dens;
  Rational coef(1);
  for (const auto& f : kids) {
    const ExprNode& n = f.node();
    if (n.kind == ExprKind::Const) {
      coef = coef * n.cval;
      continue;
    }
    if (n.kind == ExprKind::Power && n.kids[1].is_const() &&
        n.kids[1].node().cval.is_negative()) {
      dens.emplace_back(n.kids[0], -n.kids[1].node().cval);
    } else if (n.kind == ExprKind::Power && n.kids[1].is_const()) {
      nums.emplace_back(n.kids[0], n.kids[1].node().cval);
    } else {
      nums.emplace_back(f, Rational(1));
    }
  }
  bool first = true;
  if (coef.num() == -1 && coef.den() == 1 && !nums.empty()) {
    text += "-";
  } else if (!coef.is_one() || nums.empty()) {
    text += coef.str();
    first = false;
  }
  for (const auto& [b, ex] : nums) {
    if (!first) text += "*";
    print_power_parts(b, ex, text);
    first = false;
  }
  for (const auto& [b, ex] : dens) {
    text += "/";
    print_power_parts(b, ex, text);
  }
  const bool needs_parens = parent_prec > kPrecProd;
  out += needs_parens ? "(" + text + ")" : text;
}

void print_expr(const Expr& e, int parent_prec, std::string& out) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Const: {
      const bool neg = n.cval.is_negative();
      const bool frac = !n.cval.is_integer();
      if ((neg && parent_prec > kPrecSum) || (frac && parent_prec > kPrecProd)) {
        out += "(" + n.cval.str() + ")";
      } else {
        out += n.cval.str();
      }
      return;
    }
    case ExprKind::Var:
      out += jetvar_name(n.var);
      return;
    case ExprKind::Param:
      out += n.pname;
      return;
    case ExprKind::Sum: {
      std::string text;
      bool first = true;
      for (const auto& t : n.kids) {
        std::string term;
        print_expr(t, kPrecSum, term);
        if (!first && !term.empty() && term[0] == '-') {
          text += " - " + term.substr(1);
        } else if (!first) {
          text += " + " + term;
        } else {
          text += term;
        }
        first = false;
      }
      out += parent_prec > kPrecSum ? "(" + text + ")" : text;
      return;
    }
    case ExprKind::Product:
      print_product(e, parent_prec, out);
      return;
    case ExprKind::Power: {
      std::string text;
      print_expr(n.kids[0], kPrecAtom, text);
      text += "^";
      const Expr& ex = n.kids[1];
      if (ex.is_const() && ex.node().cval.is_integer()) {
        text += ex.node().cval.str();
      } else {
        std::string et;
        print_expr(ex, kPrecSum, et);
        text += "(" + et + ")";
      }
      out += parent_prec > kPrecPow ? "(" + text + ")" : text;
      return;
    }
    case ExprKind::Exp: {
      std::string at;
      print_expr(n.kids[0], kPrecSum, at);
      out += "exp(" + at + ")";
      return;
    }
    case ExprKind::Root: {
      std::string at;
      print_expr(n.kids[0], kPrecSum, at);
      out += "root" + std::to_string(n.root_index);
      if (n.root_branch != 0) out += "[" + std::to_string(n.root_branch) + "]";
      out += "(" + at + ")";
      return;
    }
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print_expr(*this, 0, out);
  return out;
}

}  // namespace odeq
