#include "odeq/canonical.hpp"

#include <mutex>
#include <sstream>
#include <unordered_map>

#include "odeq/parser.hpp"

namespace odeq {

namespace {

std::vector<CanonicalForm> build_database() {
  auto form = [](std::string id, std::string algebra, std::string f,
                 BranchTag branch) {
    CanonicalForm c;
    c.id = std::move(id);
    c.algebra = std::move(algebra);
    c.f_text = std::move(f);
    c.branch = branch;
    return c;
  };

  std::vector<CanonicalForm> db;

  CanonicalForm c = form("r^(4/3)", "(24,5), alpha=0", "r^(4/3)", BranchTag::T2);
  c.scaling = ScalingMap{"x", "u/K^3", "K*r^(4/3)"};
  db.push_back(c);

  c = form("r^((b-3)/(b-2))", "(24,5), alpha=b+1", "r^((b-3)/(b-2))",
           BranchTag::T2);
  c.params = {"b"};
  c.excluded = {Rational(1), Rational(2), Rational(3)};
  c.scaling = ScalingMap{"x/K", "u/K^3", "K*r^((b-3)/(b-2))"};
  db.push_back(c);

  c = form("r^2", "(24,5), alpha=2", "r^2", BranchTag::T3);
  c.scaling = ScalingMap{"x", "u/K", "K*r^2"};
  db.push_back(c);

  c = form("r^(3/2)", "(24,5), alpha=1", "r^(3/2)", BranchTag::T2);
  c.scaling = ScalingMap{"x", "u/K^2", "K*r^(3/2)"};
  db.push_back(c);

  c = form("r^((1-3b)/(1-2b))", "(24,5), alpha=(b+1)/b", "r^((1-3*b)/(1-2*b))",
           BranchTag::T2);
  c.params = {"b"};
  c.excluded = {Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)};
  c.scaling = ScalingMap{"K^2*x", "K^(3/b)*u", "K*r^((1-3*b)/(1-2*b))"};
  db.push_back(c);

  c = form("(5/3)r^2/q+q^(5/3)", "(5,5)", "5/3*r^2/q + q^(5/3)", BranchTag::T3);
  c.scaling = ScalingMap{"x", "K^(-3/2)*u", "5/3*r^2/q + K*q^(5/3)"};
  db.push_back(c);

  c = form("(4/3)r^2/q+q^(7/3)", "(27,5), r=1", "4/3*r^2/q + q^(7/3)",
           BranchTag::T3);
  c.scaling = ScalingMap{"x", "K^(-3/4)*u", "4/3*r^2/q + K*q^(7/3)"};
  db.push_back(c);

  c = form("6qr/p-6q^3/p^2+K(3q^2-2pr)^(3/2)/p^2", "(15,5)",
           "6*q*r/p - 6*q^3/p^2 + K*(3*q^2 - 2*p*r)^(3/2)/p^2", BranchTag::T2);
  c.params = {"K"};  // K = 0 drops to the I4 = 0 branch
  db.push_back(c);

  c = form("exp(r)", "(25,5), r=3", "exp(r)", BranchTag::T2);
  c.scaling = ScalingMap{"-6*x/K", "1296*u/K^3", "K*exp(-r/6)"};
  db.push_back(c);

  c = form("K*r^2/q", "(26,5), r=1", "K*r^2/q", BranchTag::T3);
  c.params = {"K"};
  c.excluded = {Rational(0), Rational(4, 3), Rational(5, 3)};
  db.push_back(c);

  db.push_back(form("(5/3)r^2/q", "(6,6)", "5/3*r^2/q", BranchTag::T4));
  db.push_back(form("(4/3)r^2/q", "(28,6), r=1", "4/3*r^2/q", BranchTag::T4));
  return db;
}

}  // namespace

Expr CanonicalForm::f() const { return parse_expression(f_text); }

const std::vector<CanonicalForm>& canonical_forms() {
  static const std::vector<CanonicalForm>* db =
      new std::vector<CanonicalForm>(build_database());
  return *db;
}

const CanonicalForm* find_canonical(const std::string& id) {
  for (const auto& c : canonical_forms()) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string canonical_database_text() {
  std::ostringstream out;
  out << "# odeq canonical forms v1\n";
  out << "# id|algebra|f|branch|params|excluded|phi;psi|kform\n";
  for (const auto& c : canonical_forms()) {
    out << c.id << '|' << c.algebra << '|' << c.f_text << '|'
        << branch_name(c.branch) << '|';
    for (std::size_t i = 0; i < c.params.size(); ++i) {
      out << (i ? "," : "") << c.params[i];
    }
    out << '|';
    for (std::size_t i = 0; i < c.excluded.size(); ++i) {
      out << (i ? "," : "") << c.excluded[i].str();
    }
    out << '|';
    if (c.scaling) out << c.scaling->phi << ';' << c.scaling->psi;
    out << '|';
    if (c.scaling) out << c.scaling->k_form;
    out << '\n';
  }
  return out.str();
}

void check_parameter_admissible(const CanonicalForm& form, const Complex& value,
                                double tol) {
  for (const Rational& bad : form.excluded) {
    if (std::abs(value - Complex(bad.as_double())) < tol) {
      throw BranchViolation("parameter value " + bad.str() +
                            " is excluded for canonical form " + form.id);
    }
  }
}

StructureFingerprint branch_fingerprint(const Expr& f, BranchTag tag,
                                        const ParamBinding& params,
                                        const ZeroTestConfig& cfg,
                                        const std::map<std::string, int>& sel,
                                        TypoSwitches switches) {
  auto get = [&sel](const char* name) {
    auto it = sel.find(name);
    return it == sel.end() ? 0 : it->second;
  };
  CoframeMatrix M;
  if (tag == BranchTag::T1) {
    const BranchAInvariants inv = branchA_invariants(
        f, cfg, params, get("J6"), get("J10"), switches);
    M = build_branch_coframe(inv);
  } else {
    const BranchBDepth depth = tag == BranchTag::T2   ? BranchBDepth::I5_I7
                               : tag == BranchTag::T3 ? BranchBDepth::PlusI8
                                                      : BranchBDepth::PlusEStruct;
    const BranchBInvariants inv =
        branchB_invariants(f, depth, cfg, params, get("J8"));
    M = build_branch_coframe(tag, inv);
  }
  const std::vector<JetSample> pts =
      draw_samples(cfg, 0x667072ull /* "fpr" */, tag == BranchTag::T4);
  StructureOptions opts;
  opts.constancy_tol = cfg.tolerance;
  return structure_functions(M, f, pts, params, opts);
}

namespace {

struct FingerprintCache {
  std::mutex mu;
  std::unordered_map<std::string, StructureFingerprint> map;
};

FingerprintCache& fp_cache() {
  static FingerprintCache* c = new FingerprintCache;
  return *c;
}

std::string cache_key(const std::string& id, const ParamBinding& params,
                      const ZeroTestConfig& cfg,
                      const std::map<std::string, int>& sel) {
  std::ostringstream k;
  k.precision(17);
  k << id << '#';
  for (const auto& [name, v] : params) {
    k << name << '=' << v.real() << ',' << v.imag() << ';';
  }
  k << '#' << cfg.seed << '/' << cfg.sample_count << '/' << cfg.tolerance << '/'
    << cfg.modulus_min << '/' << cfg.modulus_max << '#';
  for (const auto& [name, b] : sel) k << name << '=' << b << ';';
  return k.str();
}

}  // namespace

StructureFingerprint canonical_fingerprint(
    const std::string& form_id, const ParamBinding& params,
    const ZeroTestConfig& cfg, const std::map<std::string, int>& selectors) {
  const CanonicalForm* form = find_canonical(form_id);
  if (!form) {
    throw std::invalid_argument("unknown canonical form '" + form_id + "'");
  }
  for (const auto& p : form->params) {
    auto it = params.find(p);
    if (it == params.end()) {
      throw std::invalid_argument("canonical form " + form_id +
                                  " needs parameter " + p);
    }
    check_parameter_admissible(*form, it->second, cfg.tolerance);
  }

  const std::string key = cache_key(form_id, params, cfg, selectors);
  {
    std::lock_guard<std::mutex> lock(fp_cache().mu);
    auto it = fp_cache().map.find(key);
    if (it != fp_cache().map.end()) return it->second;
  }

  BranchTag tag = form->branch;
  // The (15,5) representative sits in the I4 = 0 branch exactly at K = 0.
  if (form->id == "6qr/p-6q^3/p^2+K(3q^2-2pr)^(3/2)/p^2") {
    auto it = params.find("K");
    if (it != params.end() && std::abs(it->second) < cfg.tolerance) {
      tag = BranchTag::T1;
    }
  }
  StructureFingerprint fp =
      branch_fingerprint(form->f(), tag, params, cfg, selectors);

  std::lock_guard<std::mutex> lock(fp_cache().mu);
  return fp_cache().map.emplace(key, std::move(fp)).first->second;
}

}  // namespace odeq
