#include "odeq/transform.hpp"

#include <functional>
#include <sstream>

#include "odeq/parser.hpp"

namespace odeq {

namespace {

/// xbar -> phi, ubar -> psi, pbar -> g, qbar -> eta, rbar -> xi; the
/// barred a13 is normalized to 1 where it appears.
SubstMap barred_symbols() {
  SubstMap s;
  s.vars[JetVar::X] = Expr::param("phi");
  s.vars[JetVar::U] = Expr::param("psi");
  s.vars[JetVar::P] = Expr::param("g");
  s.vars[JetVar::Q] = Expr::param("eta");
  s.vars[JetVar::R] = Expr::param("xi");
  s.vars[JetVar::A13] = Expr::integer(1);
  return s;
}

std::vector<std::vector<Expr>> invert_lower_triangular(
    const std::vector<std::vector<Expr>>& L) {
  const int n = static_cast<int>(L.size());
  auto inv = std::vector<std::vector<Expr>>(
      n, std::vector<Expr>(n, Expr::integer(0)));
  for (int i = 0; i < n; ++i) {
    inv[i][i] = Expr::pow(L[i][i], Expr::integer(-1));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i - 1; j >= 0; --j) {
      std::vector<Expr> terms;
      for (int k = j; k < i; ++k) {
        if (L[i][k].is_zero() || inv[k][j].is_zero()) continue;
        terms.push_back(L[i][k] * inv[k][j]);
      }
      inv[i][j] = -inv[i][i] * Expr::sum(std::move(terms));
    }
  }
  return inv;
}

std::vector<std::vector<Expr>> substitute_matrix(
    const std::vector<std::vector<Expr>>& m, const SubstMap& s) {
  auto out = m;
  for (auto& row : out) {
    for (auto& e : row) e = substitute(e, s);
  }
  return out;
}

const std::pair<int, int>& b_slot(int index) {
  static const std::pair<int, int> slots[] = {
      {0, 0},          // b1
      {1, 0}, {1, 1},  // b2 b3
      {2, 0}, {2, 1}, {2, 2},
      {3, 0}, {3, 1}, {3, 2}, {3, 3},
      {4, 0}, {4, 1},  // b11, b12 (spurious)
      {4, 4},          // b13
      {5, 0}, {5, 1}, {5, 2},  // b14..b16
      {5, 4}, {5, 5},          // b17, b18
  };
  if (index < 1 || index > 18) {
    throw std::out_of_range("b index must be 1..18");
  }
  return slots[index - 1];
}

}  // namespace

Expr BMatrix::b(int index, int variant) const {
  const auto& [i, j] = b_slot(index);
  if (i >= n) throw std::out_of_range("b index beyond this matrix size");
  return variants[variant][i][j];
}

ProlongedMap prolong(const TransformCandidate& t, const Expr& f,
                     const ZeroTestConfig& cfg, const ParamBinding& params) {
  const unsigned allowed = (1u << static_cast<int>(JetVar::X)) |
                           (1u << static_cast<int>(JetVar::U));
  if ((t.phi.node().var_mask | t.psi.node().var_mask) & ~allowed) {
    throw DegenerateTransform("phi and psi must depend on x and u only");
  }
  DiffContext ctx;
  const Expr jac = ctx.partial(t.phi, JetVar::X) * ctx.partial(t.psi, JetVar::U) -
                   ctx.partial(t.phi, JetVar::U) * ctx.partial(t.psi, JetVar::X);
  if (is_identically_zero(jac, cfg, params)) {
    throw DegenerateTransform("candidate has identically zero Jacobian");
  }
  ProlongedMap pm;
  pm.phi = t.phi;
  pm.psi = t.psi;
  pm.dx_phi = ctx.total(t.phi, f);
  if (is_identically_zero(pm.dx_phi, cfg, params)) {
    throw DegenerateTransform("Dx phi vanishes identically");
  }
  const Expr inv_dxphi = Expr::pow(pm.dx_phi, Expr::integer(-1));
  pm.g = ctx.total(t.psi, f) * inv_dxphi;
  pm.eta = ctx.total(pm.g, f) * inv_dxphi;
  pm.xi = ctx.total(pm.eta, f) * inv_dxphi;
  pm.fbar_value = ctx.total(pm.xi, f) * inv_dxphi;
  return pm;
}

VerifyResult verify_transform(const TransformCandidate& t, const Expr& f_src,
                              const Expr& f_tgt, const ZeroTestConfig& cfg,
                              const ParamBinding& params) {
  const ProlongedMap pm = prolong(t, f_src, cfg, params);
  SubstMap s;
  s.vars[JetVar::X] = pm.phi;
  s.vars[JetVar::U] = pm.psi;
  s.vars[JetVar::P] = pm.g;
  s.vars[JetVar::Q] = pm.eta;
  s.vars[JetVar::R] = pm.xi;
  const Expr residual = pm.fbar_value - substitute(f_tgt, s);
  const ZeroEvidence ev = zero_test(residual, cfg, params);
  return {ev.status == ZeroStatus::Zero, ev.max_abs, ev.max_rel,
          ev.samples_used};
}

BMatrix b_matrix_5(const Expr& f_src, const Expr& f_tgt,
                   const CoframeMatrix& cof_src, const CoframeMatrix& cof_tgt,
                   const ProlongedMap& pm) {
  (void)f_src;
  (void)f_tgt;
  (void)pm;
  if (cof_src.n != 5 || cof_tgt.n != 5) {
    throw BranchViolation("b_matrix_5 needs five-dimensional coframes");
  }
  if (cof_src.tag != cof_tgt.tag) {
    throw BranchViolation(
        "source and target coframes come from different branches");
  }
  const auto tgt_composed = substitute_matrix(cof_tgt.entries, barred_symbols());
  BMatrix out;
  out.n = 5;
  out.kind = PdeKind::Prop1;
  const auto& orbit = cof_tgt.orbit;
  for (const auto& diag : orbit) {
    auto scaled = tgt_composed;
    for (int i = 0; i < 5; ++i) {
      const Complex d = diag[i];
      Expr factor;
      if (d == Complex(1.0)) {
        factor = Expr::integer(1);
      } else if (d == Complex(-1.0)) {
        factor = Expr::integer(-1);
      } else if (d == Complex(0.0, 1.0)) {
        factor = Expr::root(4, Expr::integer(1), 1);
      } else if (d == Complex(0.0, -1.0)) {
        factor = Expr::root(4, Expr::integer(1), 3);
      } else {
        throw std::logic_error("unsupported orbit element");
      }
      if (!factor.is_one()) {
        for (int j = 0; j < 5; ++j) scaled[i][j] = factor * scaled[i][j];
      }
    }
    auto b = matmul(invert_lower_triangular(scaled), cof_src.entries);
    for (auto& row : b) {
      for (auto& e : row) e = rewrite_radical_powers(e);
    }
    out.variants.push_back(std::move(b));
  }
  return out;
}

BMatrix b_matrix_6(const Expr& f_src, SixDimTarget target,
                   const ProlongedMap& pm, const ZeroTestConfig& cfg,
                   const ParamBinding& params) {
  (void)pm;
  const BranchBInvariants inv =
      branchB_invariants(f_src, BranchBDepth::PlusEStruct, cfg, params);
  if (!is_identically_zero(inv.I5, cfg, params) ||
      !is_identically_zero(*inv.I8, cfg, params)) {
    throw BranchViolation(
        "b_matrix_6 needs a source in the e-structure branch (I5 = I8 = 0)");
  }

  // Source side: the full 6x6 A H with a13 kept as the auxiliary unknown.
  auto a_src = branch_group_matrix(BranchTag::T4, inv);
  auto h_src = std::vector<std::vector<Expr>>(
      6, std::vector<Expr>(6, Expr::integer(0)));
  {
    const auto omega = omega_entries(inv.base);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) h_src[i][j] = omega[i][j];
    h_src[5][5] = Expr::integer(1);
  }
  const auto m_src = matmul(a_src, h_src);

  // Target side from the tabulated constants, abar13 = 1.
  struct Consts {
    Rational m[15];
    Rational n[4];
  };
  static const Consts four_thirds = {
      {{4, 9}, {-4, 9}, {4, 9}, {8, 27}, {-16, 27}, {4, 9}, {8, 81}, {8, 27},
       {-4, 9}, {4, 9}, {0, 1}, {-1, 3}, {2, 3}, {-1, 2}, {-2, 3}},
      {{4, 3}, {10, 9}, {4, 3}, {2, 3}}};
  static const Consts five_thirds = {
      {{5, 9}, {-10, 9}, {5, 9}, {40, 27}, {-40, 27}, {5, 9}, {-40, 81},
       {40, 27}, {-10, 9}, {5, 9}, {1, 3}, {-7, 9}, {1, 1}, {-1, 2}, {-1, 3}},
      {{5, 3}, {16, 9}, {5, 3}, {1, 1}}};
  const Consts& c =
      target == SixDimTarget::FourThirds ? four_thirds : five_thirds;

  const Expr xi = Expr::param("xi");
  const Expr eta = Expr::param("eta");
  const Expr inv_eta = Expr::pow(eta, Expr::integer(-1));
  auto pw = [&](int k) {  // xi^k / eta^(k+1)
    return Expr::pow(xi, Expr::integer(k)) *
           Expr::pow(eta, Expr::integer(-(k + 1)));
  };
  auto m = [&](int i) { return Expr::constant(c.m[i - 1]); };
  auto nn = [&](int i) { return Expr::constant(c.n[i - 1]); };

  auto abar = std::vector<std::vector<Expr>>(
      6, std::vector<Expr>(6, Expr::integer(0)));
  abar[0][0] = m(1) * inv_eta;
  abar[1][0] = m(2) * pw(1);
  abar[1][1] = m(3) * inv_eta;
  abar[2][0] = m(4) * pw(2);
  abar[2][1] = m(5) * pw(1);
  abar[2][2] = m(6) * inv_eta;
  abar[3][0] = m(7) * pw(3);
  abar[3][1] = m(8) * pw(2);
  abar[3][2] = m(9) * pw(1);
  abar[3][3] = m(10) * inv_eta;
  abar[4][0] = m(11) * pw(1);
  abar[4][4] = Expr::integer(1);
  abar[5][0] = m(12) * pw(2);
  abar[5][1] = m(13) * pw(1);
  abar[5][2] = m(14) * inv_eta;
  abar[5][4] = m(15) * xi * inv_eta;
  abar[5][5] = Expr::integer(1);

  auto hbar = std::vector<std::vector<Expr>>(
      6, std::vector<Expr>(6, Expr::integer(0)));
  for (int i = 0; i < 6; ++i) hbar[i][i] = Expr::integer(1);
  hbar[1][0] = nn(1) * xi * inv_eta;
  hbar[2][0] = nn(2) * pw(1) * xi;
  hbar[2][1] = nn(3) * xi * inv_eta;
  hbar[3][1] = nn(4) * pw(1) * xi;

  BMatrix out;
  out.n = 6;
  out.kind = PdeKind::Prop2;
  auto b = matmul(invert_lower_triangular(matmul(abar, hbar)), m_src);
  for (auto& row : b) {
    for (auto& e : row) e = rewrite_radical_powers(e);
  }
  out.variants.push_back(std::move(b));
  return out;
}

namespace {

Expr sym(const char* name) { return Expr::param(name); }

std::vector<PdeEquation> build_equations(const BMatrix& b, PdeKind kind,
                                         const Expr& fbar_sym) {
  std::vector<PdeEquation> eqs;
  auto push = [&](const std::string& lhs,
                  const std::function<Expr(int)>& rhs) {
    PdeEquation eq;
    eq.lhs = lhs;
    for (int v = 0; v < b.variant_count(); ++v) eq.rhs.push_back(rhs(v));
    eqs.push_back(std::move(eq));
  };

  if (kind == PdeKind::Prop2) {
    auto frac = [&](int num_index) {
      return [&b, num_index](int v) {
        return -b.b(num_index, v) * Expr::pow(b.b(18, v), Expr::integer(-1));
      };
    };
    push("D[x] a13", frac(17));
    push("d/du a13", frac(14));
    push("d/dp a13", frac(15));
    push("d/dq a13", frac(16));
  }

  push("D[x] xi", [&](int v) { return fbar_sym * b.b(13, v); });
  push("d/du xi", [&](int v) { return fbar_sym * b.b(11, v) + b.b(7, v); });
  push("d/dp xi", [&](int v) { return b.b(8, v); });
  push("d/dq xi", [&](int v) { return b.b(9, v); });
  push("d/dr xi", [&](int v) { return b.b(10, v); });
  push("D[x] eta", [&](int v) { return sym("xi") * b.b(13, v); });
  push("d/du eta", [&](int v) { return sym("xi") * b.b(11, v) + b.b(4, v); });
  push("d/dp eta", [&](int v) { return b.b(5, v); });
  push("d/dq eta", [&](int v) { return b.b(6, v); });
  push("D[x] g", [&](int v) { return sym("eta") * b.b(13, v); });
  push("d/du g", [&](int v) { return sym("eta") * b.b(11, v) + b.b(2, v); });
  push("d/dp g", [&](int v) { return b.b(3, v); });
  push("D[x] psi", [&](int v) { return sym("g") * b.b(13, v); });
  push("d/du psi", [&](int v) { return sym("g") * b.b(11, v) + b.b(1, v); });
  push("D[x] phi", [&](int v) { return b.b(13, v); });
  push("d/du phi", [&](int v) { return b.b(11, v); });
  // The left matrix carries a b12 slot that the contact relation never
  // populates; it is pinned to zero and checked.
  push("b12", [&](int v) { return b.b(12, v); });
  return eqs;
}

}  // namespace

PdeSystem emit_pde_system(const BMatrix& b, PdeKind kind, const Expr& f_src,
                          const Expr& fbar_sym) {
  if (kind != b.kind) {
    throw std::invalid_argument("b-matrix kind does not match the system kind");
  }
  PdeSystem sys;
  sys.kind = kind;
  sys.f_src = f_src;
  sys.fbar_sym = fbar_sym;
  sys.variant_count = b.variant_count();
  sys.equations = build_equations(b, kind, fbar_sym);
  return sys;
}

std::string PdeSystem::serialize() const {
  std::string out;
  out += kind == PdeKind::Prop2 ? "# point-transformation system (prop2, 21 equations)\n"
                                : "# point-transformation system (prop1, 17 equations)\n";
  out += "# unknowns: phi(x,u), psi(x,u), g, eta, xi";
  out += kind == PdeKind::Prop2 ? ", a13(x,u,p,q)\n" : "\n";
  for (const auto& eq : equations) {
    if (eq.lhs == "b12") {
      out += "b12 = 0\n";
      continue;
    }
    out += eq.lhs + " = " + eq.rhs.front().str() + "\n";
  }
  return out;
}

VerifyResult check_candidate_against_pde(const TransformCandidate& t,
                                         const std::optional<Expr>& aux_a13,
                                         const PdeSystem& sys,
                                         const ZeroTestConfig& cfg,
                                         const ParamBinding& params) {
  cfg.validate();
  if (sys.kind == PdeKind::Prop2 && !aux_a13) {
    throw std::invalid_argument("prop2 check needs the auxiliary a13");
  }
  const ProlongedMap pm = prolong(t, sys.f_src, cfg, params);

  SubstMap bind;
  bind.params["phi"] = pm.phi;
  bind.params["psi"] = pm.psi;
  bind.params["g"] = pm.g;
  bind.params["eta"] = pm.eta;
  bind.params["xi"] = pm.xi;
  if (aux_a13) bind.vars[JetVar::A13] = *aux_a13;

  std::map<std::string, Expr> concrete{{"phi", pm.phi}, {"psi", pm.psi},
                                       {"g", pm.g},     {"eta", pm.eta},
                                       {"xi", pm.xi}};
  if (aux_a13) concrete.emplace("a13", *aux_a13);

  DiffContext ctx;
  // residuals[variant][equation]
  std::vector<std::vector<Expr>> residuals(sys.variant_count);
  for (const auto& eq : sys.equations) {
    Expr lhs = Expr::integer(0);
    if (eq.lhs != "b12") {
      std::istringstream in(eq.lhs);
      std::string op, target;
      in >> op >> target;
      const Expr& c = concrete.at(target);
      if (op == "D[x]") {
        lhs = ctx.total(c, sys.f_src);
      } else if (op.rfind("d/d", 0) == 0 && op.size() == 4) {
        switch (op[3]) {
          case 'u': lhs = ctx.partial(c, JetVar::U); break;
          case 'p': lhs = ctx.partial(c, JetVar::P); break;
          case 'q': lhs = ctx.partial(c, JetVar::Q); break;
          case 'r': lhs = ctx.partial(c, JetVar::R); break;
          default: throw std::logic_error("bad partial descriptor");
        }
      } else {
        throw std::logic_error("bad equation descriptor: " + eq.lhs);
      }
    }
    for (int v = 0; v < sys.variant_count; ++v) {
      residuals[v].push_back(lhs - substitute(eq.rhs[v], bind));
    }
  }

  SampleRng rng(SampleRng::substream(cfg.seed, 0x706465ull));  // "pde"
  VerifyResult out;
  out.ok = true;
  const int budget = cfg.pole_retry_factor * cfg.sample_count;
  int attempts = 0;
  while (out.samples < cfg.sample_count) {
    if (attempts++ >= budget) {
      throw InconclusiveZeroTest("candidate check: too many samples hit poles");
    }
    const JetSample pt =
        draw_jet_sample(rng, cfg.modulus_min, cfg.modulus_max, false);
    ParamBinding bound = params;
    bool sample_ok = false;
    double best_rel = 0.0;
    double best_abs = 0.0;
    bool evaluated_any = false;
    try {
      for (int v = 0; v < sys.variant_count && !sample_ok; ++v) {
        Evaluator ev(pt, bound);
        double worst_rel = 0.0, worst_abs = 0.0;
        for (const Expr& res : residuals[v]) {
          const Complex val = ev.value(res);
          const double scale = ev.scale(res);
          worst_abs = std::max(worst_abs, std::abs(val));
          worst_rel =
              std::max(worst_rel, std::abs(val) / (1.0 + scale));
        }
        evaluated_any = true;
        if (v == 0 || worst_rel < best_rel) {
          best_rel = worst_rel;
          best_abs = worst_abs;
        }
        sample_ok = worst_rel < cfg.tolerance;
      }
    } catch (const EvalError& err) {
      if (err.kind() != EvalErrorKind::NonFinite) throw;
      continue;  // pole: resample
    }
    if (!evaluated_any) continue;
    out.samples++;
    out.max_abs = std::max(out.max_abs, best_abs);
    out.max_rel = std::max(out.max_rel, best_rel);
    if (!sample_ok) out.ok = false;
  }
  return out;
}

PdeSystem pde_system_for_pair(const Expr& f_src, const Expr& f_tgt,
                              PdeKind kind, const ZeroTestConfig& cfg,
                              const ParamBinding& params) {
  SubstMap barred = barred_symbols();
  if (kind == PdeKind::Prop2) {
    const Expr four = parse_expression("4/3*r^2/q");
    const Expr five = parse_expression("5/3*r^2/q");
    SixDimTarget target;
    if (f_tgt == four) {
      target = SixDimTarget::FourThirds;
    } else if (f_tgt == five) {
      target = SixDimTarget::FiveThirds;
    } else {
      throw BranchViolation(
          "prop2 targets are (4/3) r^2/q and (5/3) r^2/q only");
    }
    TransformCandidate identity{Expr::var(JetVar::X), Expr::var(JetVar::U)};
    const ProlongedMap pm = prolong(identity, f_src, cfg, params);
    const BMatrix b = b_matrix_6(f_src, target, pm, cfg, params);
    return emit_pde_system(b, kind, f_src, substitute(f_tgt, barred));
  }

  auto coframe_for = [&](const Expr& f) {
    const BaseInvariants base = base_invariants(f);
    if (zero_test(base.I4, cfg, params).status == ZeroStatus::Zero) {
      return build_branch_coframe(branchA_invariants(f, cfg, params));
    }
    const BranchBInvariants probe =
        branchB_invariants(f, BranchBDepth::PlusI8, cfg, params);
    if (!is_identically_zero(probe.I5, cfg, params)) {
      return build_branch_coframe(BranchTag::T2, probe);
    }
    if (!is_identically_zero(*probe.I8, cfg, params)) {
      return build_branch_coframe(BranchTag::T3, probe);
    }
    throw BranchViolation(
        "pair sits in the e-structure branch; use the prop2 system");
  };
  const CoframeMatrix cof_src = coframe_for(f_src);
  const CoframeMatrix cof_tgt = coframe_for(f_tgt);
  TransformCandidate identity{Expr::var(JetVar::X), Expr::var(JetVar::U)};
  const ProlongedMap pm = prolong(identity, f_src, cfg, params);
  const BMatrix b = b_matrix_5(f_src, f_tgt, cof_src, cof_tgt, pm);
  return emit_pde_system(b, kind, f_src, substitute(f_tgt, barred));
}

}  // namespace odeq
