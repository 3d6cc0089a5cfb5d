#include "odeq/invariants.hpp"

namespace odeq {

namespace {

Expr rat(std::int64_t n, std::int64_t d) { return Expr::rational(n, d); }

const Expr kP = Expr::var(JetVar::P);
const Expr kQ = Expr::var(JetVar::Q);

struct Chain {
  explicit Chain(const Expr& f_) : f(f_) {}

  Expr d(const Expr& e, JetVar v) { return ctx.partial(e, v); }
  Expr Dx(const Expr& e) { return ctx.total(e, f); }

  Expr f;
  DiffContext ctx;
};

}  // namespace

std::string TypoSwitches::describe() const {
  std::string out = "I7_tail=";
  out += i7_tail_sign > 0 ? "plus" : "minus";
  out += ",I8_rf=";
  out += i8_rf_sign > 0 ? "plus" : "minus";
  return out;
}

BaseInvariants base_invariants(const Expr& f) {
  Chain c(f);
  BaseInvariants inv;
  inv.f = f;
  inv.I0 = -c.d(f, JetVar::R);
  inv.I1 = rat(-1, 6) * c.Dx(inv.I0) + rat(1, 4) * inv.I0 * inv.I0;
  inv.I2 = rat(-1, 2) * c.Dx(inv.I0) - c.d(f, JetVar::Q);
  inv.I3 = rat(-1, 8) * c.d(inv.I0, JetVar::R) * inv.I0 +
           rat(1, 4) * c.d(inv.I1, JetVar::R) -
           rat(1, 12) * c.d(inv.I2, JetVar::R);
  inv.I4 = rat(-1, 6) * c.d(inv.I0, JetVar::R);
  return inv;
}

std::map<std::string, Expr> BaseInvariants::items() const {
  return {{"I0", I0}, {"I1", I1}, {"I2", I2}, {"I3", I3}, {"I4", I4}};
}

BranchAInvariants branchA_invariants(const Expr& f, const ZeroTestConfig& cfg,
                                     const ParamBinding& params, int j6_branch,
                                     int j10_branch, TypoSwitches switches) {
  BranchAInvariants inv;
  inv.base = base_invariants(f);
  if (zero_test(inv.base.I4, cfg, params).status != ZeroStatus::Zero) {
    throw BranchViolation("branch A invariants need I4 identically zero");
  }
  Chain c(f);
  const Expr& I0 = inv.base.I0;
  const Expr& I1 = inv.base.I1;
  const Expr& I2 = inv.base.I2;
  const Expr& I3 = inv.base.I3;
  const Expr s7 = Expr::integer(switches.i7_tail_sign);
  const Expr s8 = Expr::integer(switches.i8_rf_sign);

  inv.switches = switches;
  inv.j6_branch = j6_branch;
  inv.j10_branch = j10_branch;

  inv.I5 = rat(-18, 5) * I0 * I3 - rat(3, 5) * c.d(I0, JetVar::P) +
           rat(2, 5) * c.d(I2 - 3 * I1, JetVar::Q);
  inv.I6 = rat(-36, 25) * I3 * I3 - rat(3, 5) * I0 * c.d(I3, JetVar::Q) -
           rat(6, 5) * c.d(I3, JetVar::P);
  const Expr i12 = I1 + I2;
  inv.I7 = rat(1, 2) * Expr::pow(I0, Expr::integer(3)) -
           rat(3, 10) * (c.Dx(i12) - f * c.d(i12, JetVar::R)) +
           rat(6, 5) * f * I3 + s7 * rat(1, 20) * I0 * (I2 - 39 * I1);
  inv.I8 = rat(7, 8) * Expr::pow(I0, Expr::integer(3)) -
           (c.Dx(I2) + s8 * c.d(I2, JetVar::R) * f) - c.d(f, JetVar::P) +
           6 * f * I3 + I0 * (-3 * I1 - rat(1, 2) * I2);
  inv.I9 = rat(-6, 5) * c.d(I3, JetVar::Q);
  inv.J6 = Expr::root(2, inv.I6, j6_branch);
  inv.I10 = c.Dx(inv.I7) - c.d(f, JetVar::U) + I0 * inv.I7 +
            i12 * (rat(9, 100) * (9 * I1 - I2) - rat(9, 40) * I0 * I0);
  inv.J10 = Expr::root(4, inv.I10, j10_branch);
  inv.I11 = -3 * c.d(inv.J6, JetVar::X) - 3 * kP * c.d(inv.J6, JetVar::U) -
            3 * kQ * c.d(inv.J6, JetVar::P);
  return inv;
}

std::map<std::string, Expr> BranchAInvariants::items() const {
  auto m = base.items();
  m.emplace("I5", I5);
  m.emplace("I6", I6);
  m.emplace("I7", I7);
  m.emplace("I8", I8);
  m.emplace("I9", I9);
  m.emplace("J6", J6);
  m.emplace("I10", I10);
  m.emplace("J10", J10);
  m.emplace("I11", I11);
  return m;
}

BranchBInvariants branchB_invariants(const Expr& f, BranchBDepth depth,
                                     const ZeroTestConfig& cfg,
                                     const ParamBinding& params,
                                     int j8_branch) {
  BranchBInvariants inv;
  inv.base = base_invariants(f);
  if (zero_test(inv.base.I4, cfg, params).status != ZeroStatus::NonZero) {
    throw BranchViolation("branch B invariants need I4 nonzero");
  }
  Chain c(f);
  const Expr& I0 = inv.base.I0;
  const Expr& I1 = inv.base.I1;
  const Expr& I2 = inv.base.I2;
  const Expr& I3 = inv.base.I3;
  const Expr& I4 = inv.base.I4;

  inv.depth = depth;
  inv.j8_branch = j8_branch;
  inv.I5 = rat(-1, 2) * c.d(I4, JetVar::R) *
           Expr::pow(I4, Expr::integer(-2));
  inv.I6 = rat(-3, 2) * I0 * I4 - c.d(I2, JetVar::R) - 6 * I3;
  inv.I7 = rat(1, 10) * f *
               (9 * I0 * I4 + c.d(3 * I1 - I2, JetVar::R) - 12 * I3) +
           rat(1, 2) * I0 * (I0 * I0 + rat(1, 10) * I2) -
           rat(3, 10) * c.Dx(I1 + I2) - rat(39, 20) * I0 * I1;
  if (depth == BranchBDepth::I5_I7) return inv;

  const Expr& I6 = inv.I6;
  const Expr inv_I4 = Expr::pow(I4, Expr::integer(-1));
  const Expr inv_I4sq = Expr::pow(I4, Expr::integer(-2));
  // Dx applies to the whole (I4 - I4_r f); on this branch I5 = 0 forces
  // I4_r = 0 identically, so the two readings of the formula coincide.
  inv.I8 = I6 * inv_I4sq * c.Dx(I4 - c.d(I4, JetVar::R) * f) -
           inv_I4 * c.Dx(I6) + rat(3, 4) * I0 * I0 -
           rat(1, 2) * I0 * I6 * inv_I4 + rat(3, 10) * I2 +
           rat(1, 3) * I6 * I6 * inv_I4sq - rat(27, 10) * I1;
  inv.J8 = Expr::root(2, *inv.I8, j8_branch);
  if (depth == BranchBDepth::PlusI8) return inv;

  const Expr inv_I4cu = Expr::pow(I4, Expr::integer(-3));
  inv.I9 =
      rat(-3, 4) * inv_I4 *
          (rat(-2, 3) * c.d(I0, JetVar::P) * I4 -
           rat(4, 3) * c.d(I4, JetVar::U) + rat(4, 3) * c.d(I6, JetVar::P) +
           I4 * I4 * (I0 * I0 - 4 * I2) + I0 * I4 * (I6 + 4 * I3) -
           rat(14, 15) * I6 * I6 - rat(172, 15) * I3 * I6) +
      rat(1, 60) * c.d(I6, JetVar::R) * inv_I4cu *
          (I4 * I4 * (-5 * I0 * I0 - 12 * I1 + 48 * I2) - 5 * I0 * I4 * I6 -
           20 * I6 * I6) -
      rat(3, 4) * inv_I4sq *
          (rat(-2, 3) * c.d(I4, JetVar::P) * (I0 * I4 + I6) +
           rat(2, 3) * c.d(I6, JetVar::Q) * (I0 * I4 - rat(8, 3) * I6));
  inv.I10 = rat(1, 60) * inv_I4 *
            (I4 * (36 * I3 - 18 * I6) + 30 * c.d(I4, JetVar::P) -
             5 * I0 * c.d(I6, JetVar::R) - 45 * I0 * I4 * I4);
  return inv;
}

std::map<std::string, Expr> BranchBInvariants::items() const {
  auto m = base.items();
  m.emplace("I5", I5);
  m.emplace("I6", I6);
  m.emplace("I7", I7);
  if (I8) m.emplace("I8", *I8);
  if (J8) m.emplace("J8", *J8);
  if (I9) m.emplace("I9", *I9);
  if (I10) m.emplace("I10", *I10);
  return m;
}

ZeroEvidence relative_invariant_status(const Expr& inv,
                                       const ZeroTestConfig& cfg,
                                       const ParamBinding& params) {
  return zero_test(inv, cfg, params);
}

}  // namespace odeq
