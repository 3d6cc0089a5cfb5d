#include "odeq/coframe.hpp"

namespace odeq {

namespace {

Expr rat(std::int64_t n, std::int64_t d) { return Expr::rational(n, d); }

Expr ipow(const Expr& b, int e) { return Expr::pow(b, Expr::integer(e)); }

std::vector<std::vector<Expr>> zeros(int n) {
  return std::vector<std::vector<Expr>>(n,
                                        std::vector<Expr>(n, Expr::integer(0)));
}

std::vector<std::array<Complex, 6>> t1_orbit() {
  // J6 -> eps J6 scales rows (1,2,3,4); J10 -> lambda J10 (lambda^4 = 1)
  // scales rows by (lambda, 1, 1/lambda, 1/lambda^2, lambda).
  std::vector<std::array<Complex, 6>> orbit;
  const Complex units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int e = 0; e < 2; ++e) {
    const Complex eps = e == 0 ? Complex(1) : Complex(-1);
    for (const Complex& lam : units) {
      const Complex inv = Complex(1) / lam;
      orbit.push_back({eps * lam, eps, eps * inv, eps * inv * inv, lam,
                       Complex(1)});
    }
  }
  return orbit;
}

std::vector<std::array<Complex, 6>> t3_orbit() {
  return {{Complex(1), Complex(1), Complex(1), Complex(1), Complex(1),
           Complex(1)},
          {Complex(1), Complex(-1), Complex(1), Complex(-1), Complex(-1),
           Complex(1)}};
}

std::vector<std::array<Complex, 6>> identity_orbit() {
  return {{Complex(1), Complex(1), Complex(1), Complex(1), Complex(1),
           Complex(1)}};
}

}  // namespace

std::vector<std::vector<Expr>> matmul(const std::vector<std::vector<Expr>>& a,
                                      const std::vector<std::vector<Expr>>& b) {
  const std::size_t n = a.size(), m = b[0].size(), k = b.size();
  auto out = std::vector<std::vector<Expr>>(n, std::vector<Expr>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<Expr> terms;
      for (std::size_t l = 0; l < k; ++l) {
        if (a[i][l].is_zero() || b[l][j].is_zero()) continue;
        terms.push_back(a[i][l] * b[l][j]);
      }
      out[i][j] = Expr::sum(std::move(terms));
    }
  }
  return out;
}

std::vector<std::vector<Expr>> omega_entries(const BaseInvariants& inv) {
  auto m = zeros(5);
  const Expr one = Expr::integer(1);
  for (int i = 0; i < 5; ++i) m[i][i] = one;
  m[1][0] = rat(-1, 2) * inv.I0;
  m[2][0] = rat(3, 10) * (inv.I1 + inv.I2);
  m[2][1] = rat(-1, 2) * inv.I0;
  m[3][1] = rat(1, 10) * (-3 * inv.I1 + 7 * inv.I2);
  return m;
}

CoframeMatrix build_omega(const Expr& f) {
  CoframeMatrix M;
  M.n = 5;
  M.entries = omega_entries(base_invariants(f));
  M.orbit = identity_orbit();
  return M;
}

std::vector<std::vector<Expr>> branch_group_matrix(
    const BranchAInvariants& inv) {
  const Expr& J6 = inv.J6;
  const Expr& J10 = inv.J10;
  const Expr& I11 = inv.I11;
  const Expr& I7 = inv.I7;
  const Expr& I3 = inv.base.I3;
  auto s = zeros(5);
  s[0][0] = J6 * J10;
  s[1][0] = -I11;
  s[1][1] = J6;
  s[2][0] = rat(2, 3) * ipow(I11, 2) / (J6 * J10);
  s[2][1] = rat(-4, 3) * I11 / J10;
  s[2][2] = J6 / J10;
  s[3][0] = (-2 * ipow(I11, 3) - 9 * ipow(J6, 3) * I7) /
            (9 * ipow(J6, 2) * ipow(J10, 2));
  s[3][1] = rat(2, 3) * ipow(I11, 2) / (J6 * ipow(J10, 2));
  s[3][2] = -I11 / ipow(J10, 2);
  s[3][3] = J6 / ipow(J10, 2);
  s[4][0] = rat(6, 5) * I3 * J10;
  s[4][4] = J10;
  return s;
}

CoframeMatrix build_branch_coframe(const BranchAInvariants& inv) {
  if (inv.J6.is_zero() || inv.J10.is_zero()) {
    throw BranchViolation("degenerate radical: J6 or J10 has an identically "
                          "zero radicand");
  }
  CoframeMatrix M;
  M.n = 5;
  M.tag = BranchTag::T1;
  M.entries = matmul(branch_group_matrix(inv), omega_entries(inv.base));
  M.orbit = t1_orbit();
  M.selectors = {{"J6", inv.j6_branch}, {"J10", inv.j10_branch}};
  return M;
}

std::vector<std::vector<Expr>> branch_group_matrix(
    BranchTag tag, const BranchBInvariants& inv) {
  const Expr& I3 = inv.base.I3;
  const Expr& I4 = inv.base.I4;
  const Expr& I5 = inv.I5;
  const Expr& I6 = inv.I6;
  const Expr& I7 = inv.I7;

  // All three coframes instantiate the same reduced group matrix at a
  // branch-specific a13: 1/I5 for T2, J8 for T3, the free coordinate for T4.
  Expr a13;
  int n = 5;
  switch (tag) {
    case BranchTag::T2:
      a13 = ipow(I5, -1);
      break;
    case BranchTag::T3:
      if (!inv.J8) throw BranchViolation("T3 coframe needs the I8 depth");
      if (inv.J8->is_zero()) {
        throw BranchViolation("degenerate radical: J8 has an identically "
                              "zero radicand");
      }
      a13 = *inv.J8;
      break;
    case BranchTag::T4:
      if (!inv.I9 || !inv.I10)
        throw BranchViolation("T4 coframe needs the e-structure depth");
      a13 = Expr::var(JetVar::A13);
      n = 6;
      break;
    default:
      throw BranchViolation("branch A invariants build the T1 coframe");
  }

  auto s = zeros(n);
  s[0][0] = ipow(a13, 2) * I4;
  s[1][0] = a13 * I6;
  s[1][1] = a13 * I4;
  s[2][0] = rat(2, 3) * ipow(I6, 2) / I4;
  s[2][1] = rat(4, 3) * I6;
  s[2][2] = I4;
  s[3][0] = -I4 * I7 / a13 + rat(2, 9) * ipow(I6, 3) / (a13 * ipow(I4, 2));
  s[3][1] = rat(2, 3) * ipow(I6, 2) / (a13 * I4);
  s[3][2] = I6 / a13;
  s[3][3] = I4 / a13;
  s[4][0] = rat(-3, 5) * a13 * I6 + rat(6, 5) * a13 * I3;
  s[4][4] = a13;
  if (n == 6) {
    DiffContext ctx;
    const Expr& I0 = inv.base.I0;
    const Expr I6r = ctx.partial(I6, JetVar::R);
    s[5][0] = *inv.I9;
    s[5][1] = *inv.I10;
    s[5][2] = (-9 * ipow(I4, 2) - I6r) / (6 * I4);
    s[5][4] = (3 * I0 * I4 - 4 * I6) / (6 * I4);
    s[5][5] = ipow(a13, -1);
  }
  return s;
}

CoframeMatrix build_branch_coframe(BranchTag tag,
                                   const BranchBInvariants& inv) {
  CoframeMatrix M;
  M.tag = tag;
  auto s = branch_group_matrix(tag, inv);
  auto omega = omega_entries(inv.base);
  if (tag == BranchTag::T4) {
    M.n = 6;
    auto h = zeros(6);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) h[i][j] = omega[i][j];
    h[5][5] = Expr::integer(1);
    M.entries = matmul(s, h);
    M.orbit = identity_orbit();
  } else {
    M.n = 5;
    M.entries = matmul(s, omega);
    M.orbit = tag == BranchTag::T3 ? t3_orbit() : identity_orbit();
    if (tag == BranchTag::T3) M.selectors = {{"J8", inv.j8_branch}};
  }
  return M;
}

}  // namespace odeq
