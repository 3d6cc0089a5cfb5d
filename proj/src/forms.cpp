#include "odeq/forms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace odeq {

namespace {

const std::array<Complex, 6> kIdentityDiag = {Complex(1), Complex(1),
                                              Complex(1), Complex(1),
                                              Complex(1), Complex(1)};

int jet_dim(int n) { return n == 6 ? 6 : 5; }

JetVar jet_vars_for(int n, int idx) {
  static const JetVar all[6] = {JetVar::X, JetVar::U, JetVar::P,
                                JetVar::Q, JetVar::R, JetVar::A13};
  (void)n;
  return all[idx];
}

}  // namespace

const char* branch_name(BranchTag t) {
  switch (t) {
    case BranchTag::T1: return "T1";
    case BranchTag::T2: return "T2";
    case BranchTag::T3: return "T3";
    case BranchTag::T4: return "T4";
  }
  return "?";
}

std::vector<TwoFormExpr> base_differentials(const Expr& f, int n) {
  if (n != 5 && n != 6) throw std::invalid_argument("coframe dim must be 5 or 6");
  DiffContext ctx;
  std::vector<TwoFormExpr> out;
  out.reserve(n);
  const Expr zero = Expr::integer(0);
  for (int i = 1; i <= n; ++i) out.emplace_back(n, zero);
  out[0].add(2, 5, Expr::integer(-1));
  out[1].add(3, 5, Expr::integer(-1));
  out[2].add(4, 5, Expr::integer(-1));
  const JetVar contact[4] = {JetVar::U, JetVar::P, JetVar::Q, JetVar::R};
  for (int a = 1; a <= 4; ++a) {
    const Expr fa = ctx.partial(f, contact[a - 1]);
    if (!fa.is_zero()) out[3].add(a, 5, -fa);
  }
  return out;
}

OneFormExpr coordinate_to_base(JetVar v, const Expr& f, int n) {
  OneFormExpr w(n, Expr::integer(0));
  switch (v) {
    case JetVar::X: w[4] = Expr::integer(1); break;
    case JetVar::U:
      w[0] = Expr::integer(1);
      w[4] = Expr::var(JetVar::P);
      break;
    case JetVar::P:
      w[1] = Expr::integer(1);
      w[4] = Expr::var(JetVar::Q);
      break;
    case JetVar::Q:
      w[2] = Expr::integer(1);
      w[4] = Expr::var(JetVar::R);
      break;
    case JetVar::R:
      w[3] = Expr::integer(1);
      w[4] = f;
      break;
    case JetVar::A13:
      if (n != 6) throw std::invalid_argument("a13 needs a 6-dim coframe");
      w[5] = Expr::integer(1);
      break;
  }
  return w;
}

void CoframeMatrix::check_shape() const {
  if ((n != 5 && n != 6) || entries.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("coframe matrix must be 5x5 or 6x6");
  }
  for (const auto& row : entries) {
    if (row.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("ragged coframe matrix");
    }
  }
}

StructureTensor conjugate(const StructureTensor& t,
                          const std::array<Complex, 6>& diag) {
  const int n = t.dim();
  StructureTensor out(n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      for (int k = j + 1; k <= n; ++k) {
        out.set(i, j, k, diag[i - 1] / (diag[j - 1] * diag[k - 1]) * t.at(i, j, k));
      }
    }
  }
  return out;
}

namespace {

struct EntryDerivatives {
  // partials[i][j][v] of M entry (i,j) with respect to jet var v
  std::vector<std::vector<std::vector<Expr>>> partials;
};

EntryDerivatives differentiate_entries(const CoframeMatrix& M) {
  DiffContext ctx;
  const int nv = jet_dim(M.n);
  EntryDerivatives d;
  d.partials.assign(M.n, std::vector<std::vector<Expr>>(
                             M.n, std::vector<Expr>(nv, Expr::integer(0))));
  for (int i = 0; i < M.n; ++i) {
    for (int j = 0; j < M.n; ++j) {
      for (int v = 0; v < nv; ++v) {
        d.partials[i][j][v] = ctx.partial(M.entries[i][j], jet_vars_for(M.n, v));
      }
    }
  }
  return d;
}

double tensor_distance(const StructureTensor& a, const StructureTensor& b) {
  const int n = a.dim();
  double m = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k)
        m = std::max(m, std::abs(a.at(i, j, k) - b.at(i, j, k)));
  return m;
}

StructureTensor tensor_at_sample(const CoframeMatrix& M,
                                 const EntryDerivatives& deriv, const Expr& f,
                                 const std::vector<Expr>& f_contact_partials,
                                 const JetSample& pt, const ParamBinding& params,
                                 const StructureOptions& opts, bool* singular) {
  const int n = M.n;
  const int nv = jet_dim(n);
  Evaluator ev(pt, params);

  Eigen::MatrixXcd Mv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Mv(i, j) = ev.value(M.entries[i][j]);

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(Mv);
  lu.setThreshold(opts.singular_threshold);
  if (!lu.isInvertible()) {
    *singular = true;
    return StructureTensor(n);
  }
  *singular = false;
  const Eigen::MatrixXcd N = lu.inverse();

  // dv in the base coframe: dv = beta^(main) + shift * beta^5 (da13 = beta^6).
  struct CoordRow {
    int main;        // 1-indexed beta slot
    Complex shift;   // coefficient of beta^5
  };
  std::vector<CoordRow> coord(nv);
  coord[0] = {5, Complex(0.0)};                  // dx
  coord[1] = {1, pt.p};                          // du
  coord[2] = {2, pt.q};                          // dp
  coord[3] = {3, pt.r};                          // dq
  coord[4] = {4, ev.value(f)};                   // dr
  if (nv == 6) coord[5] = {6, Complex(0.0)};     // da13

  std::vector<Complex> fpart(4);
  for (int a = 0; a < 4; ++a) fpart[a] = ev.value(f_contact_partials[a]);

  StructureTensor out(n);
  for (int i = 0; i < n; ++i) {
    TwoFormValue C(n, Complex(0.0));
    // dM_ij ^ beta^j
    for (int j = 0; j < n; ++j) {
      if (M.entries[i][j].is_zero()) continue;
      for (int v = 0; v < nv; ++v) {
        const Expr& pd = deriv.partials[i][j][v];
        if (pd.is_zero()) continue;
        const Complex rho = ev.value(pd);
        C.add(coord[v].main, j + 1, rho);
        if (coord[v].shift != Complex(0.0)) {
          C.add(5, j + 1, rho * coord[v].shift);
        }
      }
    }
    // M_ij dbeta^j: dbeta^1..3 = -beta^(j+1)^beta^5, dbeta^4 from f.
    for (int j = 0; j < 3; ++j) {
      const Complex mij = Mv(i, j);
      if (mij != Complex(0.0)) C.add(j + 2, 5, -mij);
    }
    const Complex mi4 = Mv(i, 3);
    if (mi4 != Complex(0.0)) {
      for (int a = 1; a <= 4; ++a) C.add(a, 5, -mi4 * fpart[a - 1]);
    }

    // Into the theta basis: T = N^T C N.
    Eigen::MatrixXcd Cm(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) Cm(a, b) = C.at(a + 1, b + 1);
    const Eigen::MatrixXcd T = N.transpose() * Cm * N;
    for (int j = 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k)
        out.set(i + 1, j, k, (T(j - 1, k - 1) - T(k - 1, j - 1)) / 2.0);
  }
  return out;
}

}  // namespace

StructureTensor structure_tensor_at(const CoframeMatrix& M, const Expr& f,
                                    const JetSample& pt,
                                    const ParamBinding& params,
                                    const StructureOptions& opts) {
  M.check_shape();
  const EntryDerivatives deriv = differentiate_entries(M);
  DiffContext ctx;
  std::vector<Expr> fp;
  for (JetVar v : {JetVar::U, JetVar::P, JetVar::Q, JetVar::R})
    fp.push_back(ctx.partial(f, v));
  bool singular = false;
  StructureTensor t =
      tensor_at_sample(M, deriv, f, fp, pt, params, opts, &singular);
  if (singular) throw SingularCoframe("coframe singular at the given sample");
  return t;
}

StructureFingerprint structure_functions(const CoframeMatrix& M, const Expr& f,
                                         const std::vector<JetSample>& pts,
                                         const ParamBinding& params,
                                         const StructureOptions& opts) {
  M.check_shape();
  const EntryDerivatives deriv = differentiate_entries(M);
  DiffContext ctx;
  std::vector<Expr> fp;
  for (JetVar v : {JetVar::U, JetVar::P, JetVar::Q, JetVar::R})
    fp.push_back(ctx.partial(f, v));

  StructureFingerprint fpout;
  fpout.n = M.n;
  fpout.tag = M.tag;
  fpout.orbit = M.orbit.empty()
                    ? std::vector<std::array<Complex, 6>>{kIdentityDiag}
                    : M.orbit;

  for (const JetSample& pt : pts) {
    bool singular = false;
    StructureTensor t;
    try {
      t = tensor_at_sample(M, deriv, f, fp, pt, params, opts, &singular);
    } catch (const EvalError&) {
      singular = true;  // pole inside an entry: treat like a bad sample
    }
    if (singular) {
      fpout.samples_singular++;
      continue;
    }
    if (fpout.per_sample.empty()) {
      fpout.per_sample.push_back(t);
      fpout.orbit_choice.push_back(0);
    } else {
      // Align to the first sample over the radical-branch orbit.
      int best = 0;
      StructureTensor best_t = t;
      double best_d = tensor_distance(t, fpout.per_sample.front());
      for (std::size_t oi = 1; oi < fpout.orbit.size(); ++oi) {
        StructureTensor cand = conjugate(t, fpout.orbit[oi]);
        const double d = tensor_distance(cand, fpout.per_sample.front());
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(oi);
          best_t = cand;
        }
      }
      fpout.per_sample.push_back(best_t);
      fpout.orbit_choice.push_back(best);
    }
    fpout.samples_used++;
  }

  if (fpout.samples_used == 0 ||
      fpout.samples_singular > static_cast<int>(pts.size()) / 2) {
    throw SingularCoframe("coframe singular at more than half of the samples");
  }

  const int n = fpout.n;
  StructureTensor mean(n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) {
        Complex acc(0.0);
        for (const auto& t : fpout.per_sample) acc += t.at(i, j, k);
        mean.set(i, j, k, acc / static_cast<double>(fpout.samples_used));
      }
  fpout.mean = mean;

  double dev = 0.0;
  for (const auto& t : fpout.per_sample)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) {
          const Complex m = mean.at(i, j, k);
          const double d = std::abs(t.at(i, j, k) - m) / (1.0 + std::abs(m));
          dev = std::max(dev, d);
        }
  fpout.max_deviation = dev;
  fpout.constant = dev <= opts.constancy_tol;
  return fpout;
}

std::string StructureFingerprint::serialize(double print_eps) const {
  std::string out;
  char buf[96];
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) {
        const Complex v = mean.at(i, j, k);
        if (std::abs(v) <= print_eps) continue;
        // Normalize negative zeros so dumps are byte-stable.
        const double re = v.real() == 0.0 ? 0.0 : v.real();
        const double im = v.imag() == 0.0 ? 0.0 : v.imag();
        std::snprintf(buf, sizeof(buf), "T[%d][%d][%d] = %.6f,%.6f\n", i, j, k,
                      re, im);
        out += buf;
      }
  return out;
}

bool fingerprint_match(const StructureFingerprint& a,
                       const StructureFingerprint& b, double tol) {
  if (!a.constant || !b.constant) {
    throw NonConstantFingerprint(
        "fingerprint matching requires constant structure functions");
  }
  if (a.n != b.n) return false;
  const int n = a.n;
  auto matches = [&](const StructureTensor& x, const StructureTensor& y) {
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) {
          const Complex yv = y.at(i, j, k);
          const double d = std::abs(x.at(i, j, k) - yv);
          const double bound = std::abs(yv) < 1.0 ? tol : tol * std::abs(yv);
          if (d > bound) return false;
        }
    return true;
  };
  const auto& orbit = b.orbit.empty()
                          ? std::vector<std::array<Complex, 6>>{kIdentityDiag}
                          : b.orbit;
  for (const auto& diag : orbit) {
    if (matches(a.mean, conjugate(b.mean, diag))) return true;
  }
  return false;
}

double jacobi_residual(const StructureFingerprint& fp) {
  if (!fp.constant) {
    throw NonConstantFingerprint("d^2 check applies to constant fingerprints");
  }
  const int n = fp.n;
  const StructureTensor& T = fp.mean;
  double worst = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int a = 1; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b)
        for (int c = b + 1; c <= n; ++c) {
          Complex acc(0.0);
          double scale = 0.0;  // largest term; the cancellation reference
          for (int m = 1; m <= n; ++m) {
            const Complex t1 = T.at(i, m, c) * T.at(m, a, b);
            const Complex t2 = T.at(i, m, a) * T.at(m, b, c);
            const Complex t3 = T.at(i, m, b) * T.at(m, c, a);
            acc += t1 + t2 + t3;
            scale = std::max({scale, std::abs(t1), std::abs(t2),
                              std::abs(t3)});
          }
          worst = std::max(worst, std::abs(acc) / (1.0 + scale));
        }
  return worst;
}

}  // namespace odeq
