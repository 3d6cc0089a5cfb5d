#pragma once

#include "odeq/canonical.hpp"

namespace odeq {

class DegenerateTransform : public std::runtime_error {
 public:
  explicit DegenerateTransform(const std::string& msg)
      : std::runtime_error(msg) {}
};

/// A point transformation xbar = phi(x,u), ubar = psi(x,u). Parameters (K,
/// b) may appear; they are bound at verification time.
struct TransformCandidate {
  Expr phi, psi;
};

/// Third prolongation of a candidate along the source equation:
///   g = Dx psi / Dx phi, eta = Dx g / Dx phi, xi = Dx eta / Dx phi,
/// and the induced fourth-order value Dx xi / Dx phi.
struct ProlongedMap {
  Expr phi, psi;
  Expr g, eta, xi;
  Expr fbar_value;
  Expr dx_phi;
};

ProlongedMap prolong(const TransformCandidate& t, const Expr& f,
                     const ZeroTestConfig& cfg,
                     const ParamBinding& params = {});

struct VerifyResult {
  bool ok = false;
  double max_abs = 0.0;
  double max_rel = 0.0;
  int samples = 0;
};

/// True iff fbar_value - f_tgt(phi, psi, g, eta, xi) is identically zero by
/// sampling.
VerifyResult verify_transform(const TransformCandidate& t, const Expr& f_src,
                              const Expr& f_tgt, const ZeroTestConfig& cfg,
                              const ParamBinding& params = {});

enum class PdeKind { Prop1, Prop2 };

/// The triangular factor b = Mbar^-1 M relating the two sides' contact
/// forms. Barred-side entries are composed with the prolonged map, so they
/// live in the unknowns phi, psi, g, eta, xi (and a13 for Prop2) mixed with
/// the unbarred jet variables. Radical branch choices on the barred side
/// yield finitely many variants; variant 0 is primary.
struct BMatrix {
  int n = 5;
  PdeKind kind = PdeKind::Prop1;
  std::vector<std::vector<std::vector<Expr>>> variants;

  const std::vector<std::vector<Expr>>& entries(int variant = 0) const {
    return variants[variant];
  }
  int variant_count() const { return static_cast<int>(variants.size()); }
  /// Entry numbering b1..b13 (5x5) / b1..b18 (6x6); b12 is the spurious
  /// slot, identically zero.
  Expr b(int index, int variant = 0) const;
};

/// b = Mbar^-1 M for a pair classified into the same 5x5 branch; both
/// coframes must carry the same branch tag.
BMatrix b_matrix_5(const Expr& f_src, const Expr& f_tgt,
                   const CoframeMatrix& cof_src, const CoframeMatrix& cof_tgt,
                   const ProlongedMap& pm);

enum class SixDimTarget { FourThirds, FiveThirds };

/// b = (Abar Hbar)^-1 A H for a source in the e-structure branch against
/// one of the two six-symmetry targets, with abar13 = 1 substituted; the
/// barred matrices are assembled from the tabulated constants of the
/// two targets.
BMatrix b_matrix_6(const Expr& f_src, SixDimTarget target,
                   const ProlongedMap& pm, const ZeroTestConfig& cfg,
                   const ParamBinding& params = {});

struct PdeEquation {
  std::string lhs;          // "D[x] xi", "d/du eta", "b12"
  std::vector<Expr> rhs;    // one expression per selector variant
};

struct PdeSystem {
  PdeKind kind = PdeKind::Prop1;
  Expr f_src;
  Expr fbar_sym;            // target f in the symbols g, eta, xi
  std::vector<PdeEquation> equations;
  int variant_count = 1;

  /// Line-oriented dump of variant 0: "D[x] xi = ..." / "d/du xi = ...".
  std::string serialize() const;
};

/// Serializes the transformation system: 17 equations for the 5x5 case,
/// 21 (including the a13 block) for the six-dimensional one, with the
/// b-matrix entries inlined.
PdeSystem emit_pde_system(const BMatrix& b, PdeKind kind, const Expr& f_src,
                          const Expr& fbar_sym);

/// Substitutes the candidate (and its prolongation, and the auxiliary a13
/// for Prop2) into every equation and samples the residuals. A sample
/// passes when some single selector variant satisfies all equations at
/// once.
VerifyResult check_candidate_against_pde(const TransformCandidate& t,
                                         const std::optional<Expr>& aux_a13,
                                         const PdeSystem& sys,
                                         const ZeroTestConfig& cfg,
                                         const ParamBinding& params = {});

/// Convenience: classify both sides' branch, build coframes and the
/// b-matrix, and emit the system for the pair.
PdeSystem pde_system_for_pair(const Expr& f_src, const Expr& f_tgt,
                              PdeKind kind, const ZeroTestConfig& cfg,
                              const ParamBinding& params = {});

}  // namespace odeq
