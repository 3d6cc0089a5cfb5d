#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "odeq/calculus.hpp"
#include "odeq/zerotest.hpp"

namespace odeq {

class SingularCoframe : public std::runtime_error {
 public:
  explicit SingularCoframe(const std::string& msg) : std::runtime_error(msg) {}
};

class NonConstantFingerprint : public std::runtime_error {
 public:
  explicit NonConstantFingerprint(const std::string& msg)
      : std::runtime_error(msg) {}
};

/// Classification branches of the four invariant coframes.
enum class BranchTag { T1, T2, T3, T4 };
const char* branch_name(BranchTag t);

/// Coefficients of a 1-form in the base coframe beta^1..beta^n (1-indexed
/// externally, stored 0-indexed).
using OneFormExpr = std::vector<Expr>;

/// Antisymmetric matrix of 2-form coefficients: omega = sum_{a<b} c(a,b)
/// beta^a ^ beta^b. Writes through add() keep antisymmetry by construction.
template <typename T>
class TwoForm {
 public:
  explicit TwoForm(int n, const T& zero) : n_(n), c_(n * n, zero) {}
  int dim() const { return n_; }
  const T& at(int a, int b) const { return c_[(a - 1) * n_ + (b - 1)]; }
  void add(int a, int b, const T& v) {
    c_[(a - 1) * n_ + (b - 1)] = c_[(a - 1) * n_ + (b - 1)] + v;
    c_[(b - 1) * n_ + (a - 1)] = c_[(b - 1) * n_ + (a - 1)] - v;
  }

 private:
  int n_;
  std::vector<T> c_;
};

using TwoFormExpr = TwoForm<Expr>;
using TwoFormValue = TwoForm<Complex>;

/// dbeta^i of the base coframe in the beta^beta basis:
///   dbeta^1 = -beta^2^beta^5, dbeta^2 = -beta^3^beta^5,
///   dbeta^3 = -beta^4^beta^5,
///   dbeta^4 = -(f_u beta^1 + f_p beta^2 + f_q beta^3 + f_r beta^4)^beta^5,
///   dbeta^5 = 0, dbeta^6 = 0.
std::vector<TwoFormExpr> base_differentials(const Expr& f, int n);

/// Rewrites a coordinate differential in the base coframe:
/// du = beta^1 + p beta^5, ..., dx = beta^5, da13 = beta^6.
OneFormExpr coordinate_to_base(JetVar v, const Expr& f, int n);

/// Invariant (or adapted) coframe theta = M beta as a matrix of symbolic
/// entries, together with the finite group of diagonal conjugations induced
/// by the radical branch choices of its construction.
struct CoframeMatrix {
  int n = 5;
  std::optional<BranchTag> tag;
  std::vector<std::vector<Expr>> entries;
  std::vector<std::array<Complex, 6>> orbit;  // identity first
  std::map<std::string, int> selectors;

  const Expr& at(int i, int j) const { return entries[i - 1][j - 1]; }
  void check_shape() const;
};

/// Structure tensor T^i_{jk}, antisymmetric in (j,k), 1-indexed accessors.
class StructureTensor {
 public:
  StructureTensor() = default;
  explicit StructureTensor(int n) : n_(n), t_(n * n * n, Complex(0.0)) {}
  int dim() const { return n_; }
  Complex at(int i, int j, int k) const {
    return t_[((i - 1) * n_ + (j - 1)) * n_ + (k - 1)];
  }
  void set(int i, int j, int k, Complex v) {
    t_[((i - 1) * n_ + (j - 1)) * n_ + (k - 1)] = v;
    t_[((i - 1) * n_ + (k - 1)) * n_ + (j - 1)] = -v;
  }

 private:
  int n_ = 0;
  std::vector<Complex> t_;
};

/// Conjugation law for theta -> D theta with constant diagonal D:
/// T'^i_{jk} = D_i T^i_{jk} / (D_j D_k).
StructureTensor conjugate(const StructureTensor& t,
                          const std::array<Complex, 6>& diag);

/// The structure functions of a coframe over a set of samples, aligned
/// across samples by the radical-branch conjugation orbit, with the
/// constancy verdict.
struct StructureFingerprint {
  int n = 5;
  std::optional<BranchTag> tag;
  bool constant = false;
  double max_deviation = 0.0;
  StructureTensor mean;
  std::vector<StructureTensor> per_sample;
  std::vector<int> orbit_choice;
  int samples_used = 0;
  int samples_singular = 0;
  std::vector<std::array<Complex, 6>> orbit;

  /// Canonical key-sorted dump "T[i][j][k] = re,im" (j < k, entries above
  /// the print threshold).
  std::string serialize(double print_eps = 1e-7) const;
};

struct StructureOptions {
  double constancy_tol = 1e-8;
  // Relative pivot threshold: a sample counts as singular when a pivot
  // collapses against the largest one, not when the determinant is merely
  // small on a uniformly scaled coframe.
  double singular_threshold = 1e-12;
};

/// Evaluates d theta^i = dM ^ beta + M dbeta at each sample, conjugates into
/// the theta basis by M^-1, and aggregates the tensors across samples.
/// Samples where M is singular are skipped; more than half singular is an
/// error.
StructureFingerprint structure_functions(const CoframeMatrix& M, const Expr& f,
                                         const std::vector<JetSample>& pts,
                                         const ParamBinding& params,
                                         const StructureOptions& opts = {});

/// Structure-tensor of a single sample (no aggregation); used by tests.
StructureTensor structure_tensor_at(const CoframeMatrix& M, const Expr& f,
                                    const JetSample& pt,
                                    const ParamBinding& params,
                                    const StructureOptions& opts = {});

/// True iff both fingerprints are constant and agree entrywise within tol
/// (absolute below modulus 1, relative above) for some orbit conjugation.
bool fingerprint_match(const StructureFingerprint& a,
                       const StructureFingerprint& b, double tol);

/// Largest Jacobi-identity residual of a constant-structure fingerprint;
/// the numeric d^2 = 0 check.
double jacobi_residual(const StructureFingerprint& fp);

}  // namespace odeq
