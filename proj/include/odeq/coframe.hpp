#pragma once

#include "odeq/forms.hpp"
#include "odeq/invariants.hpp"

namespace odeq {

/// The adapted coframe omega = Omega beta: unit lower-triangular with
/// (2,1) = -I0/2, (3,1) = (3/10)(I1+I2), (3,2) = -I0/2,
/// (4,2) = (1/10)(-3 I1 + 7 I2).
CoframeMatrix build_omega(const Expr& f);

/// 5x5 matrix of the adapted coframe as raw entries (used by the transform
/// machinery, where Omega enters products on its own).
std::vector<std::vector<Expr>> omega_entries(const BaseInvariants& inv);

/// Branch coframes theta = S omega, returned as the full matrix S*Omega
/// acting on the base coframe. T1 consumes the I4 = 0 family, T2-T4 the
/// I4 != 0 family (T4 is the six-dimensional e-structure).
CoframeMatrix build_branch_coframe(const BranchAInvariants& inv);
CoframeMatrix build_branch_coframe(BranchTag tag, const BranchBInvariants& inv);

/// The group-parameter factor S (or the 6x6 A) alone, before multiplication
/// by Omega; the transform module composes these across a map.
std::vector<std::vector<Expr>> branch_group_matrix(const BranchAInvariants& inv);
std::vector<std::vector<Expr>> branch_group_matrix(BranchTag tag,
                                                   const BranchBInvariants& inv);

/// Symbolic matrix product.
std::vector<std::vector<Expr>> matmul(const std::vector<std::vector<Expr>>& a,
                                      const std::vector<std::vector<Expr>>& b);

}  // namespace odeq
