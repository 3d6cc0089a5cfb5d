#pragma once

#include "odeq/classify.hpp"

namespace odeq {

/// "name = <expression>" lines for the branch-appropriate invariant family
/// of f, followed by a numeric table at a few report sample points.
std::string dump_invariants(const Expr& f, const ZeroTestConfig& cfg,
                            const ParamBinding& params = {});

/// Branch header plus the canonical key-sorted fingerprint map; appends the
/// c1..c8 aliases for six-dimensional e-structure fingerprints.
std::string dump_structure(const Expr& f, const ZeroTestConfig& cfg,
                           const ParamBinding& params = {},
                           const std::map<std::string, int>& selectors = {});

/// Best-effort "p/q" rendering of a numeric constant (denominator <= 60,
/// tolerance 1e-6); falls back to a decimal.
std::string snap_rational(const Complex& v);

}  // namespace odeq
