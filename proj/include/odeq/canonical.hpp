#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odeq/coframe.hpp"

namespace odeq {

/// Scaling map that absorbs the constant K of the classification table's
/// K-carrying representative into the K-free one.
struct ScalingMap {
  std::string phi, psi;  // xbar = phi(x,u), ubar = psi(x,u); may contain K
  std::string k_form;    // the K-carrying right-hand side
};

struct CanonicalForm {
  std::string id;
  std::string algebra;   // "(m,n)" label, with the defining parameter note
  std::string f_text;
  BranchTag branch;      // branch of the generic member; (15,5) drops to T1
                         // at K = 0
  std::vector<std::string> params;
  std::vector<Rational> excluded;  // excluded values of the single parameter
  std::optional<ScalingMap> scaling;

  Expr f() const;
};

/// The twelve classified representatives.
const std::vector<CanonicalForm>& canonical_forms();
const CanonicalForm* find_canonical(const std::string& id);

/// The database as its versioned text serialization
/// ("id|algebra|f|branch|params|excluded|phi;psi|kform", one row per form).
std::string canonical_database_text();

/// Throws if the value hits one of the form's excluded parameter values
/// (within tol); the message names the guard.
void check_parameter_admissible(const CanonicalForm& form, const Complex& value,
                                double tol);

/// Full pipeline on a canonical form: invariants, branch coframe, structure
/// functions. Results are cached by (form, params, selectors, config).
StructureFingerprint canonical_fingerprint(
    const std::string& form_id, const ParamBinding& params,
    const ZeroTestConfig& cfg, const std::map<std::string, int>& selectors = {});

/// Same pipeline for an arbitrary f in a known branch (no caching).
StructureFingerprint branch_fingerprint(
    const Expr& f, BranchTag tag, const ParamBinding& params,
    const ZeroTestConfig& cfg, const std::map<std::string, int>& selectors = {},
    TypoSwitches switches = {});

}  // namespace odeq
