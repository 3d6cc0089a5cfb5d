#pragma once

#include "odeq/canonical.hpp"

namespace odeq {

struct InvariantStatus {
  ZeroStatus status = ZeroStatus::Zero;
  double max_abs = 0.0;
  double max_rel = 0.0;
};

struct RecoveredParam {
  std::string name;
  Complex value;
  std::vector<Complex> roots;  // all admissible roots when sign is lost
};

/// Everything the decision procedure concluded about one input, serialized
/// deterministically for a fixed seed.
struct BranchReport {
  std::string input_text;
  ParamBinding input_params;
  ZeroTestConfig cfg;
  std::map<std::string, InvariantStatus> statuses;
  std::optional<BranchTag> branch;
  std::string verdict;          // "matched" | "outside-scope"
  std::string outside_reason;   // names the failing condition
  std::optional<StructureFingerprint> fingerprint;
  std::string matched_id;
  std::string matched_algebra;
  std::vector<RecoveredParam> recovered;
  std::map<std::string, int> selectors;
  TypoSwitches switches;
  std::vector<std::string> notes;

  bool matched() const { return !matched_id.empty(); }
  /// Key-sorted flat "key = value" document.
  std::string serialize_structured() const;
  /// Sectioned human-readable report built from the same entries.
  std::string serialize_text() const;
};

/// The end-to-end decision procedure: branch on the relative invariants,
/// build the branch coframe, match the fingerprint against the canonical
/// database (enumerating radical selectors), recover parameters.
BranchReport classify(const Expr& f, const ParamBinding& params,
                      const ZeroTestConfig& cfg,
                      const std::map<std::string, int>& selectors = {},
                      TypoSwitches switches = {});

enum class BVariant { iv, vi };
enum class KVariant { T2_v, T3_ii };

/// b from T^2_24 / T^5_45 = -b (variant iv) or its reciprocal (variant vi).
Complex recover_b(const StructureFingerprint& fp, BVariant variant);

struct KRecovery {
  Complex primary;
  std::vector<Complex> roots;
};

/// K from T^4_25 = (3K^2-4)/(8K^2) (T2 form (v)) or T^3_13 = (2K-3)/K
/// (T3 form (ii)). The quadratic relation loses the sign of K; the root
/// with positive real part is primary and both roots are reported.
KRecovery recover_K(const StructureFingerprint& fp, KVariant variant);

}  // namespace odeq
