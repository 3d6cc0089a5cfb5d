#include "odeq/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace odeq {

namespace {

constexpr double kDegenerate = 1e-9;

std::string fmt_complex(const Complex& v) {
  char buf[64];
  double re = v.real() == 0.0 ? 0.0 : v.real();
  double im = v.imag() == 0.0 ? 0.0 : v.imag();
  // Drop numeric dust so recovered real parameters print as reals.
  if (std::abs(im) <= 1e-9 * (1.0 + std::abs(re))) im = 0.0;
  if (re != 0.0 && std::abs(re) <= 1e-12 * std::abs(im)) re = 0.0;
  std::snprintf(buf, sizeof(buf), "%.9g", re);
  std::string out = buf;
  if (im != 0.0) {
    std::snprintf(buf, sizeof(buf), "%+.9gi", im);
    out += buf;
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

InvariantStatus to_status(const ZeroEvidence& ev) {
  return {ev.status, ev.max_abs, ev.max_rel};
}

}  // namespace

Complex recover_b(const StructureFingerprint& fp, BVariant variant) {
  if (!fp.constant) {
    throw NonConstantFingerprint("b recovery needs a constant fingerprint");
  }
  if (fp.tag && *fp.tag != BranchTag::T2) {
    throw BranchViolation(
        std::string("b relation applies to the T2 branch; fingerprint is ") +
        branch_name(*fp.tag));
  }
  const Complex t224 = fp.mean.at(2, 2, 4);
  const Complex t545 = fp.mean.at(5, 4, 5);
  const Complex den = variant == BVariant::iv ? t545 : t224;
  const Complex num = variant == BVariant::iv ? t224 : t545;
  if (std::abs(den) < kDegenerate) {
    throw BranchViolation(
        "b recovery denominator below tolerance; input is outside this "
        "parametric family");
  }
  return -num / den;
}

KRecovery recover_K(const StructureFingerprint& fp, KVariant variant) {
  if (!fp.constant) {
    throw NonConstantFingerprint("K recovery needs a constant fingerprint");
  }
  const BranchTag want =
      variant == KVariant::T3_ii ? BranchTag::T3 : BranchTag::T2;
  if (fp.tag && *fp.tag != want) {
    throw BranchViolation(std::string("K relation applies to the ") +
                          branch_name(want) + " branch; fingerprint is " +
                          branch_name(*fp.tag));
  }
  KRecovery out;
  if (variant == KVariant::T3_ii) {
    // T^3_13 = (2K-3)/K  =>  K = 3/(2 - T).
    const Complex t = fp.mean.at(3, 1, 3);
    const Complex den = Complex(2.0) - t;
    if (std::abs(den) < kDegenerate) {
      throw BranchViolation("K relation unsolvable: T3_13 at the K->inf limit");
    }
    out.primary = Complex(3.0) / den;
    out.roots = {out.primary};
    return out;
  }
  // T^4_25 = (3K^2-4)/(8K^2)  =>  K^2 = 4/(3 - 8T).
  const Complex t = fp.mean.at(4, 2, 5);
  const Complex den = Complex(3.0) - Complex(8.0) * t;
  if (std::abs(den) < kDegenerate) {
    throw BranchViolation("K relation unsolvable: T4_25 at the K->inf limit");
  }
  const Complex k = std::sqrt(Complex(4.0) / den);
  const Complex kpos = k.real() >= 0.0 ? k : -k;
  out.primary = kpos;
  out.roots = {kpos, -kpos};
  return out;
}

namespace {

struct Matcher {
  const Expr& f;
  const ParamBinding& params;
  const ZeroTestConfig& cfg;
  BranchReport& report;

  bool try_form(const std::string& id, const ParamBinding& form_params,
                const std::vector<RecoveredParam>& recovered) {
    const StructureFingerprint& fp = *report.fingerprint;
    StructureFingerprint canon;
    try {
      canon = canonical_fingerprint(id, form_params, cfg);
    } catch (const BranchViolation& e) {
      report.notes.push_back(std::string("skipped ") + id + ": " + e.what());
      return false;
    } catch (const SingularCoframe& e) {
      report.notes.push_back(std::string("skipped ") + id + ": " + e.what());
      return false;
    }
    if (!canon.constant) return false;
    if (!fingerprint_match(fp, canon, cfg.tolerance * 10)) return false;
    report.matched_id = id;
    report.matched_algebra = find_canonical(id)->algebra;
    report.recovered = recovered;
    report.verdict = "matched";
    return true;
  }
};

void classify_branch_a(const Expr& f, const ParamBinding& params,
                       const ZeroTestConfig& cfg,
                       const std::map<std::string, int>& selectors,
                       TypoSwitches switches, BranchReport& report) {
  auto get = [&selectors](const char* name) {
    auto it = selectors.find(name);
    return it == selectors.end() ? 0 : it->second;
  };
  const BranchAInvariants inv = branchA_invariants(
      f, cfg, params, get("J6"), get("J10"), switches);

  const ZeroEvidence e5 = zero_test(inv.I5, cfg, params);
  const ZeroEvidence e8 = zero_test(inv.I8, cfg, params);
  const ZeroEvidence e9 = zero_test(inv.I9, cfg, params);
  const ZeroEvidence e6 = zero_test(inv.I6, cfg, params);
  const ZeroEvidence e10 = zero_test(inv.I10, cfg, params);
  report.statuses["I5"] = to_status(e5);
  report.statuses["I8"] = to_status(e8);
  report.statuses["I9"] = to_status(e9);
  report.statuses["I6"] = to_status(e6);
  report.statuses["I10"] = to_status(e10);

  auto fail = [&report](const std::string& cond) {
    report.verdict = "outside-scope";
    report.outside_reason =
        "I4 = 0 sub-branch condition failed: " + cond +
        "; only the sub-branch I5 = I8 = I9 = 0, I6 != 0, I10 != 0 is "
        "classified";
  };
  if (e5.status != ZeroStatus::Zero) return fail("I5 != 0");
  if (e8.status != ZeroStatus::Zero) return fail("I8 != 0");
  if (e9.status != ZeroStatus::Zero) return fail("I9 != 0");
  if (e6.status != ZeroStatus::NonZero) return fail("I6 == 0");
  if (e10.status != ZeroStatus::NonZero) return fail("I10 == 0");

  report.branch = BranchTag::T1;
  const CoframeMatrix M = build_branch_coframe(inv);
  StructureOptions opts;
  opts.constancy_tol = cfg.tolerance;
  const std::vector<JetSample> pts = draw_samples(cfg, 0x667072ull, false);
  report.fingerprint = structure_functions(M, f, pts, params, opts);
  report.selectors = M.selectors;
  if (!report.fingerprint->constant) {
    report.verdict = "outside-scope";
    report.outside_reason =
        "structure functions are not constant on the T1 coframe";
    return;
  }
  Matcher m{f, params, cfg, report};
  // The only classified form in this branch: the (15,5) representative at
  // K = 0.
  if (m.try_form("6qr/p-6q^3/p^2+K(3q^2-2pr)^(3/2)/p^2",
                 {{"K", Complex(0.0)}},
                 {{"K", Complex(0.0), {Complex(0.0)}}})) {
    return;
  }
  report.verdict = "outside-scope";
  report.outside_reason =
      "constant structure functions do not match the classified T1 form";
}

void classify_branch_b(const Expr& f, const ParamBinding& params,
                       const ZeroTestConfig& cfg,
                       const std::map<std::string, int>& selectors,
                       BranchReport& report) {
  auto get = [&selectors](const char* name) {
    auto it = selectors.find(name);
    return it == selectors.end() ? 0 : it->second;
  };

  const BranchBInvariants probe =
      branchB_invariants(f, BranchBDepth::PlusI8, cfg, params, get("J8"));
  const ZeroEvidence e5 = zero_test(probe.I5, cfg, params);
  report.statuses["I5"] = to_status(e5);

  BranchTag tag;
  if (e5.status == ZeroStatus::NonZero) {
    tag = BranchTag::T2;
  } else {
    const ZeroEvidence e8 = zero_test(*probe.I8, cfg, params);
    report.statuses["I8"] = to_status(e8);
    tag = e8.status == ZeroStatus::NonZero ? BranchTag::T3 : BranchTag::T4;
  }
  report.branch = tag;
  if (tag != BranchTag::T2) {
    report.notes.push_back(
        "I8 reads Dx of the whole (I4 - I4_r f); I5 = 0 makes I4_r vanish "
        "identically, so the alternative reading coincides");
  }

  report.fingerprint = branch_fingerprint(f, tag, params, cfg, selectors);
  const StructureFingerprint& fp = *report.fingerprint;
  if (tag == BranchTag::T3) report.selectors = {{"J8", get("J8")}};
  if (!fp.constant) {
    report.verdict = "outside-scope";
    report.outside_reason = std::string(
        "structure functions are not constant on the ") +
        branch_name(tag) + " coframe";
    return;
  }

  Matcher m{f, params, cfg, report};
  switch (tag) {
    case BranchTag::T2: {
      if (m.try_form("exp(r)", {}, {})) return;
      if (m.try_form("r^(3/2)", {}, {})) return;
      if (m.try_form("r^(4/3)", {}, {})) return;
      // (15,5) with K != 0, K recovered from T4_25.
      try {
        const KRecovery k = recover_K(fp, KVariant::T2_v);
        if (std::abs(k.primary) > kDegenerate &&
            m.try_form("6qr/p-6q^3/p^2+K(3q^2-2pr)^(3/2)/p^2",
                       {{"K", k.primary}}, {{"K", k.primary, k.roots}})) {
          return;
        }
      } catch (const BranchViolation& e) {
        report.notes.push_back(std::string("K recovery: ") + e.what());
      }
      // Power-law families, b recovered from the torsion ratio.
      for (BVariant variant : {BVariant::iv, BVariant::vi}) {
        const char* id = variant == BVariant::iv ? "r^((b-3)/(b-2))"
                                                 : "r^((1-3b)/(1-2b))";
        try {
          const Complex b = recover_b(fp, variant);
          if (m.try_form(id, {{"b", b}}, {{"b", b, {b}}})) return;
        } catch (const BranchViolation& e) {
          report.notes.push_back(std::string("b recovery for ") + id + ": " +
                                 e.what());
        }
      }
      break;
    }
    case BranchTag::T3: {
      if (m.try_form("r^2", {}, {})) return;
      if (m.try_form("(5/3)r^2/q+q^(5/3)", {}, {})) return;
      if (m.try_form("(4/3)r^2/q+q^(7/3)", {}, {})) return;
      try {
        const KRecovery k = recover_K(fp, KVariant::T3_ii);
        if (m.try_form("K*r^2/q", {{"K", k.primary}},
                       {{"K", k.primary, k.roots}})) {
          return;
        }
      } catch (const BranchViolation& e) {
        report.notes.push_back(std::string("K recovery: ") + e.what());
      }
      break;
    }
    case BranchTag::T4: {
      if (m.try_form("(5/3)r^2/q", {}, {})) return;
      if (m.try_form("(4/3)r^2/q", {}, {})) return;
      break;
    }
    default:
      break;
  }
  report.verdict = "outside-scope";
  report.outside_reason =
      std::string("constant structure functions do not match any classified ") +
      branch_name(tag) + " form";
}

}  // namespace

BranchReport classify(const Expr& f, const ParamBinding& params,
                      const ZeroTestConfig& cfg,
                      const std::map<std::string, int>& selectors,
                      TypoSwitches switches) {
  cfg.validate();
  BranchReport report;
  report.input_text = f.str();
  report.input_params = params;
  report.cfg = cfg;
  report.switches = switches;

  const BaseInvariants base = base_invariants(f);
  const ZeroEvidence e4 = zero_test(base.I4, cfg, params);
  report.statuses["I4"] = to_status(e4);

  if (e4.status == ZeroStatus::Zero) {
    classify_branch_a(f, params, cfg, selectors, switches, report);
  } else {
    classify_branch_b(f, params, cfg, selectors, report);
  }
  return report;
}

namespace {

std::vector<std::pair<std::string, std::string>> report_entries(
    const BranchReport& r) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("report.format", "odeq.branch-report.v1");
  kv.emplace_back("input.f", r.input_text);
  for (const auto& [name, v] : r.input_params) {
    kv.emplace_back("input.params." + name, fmt_complex(v));
  }
  kv.emplace_back("config.samples", std::to_string(r.cfg.sample_count));
  kv.emplace_back("config.seed", std::to_string(r.cfg.seed));
  kv.emplace_back("config.tolerance", fmt_double(r.cfg.tolerance));
  kv.emplace_back("config.modulus",
                  fmt_double(r.cfg.modulus_min) + ".." +
                      fmt_double(r.cfg.modulus_max));
  for (const auto& [name, st] : r.statuses) {
    const std::string base = "invariants." + name;
    kv.emplace_back(base + ".status",
                    st.status == ZeroStatus::Zero ? "Zero" : "NonZero");
    kv.emplace_back(base + ".max_abs", fmt_double(st.max_abs));
    kv.emplace_back(base + ".max_rel", fmt_double(st.max_rel));
  }
  kv.emplace_back("branch.tag", r.branch ? branch_name(*r.branch) : "none");
  kv.emplace_back("branch.verdict", r.verdict);
  if (!r.outside_reason.empty()) {
    kv.emplace_back("branch.reason", r.outside_reason);
  }
  if (r.fingerprint) {
    const StructureFingerprint& fp = *r.fingerprint;
    kv.emplace_back("fingerprint.constant", fp.constant ? "true" : "false");
    kv.emplace_back("fingerprint.deviation", fmt_double(fp.max_deviation));
    kv.emplace_back("fingerprint.samples", std::to_string(fp.samples_used));
    kv.emplace_back("fingerprint.singular",
                    std::to_string(fp.samples_singular));
    std::istringstream lines(fp.serialize());
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      kv.emplace_back("fingerprint." + line.substr(0, eq), line.substr(eq + 3));
    }
  }
  kv.emplace_back("match.form", r.matched_id.empty() ? "none" : r.matched_id);
  if (!r.matched_algebra.empty()) {
    kv.emplace_back("match.algebra", r.matched_algebra);
  }
  for (const auto& p : r.recovered) {
    kv.emplace_back("params." + p.name, fmt_complex(p.value));
    if (p.roots.size() > 1) {
      std::string roots;
      for (const auto& root : p.roots) {
        roots += (roots.empty() ? "" : ", ") + fmt_complex(root);
      }
      kv.emplace_back("params." + p.name + ".roots", roots);
    }
  }
  for (const auto& [name, b] : r.selectors) {
    kv.emplace_back("selectors." + name, std::to_string(b));
  }
  kv.emplace_back("resolutions.signs", r.switches.describe());
  kv.emplace_back("resolutions.parameter_slots",
                  "b: T2_24/T5_45 and its reciprocal; K: T4_25, T3_13 "
                  "(identity calibration, no remapping)");
  for (std::size_t i = 0; i < r.notes.size(); ++i) {
    kv.emplace_back("notes." + std::to_string(i), r.notes[i]);
  }
  return kv;
}

}  // namespace

std::string BranchReport::serialize_structured() const {
  auto kv = report_entries(*this);
  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k + " = " + v + "\n";
  }
  return out;
}

std::string BranchReport::serialize_text() const {
  auto kv = report_entries(*this);
  std::sort(kv.begin(), kv.end());
  const char* sections[] = {"input.",    "config.", "invariants.",
                            "branch.",   "fingerprint.", "match.",
                            "params.",   "selectors.",   "resolutions.",
                            "notes."};
  const char* titles[] = {"Input",       "Configuration", "Invariants",
                          "Branch",      "Fingerprint",   "Match",
                          "Parameters",  "Selectors",     "Resolutions",
                          "Notes"};
  std::string out;
  for (std::size_t s = 0; s < std::size(sections); ++s) {
    bool first = true;
    for (const auto& [k, v] : kv) {
      if (k.rfind(sections[s], 0) != 0) continue;
      if (first) {
        out += std::string(s ? "\n" : "") + "[" + titles[s] + "]\n";
        first = false;
      }
      out += "  " + k.substr(std::string(sections[s]).size()) + " = " + v + "\n";
    }
  }
  return out;
}

}  // namespace odeq
