#include "odeq/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace odeq {

namespace {

std::string fmt(const Complex& v) {
  char buf[80];
  const double re = v.real() == 0.0 ? 0.0 : v.real();
  const double im = v.imag() == 0.0 ? 0.0 : v.imag();
  if (im == 0.0) {
    std::snprintf(buf, sizeof(buf), "%.9g", re);
  } else {
    std::snprintf(buf, sizeof(buf), "%.9g%+.9gi", re, im);
  }
  return buf;
}

}  // namespace

std::string snap_rational(const Complex& v) {
  if (std::abs(v.imag()) < 1e-9) {
    const double x = v.real();
    for (int den = 1; den <= 60; ++den) {
      const double num = x * den;
      const double rounded = std::round(num);
      if (std::abs(num - rounded) < 1e-6 * den && std::abs(rounded) < 1e6) {
        const Rational r(static_cast<std::int64_t>(rounded), den);
        return r.str();
      }
    }
  }
  return fmt(v);
}

std::string dump_invariants(const Expr& f, const ZeroTestConfig& cfg,
                            const ParamBinding& params) {
  std::ostringstream out;
  const BaseInvariants base = base_invariants(f);
  const bool i4_zero =
      zero_test(base.I4, cfg, params).status == ZeroStatus::Zero;

  std::map<std::string, Expr> items;
  std::string family;
  if (i4_zero) {
    family = "I4 = 0 (branch A)";
    items = branchA_invariants(f, cfg, params).items();
  } else {
    const BranchBInvariants probe =
        branchB_invariants(f, BranchBDepth::PlusI8, cfg, params);
    BranchBDepth depth = BranchBDepth::I5_I7;
    if (is_identically_zero(probe.I5, cfg, params)) {
      depth = is_identically_zero(*probe.I8, cfg, params)
                  ? BranchBDepth::PlusEStruct
                  : BranchBDepth::PlusI8;
    }
    family = "I4 != 0 (branch B)";
    items = branchB_invariants(f, depth, cfg, params).items();
  }

  out << "f = " << f.str() << "\n";
  out << "family = " << family << "\n";
  for (const auto& [name, e] : items) {
    out << name << " = " << e.str() << "\n";
  }

  SampleRng rng(SampleRng::substream(cfg.seed, 0x696e76ull));  // "inv"
  const int table_points = 3;
  for (int s = 0; s < table_points; ++s) {
    const JetSample pt =
        draw_jet_sample(rng, cfg.modulus_min, cfg.modulus_max, false);
    out << "sample[" << s << "] at (x,u,p,q,r) = (" << fmt(pt.x) << ", "
        << fmt(pt.u) << ", " << fmt(pt.p) << ", " << fmt(pt.q) << ", "
        << fmt(pt.r) << ")\n";
    Evaluator ev(pt, params);
    for (const auto& [name, e] : items) {
      std::string value;
      try {
        value = fmt(ev.value(e));
      } catch (const EvalError& err) {
        value = std::string("<") + err.what() + ">";
      }
      out << "  " << name << " = " << value << "\n";
    }
  }
  return out.str();
}

std::string dump_structure(const Expr& f, const ZeroTestConfig& cfg,
                           const ParamBinding& params,
                           const std::map<std::string, int>& selectors) {
  const BranchReport report = classify(f, params, cfg, selectors);
  std::ostringstream out;
  out << "f = " << f.str() << "\n";
  out << "branch = " << (report.branch ? branch_name(*report.branch) : "none")
      << "\n";
  if (!report.fingerprint) {
    out << "fingerprint = unavailable (" << report.outside_reason << ")\n";
    return out.str();
  }
  const StructureFingerprint& fp = *report.fingerprint;
  out << "constant = " << (fp.constant ? "true" : "false") << "\n";
  out << "deviation = " << fmt(Complex(fp.max_deviation)) << "\n";
  out << fp.serialize();
  if (fp.n == 6 && fp.constant) {
    // The e-structure constants in their conventional slots.
    const int slots[8][3] = {{2, 1, 4}, {2, 2, 3}, {3, 2, 4}, {4, 3, 4},
                             {5, 1, 4}, {5, 3, 5}, {6, 2, 4}, {6, 4, 5}};
    for (int i = 0; i < 8; ++i) {
      out << "c" << (i + 1) << " = "
          << snap_rational(fp.mean.at(slots[i][0], slots[i][1], slots[i][2]))
          << "\n";
    }
  }
  return out.str();
}

}  // namespace odeq
