#include "odeq/zerotest.hpp"

#include <cmath>

namespace odeq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SampleRng::substream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x632be59bd9b4e019ull * (stream + 1));
  splitmix64(x);
  return splitmix64(x);
}

std::uint64_t SampleRng::next() { return splitmix64(state_); }

double SampleRng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

Complex SampleRng::annulus(double mod_min, double mod_max) {
  const double m = uniform(mod_min, mod_max);
  const double a = uniform(0.0, kTwoPi);
  return {m * std::cos(a), m * std::sin(a)};
}

void ZeroTestConfig::validate() const {
  if (sample_count < 8) throw std::invalid_argument("sample_count must be >= 8");
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw std::invalid_argument("tolerance must be in (0, 1)");
  }
  if (!(modulus_min > 0.0 && modulus_max > modulus_min)) {
    throw std::invalid_argument("invalid sampling annulus");
  }
}

JetSample draw_jet_sample(SampleRng& rng, double mod_min, double mod_max,
                          bool with_a13) {
  JetSample pt;
  pt.x = rng.annulus(mod_min, mod_max);
  pt.u = rng.annulus(mod_min, mod_max);
  pt.p = rng.annulus(mod_min, mod_max);
  pt.q = rng.annulus(mod_min, mod_max);
  pt.r = rng.annulus(mod_min, mod_max);
  if (with_a13) pt.a13 = rng.annulus(mod_min, mod_max);
  return pt;
}

std::vector<JetSample> draw_samples(const ZeroTestConfig& cfg,
                                    std::uint64_t stream, bool with_a13) {
  cfg.validate();
  SampleRng rng(SampleRng::substream(cfg.seed, stream));
  std::vector<JetSample> pts;
  pts.reserve(cfg.sample_count);
  for (int i = 0; i < cfg.sample_count; ++i) {
    pts.push_back(draw_jet_sample(rng, cfg.modulus_min, cfg.modulus_max, with_a13));
  }
  return pts;
}

ZeroEvidence zero_test(const Expr& e, const ZeroTestConfig& cfg,
                       const ParamBinding& params) {
  cfg.validate();
  SampleRng rng(SampleRng::substream(cfg.seed, 0x7a657374ull));  // "zest"
  const bool with_a13 = e.contains(JetVar::A13);

  std::vector<std::string> free_params;
  for (const auto& name : e.param_names()) {
    if (!params.count(name)) free_params.push_back(name);
  }

  ZeroEvidence ev;
  const int budget = cfg.pole_retry_factor * cfg.sample_count;
  int attempts = 0;
  while (ev.samples_used < cfg.sample_count) {
    if (attempts++ >= budget) {
      throw InconclusiveZeroTest(
          "zero test inconclusive: too many samples hit poles");
    }
    JetSample pt =
        draw_jet_sample(rng, cfg.modulus_min, cfg.modulus_max, with_a13);
    ParamBinding bound = params;
    for (const auto& name : free_params) {
      bound[name] = rng.annulus(cfg.modulus_min, cfg.modulus_max);
    }
    try {
      Evaluator evtor(pt, bound);
      const Complex v = evtor.value(e);
      const double scale = evtor.scale(e);
      const double mag = std::abs(v);
      const double rel = mag / (1.0 + scale);
      ev.max_abs = std::max(ev.max_abs, mag);
      ev.max_rel = std::max(ev.max_rel, rel);
      ev.samples_used++;
      if (rel >= cfg.tolerance) ev.status = ZeroStatus::NonZero;
    } catch (const EvalError& err) {
      if (err.kind() != EvalErrorKind::NonFinite) throw;
      // pole: resample
    }
  }
  return ev;
}

bool is_identically_zero(const Expr& e, const ZeroTestConfig& cfg,
                         const ParamBinding& params) {
  return zero_test(e, cfg, params).status == ZeroStatus::Zero;
}

}  // namespace odeq
