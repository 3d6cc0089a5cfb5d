#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "odeq/eval.hpp"

namespace odeq {

/// Deterministic random source with platform-independent output. Complex
/// samples are drawn from an annulus: modulus uniform in a range, argument
/// uniform on the circle.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b9ull) {}

  /// Derives an independent deterministic substream for a named stage.
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t stream);

  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  Complex annulus(double mod_min, double mod_max);

 private:
  std::uint64_t next();
  std::uint64_t state_;
};

struct ZeroTestConfig {
  int sample_count = 24;       // >= 8
  double tolerance = 1e-8;     // < 1
  std::uint64_t seed = 42;
  double modulus_min = 0.5;    // sampling annulus per variable
  double modulus_max = 2.0;
  int pole_retry_factor = 8;   // resample budget = factor * sample_count

  void validate() const;
};

class InconclusiveZeroTest : public std::runtime_error {
 public:
  explicit InconclusiveZeroTest(const std::string& msg)
      : std::runtime_error(msg) {}
};

enum class ZeroStatus { Zero, NonZero };

struct ZeroEvidence {
  ZeroStatus status = ZeroStatus::Zero;
  int samples_used = 0;
  double max_abs = 0.0;        // largest |value| seen
  double max_rel = 0.0;        // largest |value| / (1 + subterm scale)
};

JetSample draw_jet_sample(SampleRng& rng, double mod_min, double mod_max,
                          bool with_a13);

/// Draws cfg.sample_count admissible samples for the given stage name.
std::vector<JetSample> draw_samples(const ZeroTestConfig& cfg,
                                    std::uint64_t stream, bool with_a13);

/// Probabilistic identity-zero test: e is declared zero iff
/// |e| < tolerance * (1 + largest subterm magnitude) at every admissible
/// sample. Pole hits are resampled within a bounded budget; parameters of e
/// without a binding are drawn per sample from the same annulus.
/// Deterministic for a fixed seed.
ZeroEvidence zero_test(const Expr& e, const ZeroTestConfig& cfg,
                       const ParamBinding& params = {});

bool is_identically_zero(const Expr& e, const ZeroTestConfig& cfg,
                         const ParamBinding& params = {});

}  // namespace odeq
