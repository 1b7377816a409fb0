#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace kt {

/// Mixes (seed, stream) into an independent child seed. Used everywhere a
/// per-instance or per-chain stream is derived, so parallel generation stays
/// reproducible regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic random source. All draws go through explicit conversions of
/// the raw mt19937_64 output (whose sequence is fixed by the standard), never
/// through std::*_distribution, so results are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Requires n >= 1.
  int uniform_int(int n);

  /// Index drawn from an explicit probability vector (need not be
  /// normalized; negative entries are a caller bug).
  int categorical(std::span<const double> weights);

  /// Index drawn from unnormalized log-weights, computed in log-space.
  int categorical_logits(std::span<const double> logits);

 private:
  std::mt19937_64 gen_;
};

}  // namespace kt
