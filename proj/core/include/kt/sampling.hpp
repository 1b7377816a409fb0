#pragma once

#include <cstdint>

#include "kt/mapping.hpp"
#include "kt/model.hpp"
#include "kt/rng.hpp"

namespace kt {

struct SamplerConfig {
  std::uint64_t n_samples = 0;
  std::uint64_t burn_in = 1000;
  std::uint64_t thin = 10;
  std::uint64_t seed = 0;
};

/// Single-site Gibbs sampling: sweeps variables in schema order, each
/// conditional computed from the features touching the flipped variable only.
/// The chain starts uniform-random, discards burn_in sweeps, then keeps one
/// assignment every `thin` sweeps. Deterministic given the seed.
Dataset gibbs_sample(const LogLinearModel& model, const SamplerConfig& cfg);

/// One target-schema draw conditioned on a complete source instance: each
/// correspondence's C'_i is drawn independently from the table row selected
/// by the instance's C_i values; target variables in no correspondence are
/// drawn uniform.
Assignment sample_target_given_source(const Mapping& m, const Assignment& source_instance,
                                      Rng& rng);

/// Translates a source dataset into n_total target instances, drawing
/// ceil(n_total / |src|) samples per source instance and truncating to
/// n_total. Per-instance streams are derived from (seed, instance index).
Dataset translate_dataset(const Mapping& m, const Dataset& source_data,
                          std::uint64_t n_total, std::uint64_t seed);

}  // namespace kt
