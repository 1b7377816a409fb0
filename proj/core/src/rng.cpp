#include "kt/rng.hpp"

#include <algorithm>
#include <cmath>

#include "kt/error.hpp"

namespace kt {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= stream * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull;
  std::uint64_t b = splitmix64(state);
  return a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
}

int Rng::uniform_int(int n) {
  if (n < 1) throw ContractError("Rng::uniform_int: n must be >= 1");
  // Rejection sampling over the top bits; unbiased and portable.
  const std::uint64_t span = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return static_cast<int>(x % span);
}

int Rng::categorical(std::span<const double> weights) {
  if (weights.empty()) throw ContractError("Rng::categorical: empty weights");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ContractError("Rng::categorical: non-positive mass");
  double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size() - 1);
}

int Rng::categorical_logits(std::span<const double> logits) {
  if (logits.empty()) throw ContractError("Rng::categorical_logits: empty logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double l : logits) total += std::exp(l - m);
  double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < logits.size(); ++i) {
    acc += std::exp(logits[i] - m);
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(logits.size() - 1);
}

}  // namespace kt
