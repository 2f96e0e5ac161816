#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "agentmix/rational.hpp"

namespace agentmix {

/// SplitMix64; small, seedable and identical on every platform, which keeps
/// seeded reports byte-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

 private:
  std::uint64_t state_;
};

std::uint64_t hash_combine(std::uint64_t seed, std::string_view bytes);

/// n masses of the form k/denominator summing to 1 (zeros allowed).
std::vector<Rational> random_masses(SplitMix64& rng, std::size_t n, std::uint32_t denominator);

/// n strictly positive weights of the form k/denominator summing to 1.
/// Requires denominator >= n.
std::vector<Rational> random_positive_weights(SplitMix64& rng, std::size_t n,
                                              std::uint32_t denominator);

}  // namespace agentmix
