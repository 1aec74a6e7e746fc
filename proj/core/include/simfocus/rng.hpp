#pragma once

#include <cstdint>
#include <random>

namespace simfocus {

/// SplitMix64 finalizer. Used to derive independent seeds from a master
/// seed so that adding trials or streams never reshuffles existing ones.
constexpr std::uint64_t split_mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives the seed of sub-stream `stream` from `master`.
/// derive_seed(master, i) and derive_seed(master, j) are statistically
/// independent for i != j, and stable across runs and platforms.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return split_mix64(master ^ split_mix64(stream + 1));
}

/// Seeded uniform random source. Doubles are built from the top 53 bits of
/// the generator output, so sequences are identical on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::mt19937_64 gen_;
};

} // namespace simfocus
