#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace jitcluster {

/// Stable seed mixer. FNV-1a hashes the label, the hash is folded into the
/// master seed through a SplitMix64 round, and the index is added as a Weyl
/// increment before a final SplitMix64 round. For a fixed (master, label)
/// the map index -> seed is a bijection on 64-bit integers.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_label, std::uint64_t index);

/// SplitMix64 output function (bijective).
std::uint64_t splitmix64(std::uint64_t x);

/// Pinned generator: std::mt19937_64 with in-house distribution code, so a
/// given seed yields the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer on [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) {
                return r % bound;
            }
        }
    }

    /// Fisher-Yates, last index first.
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace jitcluster
