#pragma once

#include <cstdint>

namespace ce {

/// SplitMix64 stream. Used everywhere a reproducible stream is needed:
/// unlike std::uniform_real_distribution, the output is identical on
/// every platform, so seeded runs are bit-stable.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_double(double lo, double hi) { return lo + next_double() * (hi - lo); }

    /// Uniform integer in [lo, hi] (inclusive). Modulo bias is irrelevant
    /// for the tiny ranges used here (instance sizes, graph picks).
    std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
        return lo + next_u64() % (hi - lo + 1);
    }

private:
    std::uint64_t state_;
};

/// Derives an independent substream seed from a master seed and a stream
/// index. Substreams are order-independent: stream k can be drawn without
/// drawing streams 0..k-1 first.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace ce
