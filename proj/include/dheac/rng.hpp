#pragma once

#include <cstdint>
#include <random>

namespace dheac {

// SplitMix64 finalizer; used only to decorrelate stream keys.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Random stream keyed by (seed, stream, index).
///
/// Every Monte-Carlo trial gets its own stream derived from its coordinates
/// rather than from a shared generator, so results do not depend on which
/// worker ran the trial or in what order. Uniform variates are built from
/// raw engine words instead of std::*_distribution, whose algorithms differ
/// between standard libraries.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0)
        : engine_(mix64(mix64(mix64(seed) ^ stream) ^ (index * 0xd1342543de82ef95ULL))) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, bound); bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection on the top of the range keeps the draw exactly uniform.
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
        std::uint64_t x = engine_();
        while (x > limit) x = engine_();
        return x % bound;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace dheac
