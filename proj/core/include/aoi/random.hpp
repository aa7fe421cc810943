#pragma once

#include <cstdint>
#include <random>

namespace aoi {

/// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the independent substream for (trial, stream) under `root`.
/// Derivation is counter-based, so any trial can be reproduced in isolation.
std::uint64_t substream_seed(std::uint64_t root, std::uint64_t trial, std::uint64_t stream) noexcept;

/// mt19937_64 with portable uniform and exponential variates (no reliance on
/// the standard library's distribution implementations).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1].
    double uniform() noexcept {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    double exponential(double rate) noexcept;

private:
    std::mt19937_64 engine_;
};

}  // namespace aoi
