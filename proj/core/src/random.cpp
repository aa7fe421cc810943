#include "aoi/random.hpp"

#include <cmath>

namespace aoi {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t root, std::uint64_t trial, std::uint64_t stream) noexcept {
    return mix64(mix64(mix64(root) ^ (trial * 0xD1B54A32D192ED03ULL)) ^
                 (stream * 0x8CB92BA72F3D8DD7ULL));
}

double RandomStream::exponential(double rate) noexcept {
    return -std::log(uniform()) / rate;
}

}  // namespace aoi
