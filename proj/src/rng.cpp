#include "treelab/rng.hpp"

#include <cmath>

#include "treelab/errors.hpp"

namespace treelab {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t masterSeed, std::uint64_t streamIndex) {
    std::uint64_t state = masterSeed + 0x9E3779B97F4A7C15ULL * (streamIndex + 1);
    (void)splitmix64(state);
    return splitmix64(state);
}

std::int64_t RandomStream::uniform_int(std::int64_t n) {
    require(n > 0, "OutOfRange", "uniform_int needs n > 0");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    // Largest multiple of n that fits in 64 bits; reject draws at or above it.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return static_cast<std::int64_t>(x % un);
}

double RandomStream::exponential_rate(double rate) {
    require(rate > 0.0, "OutOfRange", "exponential rate must be positive");
    return -std::log1p(-uniform01()) / rate;
}

double RandomStream::exponential_mean(double mean) {
    require(mean > 0.0, "OutOfRange", "exponential mean must be positive");
    return -std::log1p(-uniform01()) * mean;
}

}  // namespace treelab
