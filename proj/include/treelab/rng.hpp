#pragma once

#include <cstdint>
#include <random>

namespace treelab {

// splitmix64 step: advances `state` and returns the next output word.
// Used only to derive seeds; the streams themselves are mt19937_64, whose
// output sequence is fixed by the C++ standard, so results are reproducible
// across platforms and compilers.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for stream `streamIndex` under `masterSeed`:
//   state  = masterSeed + 0x9E3779B97F4A7C15 * (streamIndex + 1)
//   seed   = splitmix64(splitmix64(state))      (second output)
// This is the documented seed-splitting function: every replicate, worker
// task and permutation draw gets its own streamIndex, so the set of random
// numbers consumed is independent of scheduling and of the worker count.
std::uint64_t derive_stream_seed(std::uint64_t masterSeed, std::uint64_t streamIndex);

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    static RandomStream split(std::uint64_t masterSeed, std::uint64_t streamIndex) {
        return RandomStream(derive_stream_seed(masterSeed, streamIndex));
    }

    std::uint64_t bits() { return eng_(); }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on {0, 1, ..., n-1} by rejection (no modulo bias).
    std::int64_t uniform_int(std::int64_t n);

    // Exponential with the given rate; uses -log1p(-U) so U=0 is safe.
    double exponential_rate(double rate);
    double exponential_mean(double mean);

private:
    std::mt19937_64 eng_;
};

}  // namespace treelab
