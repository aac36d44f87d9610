#pragma once

#include <cstdint>
#include <random>

namespace binco {

// Purposes that get their own random substream for a given resample.
enum class StreamTag : std::uint64_t {
    ResampleIndices = 1,
    PenaltyWeights = 2,
    Topology = 3,
    Precision = 4,
    Sample = 5,
    Replicate = 6,
};

// Independent generator keyed by (master seed, index, tag). Substream b can be
// built without touching substreams 0..b-1, which keeps resample draws
// identical under any execution order.
inline std::mt19937_64 substream(std::uint64_t master, std::uint64_t index, StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(tag), 0x62696e63u};
    return std::mt19937_64(seq);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection, bound > 0.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = gen();
    while (x >= limit) x = gen();
    return x % bound;
}

}  // namespace binco
