#pragma once

#include <cstdint>

namespace celab {

// Counter-based generator: every draw is a pure function of (seed, stream, counter),
// so parallel and sequential execution order cannot change any sampled value.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return mix(seed_, stream_, counter_++); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        return n == 0 ? 0 : next_u64() % n;
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
        // splitmix64 finalizer applied to a combined word, twice for stream decorrelation
        std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
        x = finalize(x);
        x += 0xbf58476d1ce4e5b9ull * (counter + 1);
        return finalize(x);
    }

private:
    static std::uint64_t finalize(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace celab
