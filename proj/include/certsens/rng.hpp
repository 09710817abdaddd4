#pragma once

#include <cstdint>

namespace certsens {

/// Counter-based generator: every draw is a stateless hash of
/// (seed, stream, counter).  Results are therefore independent of
/// evaluation order and of how work is split across threads.
///
/// Streams partition the draws by purpose (design sample X, design
/// sample X', bootstrap index lists, ...) so that e.g. changing the
/// bootstrap replication count never perturbs the design.
class CounterRng {
public:
    enum Stream : std::uint64_t {
        kDesignX = 1,
        kDesignXPrime = 2,
        kBootstrap = 3,
        kTest = 99,
    };

    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(hash(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }

    /// Uniform integer in {0, 1, ..., bound-1}; bound must be > 0.
    /// Plain scaling: the modulo bias at bound << 2^64 is below 2^-40
    /// and irrelevant for bootstrap index draws.
    std::uint64_t uniform_index(std::uint64_t counter, std::uint64_t bound) const {
        return static_cast<std::uint64_t>(uniform(counter) * static_cast<double>(bound));
    }

    std::uint64_t hash(std::uint64_t counter) const {
        // splitmix64 finalizer applied to a mix of the three words.
        std::uint64_t z = seed_;
        z = mix(z ^ (stream_ * 0x9e3779b97f4a7c15ULL));
        z = mix(z ^ (counter * 0xbf58476d1ce4e5b9ULL));
        return mix(z);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace certsens
