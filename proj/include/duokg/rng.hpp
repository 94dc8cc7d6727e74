#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace duokg {

/// Seeded generator with platform-independent uniform draws.
///
/// std::uniform_real_distribution is implementation-defined, so uniform() is
/// built directly from the 53 high bits of mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Independent stream keyed by a base seed and a tuple of integers, e.g.
    /// (seed, epoch, query, rollout). The same key always yields the same stream.
    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

    std::uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    bool coin() { return (engine_() >> 63) != 0; }
    /// Standard normal via Box-Muller.
    double normal();

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace duokg
