#pragma once

#include <cstdint>
#include <random>

namespace tokscale {

/// Pinned pseudo-random source: std::mt19937_64 (its output sequence is fixed
/// by the C++ standard) with hand-written distributions, so every sampled
/// value is reproducible across compilers and standard libraries.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64+tokscale-dist-v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1).
    double uniform_open() { return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52; }
    /// Uniform integer on [0, n), n >= 1, by rejection.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal (Box-Muller, one variate per call).
    double normal();
    /// Gamma(shape, scale) (Marsaglia-Tsang).
    double gamma(double shape, double scale);
    /// Poisson(mean): multiplication method below 12, PTRS above.
    std::uint64_t poisson(double mean);

    /// Independent sub-stream seed for index `stream` (splitmix64 mixing).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

private:
    std::mt19937_64 engine_;
};

}  // namespace tokscale
