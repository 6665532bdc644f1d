#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace warmslice {

// All randomness in a run flows through SeededRng so traces are
// reproducible across platforms. The algorithm is pinned:
//   * engine: std::mt19937_64 (bit-exact per the C++ standard)
//   * uniform01: top 53 bits of the engine output, in [0, 1)
//   * normal: Box-Muller, cosine branch only, exactly two uniforms
//     per variate (a fixed draw budget keeps interleaved streams stable
//     when distribution parameters change)
// std::normal_distribution is deliberately not used: its draw sequence
// is implementation-defined.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        ++draws_;
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal(double mean, double std_dev) {
        const double u1 = 1.0 - uniform01();  // (0, 1]: keeps log finite
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + std_dev * z;
    }

    /// Exponential inter-arrival gap with the given mean.
    double exponential(double mean) {
        const double u = 1.0 - uniform01();
        return -mean * std::log(u);
    }

    std::uint64_t draw_count() const { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

inline SeededRng seeded_generator(std::uint64_t seed) { return SeededRng(seed); }

/// splitmix64 finalizer; used to derive independent sub-stream seeds
/// (arrival plan vs. resize sampling) from one scenario seed.
inline std::uint64_t derive_substream(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed + tag * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace warmslice
