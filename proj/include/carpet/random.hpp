/*
 * random.hpp
 *
 * Seeded generator with platform-independent derived draws
 * (std::mt19937_64 output is fixed by the standard, distributions are not).
 */

#ifndef CARPET_RANDOM_HPP_
#define CARPET_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace carpet {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do
            x = engine_();
        while (x >= limit);
        return x % n;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::mt19937_64 engine_;
};

} // namespace carpet

#endif // CARPET_RANDOM_HPP_
