#pragma once

// Seeded randomness with a portable draw sequence. std::mt19937_64 output is
// fixed by the standard; the distributions here are written out so reports
// reproduce across standard libraries.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace sgnn {

/// Independent child seed for a named purpose ("split", "bo-init", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <class T>
    void shuffle(std::span<T> xs)
    {
        for (std::size_t i = xs.size(); i > 1; --i) {
            std::swap(xs[i - 1], xs[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace sgnn
