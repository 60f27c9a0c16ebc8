#pragma once

// Fixed-point arithmetic shared by every neuron, trace and decay computation.
// All network state is integer; decays are Q12 fractions applied in
// sign-magnitude form so negative and positive values shrink symmetrically.

#include <atomic>
#include <cstdint>
#include <stdexcept>

namespace sgnn::fxp {

inline constexpr std::int32_t kDecayOne = 4096;
inline constexpr int kDecayShift = 12;

// Largest magnitude representable by a 24-bit sign-magnitude state variable.
inline constexpr std::int32_t kStateMax = (1 << 23) - 1;
inline constexpr std::int32_t kStateMin = -kStateMax;

/// Per-step decay fraction raw/4096. raw = 0 is "leak off", raw = 4096 zeroes
/// the state every step.
class Q12Decay {
public:
    constexpr Q12Decay() = default;

    constexpr explicit Q12Decay(std::int32_t raw) : raw_(raw)
    {
        if (raw < 0 || raw > kDecayOne) {
            throw std::invalid_argument("Q12Decay raw value must lie in [0, 4096]");
        }
    }

    static constexpr Q12Decay none() { return Q12Decay{}; }

    constexpr std::int32_t raw() const noexcept { return raw_; }
    constexpr std::int32_t retain() const noexcept { return kDecayOne - raw_; }

    friend constexpr bool operator==(Q12Decay, Q12Decay) = default;

private:
    std::int32_t raw_ = 0;
};

/// Counts clamp events. Saturation is diagnostic, never fatal.
class SaturationCounter {
public:
    SaturationCounter() = default;
    SaturationCounter(const SaturationCounter& other) : events_(other.events()) {}
    SaturationCounter& operator=(const SaturationCounter& other)
    {
        events_.store(other.events(), std::memory_order_relaxed);
        return *this;
    }

    void record(std::uint64_t n = 1) noexcept { events_.fetch_add(n, std::memory_order_relaxed); }
    std::uint64_t events() const noexcept { return events_.load(std::memory_order_relaxed); }
    void clear() noexcept { events_.store(0, std::memory_order_relaxed); }

private:
    std::atomic<std::uint64_t> events_{0};
};

/// Clamps a wide intermediate into the 24-bit state range.
constexpr std::int32_t saturate(std::int64_t value, SaturationCounter* sat = nullptr) noexcept
{
    if (value > kStateMax) {
        if (sat) sat->record();
        return kStateMax;
    }
    if (value < kStateMin) {
        if (sat) sat->record();
        return kStateMin;
    }
    return static_cast<std::int32_t>(value);
}

/// sign(state) * ((|state| * (4096 - d)) >> 12). Inputs outside the 24-bit
/// range are clamped first and reported to `sat`.
constexpr std::int32_t decay_mul(std::int32_t state, Q12Decay d, SaturationCounter* sat = nullptr) noexcept
{
    const std::int32_t s = saturate(state, sat);
    const std::int64_t mag = s < 0 ? -static_cast<std::int64_t>(s) : static_cast<std::int64_t>(s);
    const auto scaled = static_cast<std::int32_t>((mag * d.retain()) >> kDecayShift);
    return s < 0 ? -scaled : scaled;
}

/// raw = round(4096 * (1 - exp(-1/tau))). Throws for tau < 1; leak-off is
/// spelled Q12Decay::none(), not tau = 0.
Q12Decay tau_to_decay(int tau);

} // namespace sgnn::fxp
