#pragma once

// Integer current-based LIF populations with the long-reset extension: every
// cycle runs `reset_interval` active steps followed by `reset_length` steps in
// which currents, voltages and refractory counters are held at zero and no
// spikes leave the population.

#include "sgnn/fxp.hpp"
#include "sgnn/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sgnn::neuron {

struct LifLongResetConfig {
    fxp::Q12Decay du;                 // current decay
    fxp::Q12Decay dv;                 // voltage decay
    std::int32_t vth = 1;
    std::int32_t refractory = 0;      // timesteps, 0 = off
    std::int32_t reset_interval = 1;  // active steps per cycle
    std::int32_t reset_length = 0;    // quiescent steps per cycle, 0 = reset disabled
    std::int32_t bias = 0;

    /// Throws std::invalid_argument naming the violated bound.
    void validate() const;

    std::int64_t cycle() const noexcept { return std::int64_t{reset_interval} + reset_length; }
};

struct ClusterState {
    std::vector<std::int32_t> u;
    std::vector<std::int32_t> v;
    std::vector<std::int32_t> refrac_remaining;
    std::int64_t t = 0;

    std::size_t size() const noexcept { return u.size(); }
};

ClusterState new_cluster(std::size_t size, const LifLongResetConfig& config);

bool in_reset_window(std::int64_t t, const LifLongResetConfig& config);

/// Advances the population one timestep and returns its spikes.
///
/// Update order: u <- decay(u) + input; v <- decay(v) + u + bias; spike iff
/// v >= vth and not refractory; on spike v <- 0 and the refractory counter is
/// armed. Inside a reset window the state is zeroed and nothing fires.
SpikeVector step(ClusterState& state, std::span<const std::int32_t> input,
                 const LifLongResetConfig& config, fxp::SaturationCounter* sat = nullptr,
                 int threads = 1);

/// Zeroes u, v and refractory counters; t is preserved.
void apply_reset(ClusterState& state);

bool is_quiescent(const ClusterState& state);

} // namespace sgnn::neuron
