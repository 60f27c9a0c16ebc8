#include "sgnn/neuron.hpp"

#include "sgnn/kernels.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sgnn::neuron {

void LifLongResetConfig::validate() const
{
    if (vth < 1 || vth > fxp::kStateMax) {
        throw std::invalid_argument("vth must lie in [1, 2^23-1], got " + std::to_string(vth));
    }
    if (refractory < 0) throw std::invalid_argument("refractory must be >= 0");
    if (reset_interval < 1) throw std::invalid_argument("reset_interval must be >= 1");
    if (reset_length < 0) throw std::invalid_argument("reset_length must be >= 0");
    if (reset_length >= reset_interval) {
        throw std::invalid_argument("reset_length (" + std::to_string(reset_length) +
                                    ") must be smaller than reset_interval (" +
                                    std::to_string(reset_interval) + ")");
    }
    if (bias < fxp::kStateMin || bias > fxp::kStateMax) throw std::invalid_argument("bias outside 24-bit range");
}

ClusterState new_cluster(std::size_t size, const LifLongResetConfig& config)
{
    if (size == 0) throw std::invalid_argument("cluster size must be >= 1");
    config.validate();
    ClusterState s;
    s.u.assign(size, 0);
    s.v.assign(size, 0);
    s.refrac_remaining.assign(size, 0);
    return s;
}

bool in_reset_window(std::int64_t t, const LifLongResetConfig& config)
{
    if (config.reset_length == 0) return false;
    return t % config.cycle() >= config.reset_interval;
}

SpikeVector step(ClusterState& state, std::span<const std::int32_t> input,
                 const LifLongResetConfig& config, fxp::SaturationCounter* sat, int threads)
{
    if (input.size() != state.size()) {
        throw std::invalid_argument("input length " + std::to_string(input.size()) +
                                    " does not match cluster size " + std::to_string(state.size()));
    }
    SpikeVector spikes(state.size(), 0);

    if (in_reset_window(state.t, config)) {
        apply_reset(state);
        ++state.t;
        return spikes;
    }

    const kernels::LifParams p{config.du, config.dv, config.vth, config.refractory, config.bias};
    const auto events = kernels::lif_step(state.u, state.v, state.refrac_remaining, input, p, spikes, threads);
    if (sat && events) sat->record(events);
    ++state.t;
    return spikes;
}

void apply_reset(ClusterState& state)
{
    std::fill(state.u.begin(), state.u.end(), 0);
    std::fill(state.v.begin(), state.v.end(), 0);
    std::fill(state.refrac_remaining.begin(), state.refrac_remaining.end(), 0);
}

bool is_quiescent(const ClusterState& state)
{
    auto zero = [](const std::vector<std::int32_t>& xs) {
        return std::all_of(xs.begin(), xs.end(), [](auto x) { return x == 0; });
    };
    return zero(state.u) && zero(state.v) && zero(state.refrac_remaining);
}

} // namespace sgnn::neuron
