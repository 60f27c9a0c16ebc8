#pragma once

// Synapse blocks between two populations.
//
// StaticSynapse is the fixed-weight "Dense" block. Citation graphs are very
// sparse, so it is stored compressed (by row for event-driven scatter, by
// column for the parallel gather). Weights use an 8-bit-plus-sign mantissa
// and a per-block left shift, so 1000 is stored as 125 << 3.
//
// PlasticSynapse is the learnable block: a dense pre x post matrix updated by
// trace-based pairwise STDP.

#include "sgnn/fxp.hpp"
#include "sgnn/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sgnn::synapse {

inline constexpr std::int32_t kWeightMantissaMax = 255;
inline constexpr std::int32_t kTraceCap = 127;
inline constexpr int kWeightExponentMax = 7;

struct WeightEncoding {
    std::int32_t mantissa = 0;
    int exponent = 0;
};

/// Smallest exponent e with w == m << e and |m| <= 255. Throws when w has no
/// exact encoding.
WeightEncoding encode_weight(std::int32_t w);

/// Ring of pending spike vectors; a vector pushed now is returned by the push
/// `delay` calls later (immediately for delay 0).
class DelayLine {
public:
    DelayLine() = default;
    DelayLine(std::size_t width, int delay);

    /// Enqueues `spikes` and returns the vector that has waited `delay` steps.
    const SpikeVector& push(std::span<const std::uint8_t> spikes);
    void clear();
    bool empty() const;

    int delay() const noexcept { return delay_; }
    std::size_t slots() const noexcept { return ring_.size(); }

private:
    std::vector<SpikeVector> ring_;
    std::size_t head_ = 0;
    int delay_ = 0;
};

struct Synapse {
    std::uint32_t pre = 0;
    std::uint32_t post = 0;
    std::int32_t weight = 0;
};

class StaticSynapse {
public:
    StaticSynapse() = default;

    /// Duplicate (pre, post) pairs are kept as separate synapses. Every weight
    /// must share one exponent after encoding.
    StaticSynapse(std::size_t pre_size, std::size_t post_size, std::span<const Synapse> synapses, int delay);

    std::size_t pre_size() const noexcept { return pre_size_; }
    std::size_t post_size() const noexcept { return post_size_; }
    std::size_t synapse_count() const noexcept { return col_.size(); }
    int delay() const noexcept { return delay_.delay(); }
    int exponent() const noexcept { return exponent_; }

    /// Enqueues `pre_spikes` and accumulates the delayed vector's currents into
    /// `out` (post-sized).
    void forward(std::span<const std::uint8_t> pre_spikes, std::span<std::int64_t> out, int threads = 1);

    /// Current vector for one step; convenience wrapper over forward().
    CurrentVector forward(std::span<const std::uint8_t> pre_spikes);

    void clear_pending() { delay_.clear(); }
    bool pending_empty() const { return delay_.empty(); }

    /// Effective synapse list in row order (for audits and dumps).
    std::vector<Synapse> synapses() const;

private:
    std::size_t pre_size_ = 0;
    std::size_t post_size_ = 0;
    int exponent_ = 0;
    std::vector<std::uint32_t> row_ptr_, col_;
    std::vector<std::int16_t> row_val_;
    std::vector<std::uint32_t> col_ptr_, row_;
    std::vector<std::int16_t> col_val_;
    DelayLine delay_;
};

struct StdpConfig {
    std::int32_t lr = 2;
    std::int32_t a_plus = 1;
    std::int32_t a_minus = -1;
    std::int32_t tau_plus = 30;
    std::int32_t tau_minus = 30;
    std::int32_t trace_impulse = 16;
    std::int32_t w_min = -kWeightMantissaMax;
    std::int32_t w_max = kWeightMantissaMax;

    void validate() const;
};

struct TraceState {
    std::vector<std::int32_t> x;  // one per pre neuron
    std::vector<std::int32_t> y;  // one per post neuron

    bool is_zero() const;
    void clear();
};

/// x <- decay(x, tau_plus) then impulse where pre fired; likewise y with
/// tau_minus and post spikes. Traces saturate at kTraceCap.
void update_traces(TraceState& traces, std::span<const std::uint8_t> pre_spikes,
                   std::span<const std::uint8_t> post_spikes, const StdpConfig& cfg);

class PlasticSynapse {
public:
    PlasticSynapse() = default;
    PlasticSynapse(std::size_t pre_size, std::size_t post_size, std::int32_t initial_weight,
                   const StdpConfig& cfg, int delay);

    std::size_t pre_size() const noexcept { return pre_size_; }
    std::size_t post_size() const noexcept { return post_size_; }
    int delay() const noexcept { return delay_.delay(); }
    const StdpConfig& config() const noexcept { return cfg_; }
    std::int32_t initial_weight() const noexcept { return initial_weight_; }

    std::int32_t weight(std::size_t pre, std::size_t post) const { return w_[pre * post_size_ + post]; }
    std::span<const std::int32_t> weights() const noexcept { return w_; }
    const TraceState& traces() const noexcept { return traces_; }

    /// Column `post` of the matrix: weights from every pre neuron onto it.
    std::vector<std::int32_t> column(std::size_t post) const;

    void forward(std::span<const std::uint8_t> pre_spikes, std::span<std::int64_t> out, int threads = 1);
    CurrentVector forward(std::span<const std::uint8_t> pre_spikes);

    /// Decays traces by one step without spikes.
    void decay_traces(int threads = 1);

    /// Applies the weight change for this step's spikes against the current
    /// (already decayed) traces.
    void stdp_update(std::span<const std::uint8_t> pre_spikes, std::span<const std::uint8_t> post_spikes,
                     int threads = 1);

    void add_impulses(std::span<const std::uint8_t> pre_spikes, std::span<const std::uint8_t> post_spikes);

    /// Full per-step plasticity: decay traces, apply STDP, add impulses. A
    /// simultaneous pre/post pair therefore changes nothing.
    void learn(std::span<const std::uint8_t> pre_spikes, std::span<const std::uint8_t> post_spikes,
               int threads = 1);

    void clear_traces() { traces_.clear(); }

    /// Weights back to `initial_weight`; traces and pending spikes cleared.
    void reset_plastic(std::int32_t initial_weight);
    void reset_plastic() { reset_plastic(initial_weight_); }

    bool at_initial_state() const;

    void set_weight(std::size_t pre, std::size_t post, std::int32_t w);

private:
    std::size_t pre_size_ = 0;
    std::size_t post_size_ = 0;
    std::int32_t initial_weight_ = 0;
    StdpConfig cfg_;
    fxp::Q12Decay decay_x_;
    fxp::Q12Decay decay_y_;
    std::vector<std::int32_t> w_;
    TraceState traces_;
    DelayLine delay_;
};

} // namespace sgnn::synapse
