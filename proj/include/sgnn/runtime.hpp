#pragma once

// Lockstep process runtime.
//
// A network is a set of processes (one spike encoder, one per neuron
// population, one per static or learnable synapse block) that talk only over
// single-producer/single-consumer channels. Every timestep runs three phases
// separated by barriers:
//
//   0. encoder        publishes this step's injected current
//   1. synapses       consume the previous step's spikes, publish currents
//   2. populations    consume this step's currents, publish spikes
//
// Processes inside a phase never read each other's outputs, so they may run
// concurrently and in any order without changing results. Channels record
// the step and phase of each write; a read of a value written in the same
// step by the same or a later phase is counted as a lockstep violation.

#include "sgnn/graph.hpp"
#include "sgnn/neuron.hpp"
#include "sgnn/synapse.hpp"
#include "sgnn/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sgnn::runtime {

enum class ProcessKind { encoder, neuron_cluster, dense, learning_dense };

std::string_view to_string(ProcessKind kind);

/// Phase of each kind within a timestep.
int phase_of(ProcessKind kind);

template <class T>
class Channel {
public:
    Channel() = default;
    explicit Channel(T initial) : value_(std::move(initial)) {}

    T& begin_write(std::int64_t step, int phase)
    {
        step_ = step;
        phase_ = phase;
        ++writes_;
        return value_;
    }

    const T& read(std::int64_t step, int phase) const
    {
        if (step_ == step && phase_ >= phase) ++violations_;
        ++reads_;
        return value_;
    }

    /// Direct access without lockstep accounting (snapshots, resets).
    T& value() noexcept { return value_; }
    const T& value() const noexcept { return value_; }

    std::uint64_t reads() const noexcept { return reads_; }
    std::uint64_t writes() const noexcept { return writes_; }
    std::uint64_t violations() const noexcept { return violations_; }

private:
    T value_{};
    std::int64_t step_ = -1;
    int phase_ = -1;
    std::uint64_t writes_ = 0;
    mutable std::uint64_t reads_ = 0;
    mutable std::uint64_t violations_ = 0;
};

struct SpikeEncoderConfig {
    std::string cluster;
    std::size_t index = 0;
    std::int64_t injection_step = 0;  // within the active window
};

/// One-hot vector of `cluster_size` at the injection step, zeros otherwise.
/// Throws std::out_of_range when the target index is outside the cluster.
SpikeVector encode(const SpikeEncoderConfig& cfg, std::int64_t window_step, std::size_t cluster_size);

enum class ScheduleOrder { canonical, reversed };

struct RuntimeOptions {
    int process_threads = 1;  // processes of one phase run concurrently
    int kernel_threads = 1;   // OpenMP width inside each process
    ScheduleOrder order = ScheduleOrder::canonical;
};

struct WindowObservation {
    std::int64_t start_t = 0;
    std::int32_t steps = 0;
    std::vector<std::string> clusters;                       // canonical order
    std::vector<std::vector<std::uint32_t>> spikes_per_step; // [step][cluster]
    std::vector<std::vector<std::uint32_t>> neuron_spikes;   // [cluster][neuron] totals
    std::uint32_t injected_spikes = 0;
    std::uint64_t saturation_events = 0;

    std::uint64_t total_spikes() const;
    friend bool operator==(const WindowObservation&, const WindowObservation&) = default;
};

struct ProcessInfo {
    std::string name;
    ProcessKind kind;
};

class ProcessGraph {
public:
    ProcessGraph() = default;
    explicit ProcessGraph(RuntimeOptions options) : options_(options) {}

    // Declarations may come in any order; finalize() resolves names.
    void declare_cluster(const graph::ClusterSpec& spec);
    void declare_static(const std::string& name, const std::string& pre, const std::string& post,
                        std::vector<synapse::Synapse> synapses, int delay);
    void declare_plastic(const std::string& name, const std::string& pre, const std::string& post,
                         const synapse::StdpConfig& stdp, std::int32_t initial_weight, int delay);
    /// The encoder may inject into any of `targets`.
    void declare_encoder(std::int32_t weight, std::vector<std::string> targets);

    /// Wires channels and fixes the schedule. Throws std::invalid_argument for
    /// an empty network, a block naming a missing cluster, or a shape mismatch.
    void finalize();
    bool finalized() const noexcept { return finalized_; }

    void set_options(RuntimeOptions options) { options_ = options; }
    const RuntimeOptions& options() const noexcept { return options_; }

    /// Sets the paper that the encoder fires at in the next window; nullopt
    /// silences the encoder.
    void set_injection(std::optional<SpikeEncoderConfig> cfg);

    /// Executes exactly `steps` lockstep timesteps.
    WindowObservation run_window(std::int32_t steps);

    /// Runs the remaining steps of the current cycle (the reset window when
    /// called at the end of an active window), then forces every population,
    /// trace, plastic weight, delay line and channel back to its initial
    /// state. Static weights are untouched.
    std::int64_t inter_paper_reset();

    bool is_quiescent() const;

    std::int64_t now() const noexcept { return t_; }
    std::int64_t cycle() const noexcept { return cycle_; }
    std::int32_t active_steps() const noexcept { return active_steps_; }
    std::int32_t reset_steps() const noexcept { return static_cast<std::int32_t>(cycle_ - active_steps_); }
    std::uint64_t steps_executed() const noexcept { return steps_executed_; }

    std::vector<ProcessInfo> processes() const;
    std::vector<std::string> schedule() const;  // process names in execution order
    std::size_t count(ProcessKind kind) const;

    std::size_t cluster_count() const noexcept { return clusters_.size(); }
    std::size_t cluster_index(const std::string& name) const;
    std::optional<std::size_t> cluster_index_or_none(const std::string& name) const;
    const graph::ClusterSpec& cluster_spec(std::size_t c) const { return clusters_[c].spec; }
    const neuron::ClusterState& cluster_state(std::size_t c) const { return clusters_[c].state; }

    std::size_t plastic_index(const std::string& name) const;
    const synapse::PlasticSynapse& plastic(std::size_t b) const { return plastic_[b].syn; }
    synapse::PlasticSynapse& plastic_mut(std::size_t b) { return plastic_[b].syn; }
    const std::string& plastic_name(std::size_t b) const { return plastic_[b].name; }
    std::size_t plastic_count() const noexcept { return plastic_.size(); }

    std::size_t static_index(const std::string& name) const;
    const synapse::StaticSynapse& static_block(std::size_t b) const { return static_[b].syn; }
    std::size_t static_count() const noexcept { return static_.size(); }

    /// End-of-window weight read-out (the "ref port"): weights from every pre
    /// neuron of plastic block `b` onto post neuron `post`.
    std::vector<std::int32_t> read_plastic_column(std::size_t b, std::size_t post) const;

    std::uint64_t channel_violations() const;

private:
    struct ClusterProc {
        std::string name;
        graph::ClusterSpec spec;
        neuron::ClusterState state;
        std::vector<std::size_t> current_inputs;
        std::vector<std::size_t> spike_outputs;
        fxp::SaturationCounter sat;
        std::vector<std::uint32_t> spike_totals;
        std::uint32_t last_spike_count = 0;
    };
    struct StaticProc {
        std::string name, pre, post;
        std::vector<synapse::Synapse> synapses;
        int delay = 0;
        synapse::StaticSynapse syn;
        std::size_t pre_cluster = 0, post_cluster = 0;
        std::size_t spike_input = 0, current_output = 0;
    };
    struct PlasticProc {
        std::string name, pre, post;
        synapse::StdpConfig stdp;
        std::int32_t initial_weight = 0;
        int delay = 0;
        synapse::PlasticSynapse syn;
        std::size_t pre_cluster = 0, post_cluster = 0;
        std::size_t pre_input = 0, post_input = 0, current_output = 0;
    };
    struct EncoderProc {
        bool declared = false;
        std::int32_t weight = 0;
        std::vector<std::string> targets;
        std::vector<std::size_t> target_clusters;
        std::vector<std::size_t> current_outputs;  // parallel to target_clusters
        std::optional<SpikeEncoderConfig> injection;
        std::size_t injection_target = 0;          // index into target_clusters
        std::uint32_t injected = 0;
    };

    std::size_t new_spike_channel(std::size_t width);
    std::size_t new_current_channel(std::size_t width);

    void step_encoder();
    void step_static(StaticProc& p);
    void step_plastic(PlasticProc& p);
    void step_cluster(ClusterProc& p);
    void run_step();
    void require_finalized() const;

    RuntimeOptions options_;
    bool finalized_ = false;
    std::vector<ClusterProc> clusters_;
    std::vector<StaticProc> static_;
    std::vector<PlasticProc> plastic_;
    EncoderProc encoder_;

    std::vector<Channel<SpikeVector>> spike_channels_;
    std::vector<Channel<std::vector<std::int64_t>>> current_channels_;

    std::int64_t t_ = 0;
    std::int64_t cycle_ = 1;
    std::int32_t active_steps_ = 1;
    std::uint64_t steps_executed_ = 0;
};

/// One population process per cluster, one dense process per static block,
/// one learning process per plastic block and an encoder targeting every
/// paper population.
ProcessGraph build(const graph::NetworkSpec& network, RuntimeOptions options = {});

} // namespace sgnn::runtime
