#include "sgnn/runtime.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sgnn::runtime {

namespace {

constexpr int kEncoderPhase = 0;
constexpr int kSynapsePhase = 1;
constexpr int kClusterPhase = 2;

template <class T>
void sort_by_name(std::vector<T>& xs, const char* what)
{
    std::sort(xs.begin(), xs.end(), [](const T& a, const T& b) { return a.name < b.name; });
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i].name == xs[i - 1].name) {
            throw std::invalid_argument(std::string("duplicate ") + what + " name '" + xs[i].name + "'");
        }
    }
}

} // namespace

std::string_view to_string(ProcessKind kind)
{
    switch (kind) {
    case ProcessKind::encoder: return "encoder";
    case ProcessKind::neuron_cluster: return "neuron-cluster";
    case ProcessKind::dense: return "dense";
    case ProcessKind::learning_dense: return "learning-dense";
    }
    return "?";
}

int phase_of(ProcessKind kind)
{
    switch (kind) {
    case ProcessKind::encoder: return kEncoderPhase;
    case ProcessKind::dense:
    case ProcessKind::learning_dense: return kSynapsePhase;
    case ProcessKind::neuron_cluster: return kClusterPhase;
    }
    return -1;
}

SpikeVector encode(const SpikeEncoderConfig& cfg, std::int64_t window_step, std::size_t cluster_size)
{
    if (cfg.index >= cluster_size) {
        throw std::out_of_range("encoder target index " + std::to_string(cfg.index) + " outside cluster '" +
                                cfg.cluster + "' of size " + std::to_string(cluster_size));
    }
    SpikeVector out(cluster_size, 0);
    if (window_step == cfg.injection_step) out[cfg.index] = 1;
    return out;
}

std::uint64_t WindowObservation::total_spikes() const
{
    std::uint64_t n = 0;
    for (const auto& row : spikes_per_step) n += std::accumulate(row.begin(), row.end(), std::uint64_t{0});
    return n;
}

// ------------------------------------------------------------ declarations

void ProcessGraph::declare_cluster(const graph::ClusterSpec& spec)
{
    if (finalized_) throw std::logic_error("process graph already finalized");
    ClusterProc p;
    p.name = spec.name;
    p.spec = spec;
    clusters_.push_back(std::move(p));
}

void ProcessGraph::declare_static(const std::string& name, const std::string& pre, const std::string& post,
                                  std::vector<synapse::Synapse> synapses, int delay)
{
    if (finalized_) throw std::logic_error("process graph already finalized");
    StaticProc p;
    p.name = name;
    p.pre = pre;
    p.post = post;
    p.synapses = std::move(synapses);
    p.delay = delay;
    static_.push_back(std::move(p));
}

void ProcessGraph::declare_plastic(const std::string& name, const std::string& pre, const std::string& post,
                                   const synapse::StdpConfig& stdp, std::int32_t initial_weight, int delay)
{
    if (finalized_) throw std::logic_error("process graph already finalized");
    PlasticProc p;
    p.name = name;
    p.pre = pre;
    p.post = post;
    p.stdp = stdp;
    p.initial_weight = initial_weight;
    p.delay = delay;
    plastic_.push_back(std::move(p));
}

void ProcessGraph::declare_encoder(std::int32_t weight, std::vector<std::string> targets)
{
    if (finalized_) throw std::logic_error("process graph already finalized");
    encoder_.declared = true;
    encoder_.weight = weight;
    encoder_.targets = std::move(targets);
    std::sort(encoder_.targets.begin(), encoder_.targets.end());
}

std::size_t ProcessGraph::new_spike_channel(std::size_t width)
{
    spike_channels_.emplace_back(SpikeVector(width, 0));
    return spike_channels_.size() - 1;
}

std::size_t ProcessGraph::new_current_channel(std::size_t width)
{
    current_channels_.emplace_back(std::vector<std::int64_t>(width, 0));
    return current_channels_.size() - 1;
}

void ProcessGraph::finalize()
{
    if (finalized_) return;
    if (clusters_.empty()) throw std::invalid_argument("cannot build an empty network");

    sort_by_name(clusters_, "cluster");
    sort_by_name(static_, "static block");
    sort_by_name(plastic_, "plastic block");

    const auto& first = clusters_.front().spec.config;
    for (auto& c : clusters_) {
        if (c.spec.config.reset_interval != first.reset_interval || c.spec.config.reset_length != first.reset_length) {
            throw std::invalid_argument("cluster '" + c.name + "' has a reset schedule different from '" +
                                        clusters_.front().name + "'");
        }
        c.state = neuron::new_cluster(c.spec.size(), c.spec.config);
        c.spike_totals.assign(c.spec.size(), 0);
    }
    cycle_ = first.cycle();
    active_steps_ = first.reset_interval;

    auto resolve = [this](const std::string& block, const std::string& cluster) {
        for (std::size_t i = 0; i < clusters_.size(); ++i) {
            if (clusters_[i].name == cluster) return i;
        }
        throw std::invalid_argument("block '" + block + "' has a dangling channel to unknown cluster '" + cluster + "'");
    };

    for (auto& s : static_) {
        s.pre_cluster = resolve(s.name, s.pre);
        s.post_cluster = resolve(s.name, s.post);
        auto& pre = clusters_[s.pre_cluster];
        auto& post = clusters_[s.post_cluster];
        try {
            s.syn = synapse::StaticSynapse(pre.spec.size(), post.spec.size(), s.synapses, s.delay);
        } catch (const std::exception& e) {
            throw std::invalid_argument("static block '" + s.name + "': " + e.what());
        }
        s.spike_input = new_spike_channel(pre.spec.size());
        pre.spike_outputs.push_back(s.spike_input);
        s.current_output = new_current_channel(post.spec.size());
        post.current_inputs.push_back(s.current_output);
    }
    for (auto& p : plastic_) {
        p.pre_cluster = resolve(p.name, p.pre);
        p.post_cluster = resolve(p.name, p.post);
        auto& pre = clusters_[p.pre_cluster];
        auto& post = clusters_[p.post_cluster];
        try {
            p.syn = synapse::PlasticSynapse(pre.spec.size(), post.spec.size(), p.initial_weight, p.stdp, p.delay);
        } catch (const std::exception& e) {
            throw std::invalid_argument("plastic block '" + p.name + "': " + e.what());
        }
        p.pre_input = new_spike_channel(pre.spec.size());
        pre.spike_outputs.push_back(p.pre_input);
        p.post_input = new_spike_channel(post.spec.size());
        post.spike_outputs.push_back(p.post_input);
        p.current_output = new_current_channel(post.spec.size());
        post.current_inputs.push_back(p.current_output);
    }
    if (encoder_.declared) {
        for (const auto& target : encoder_.targets) {
            const auto c = resolve("encoder", target);
            encoder_.target_clusters.push_back(c);
            const auto ch = new_current_channel(clusters_[c].spec.size());
            encoder_.current_outputs.push_back(ch);
            clusters_[c].current_inputs.push_back(ch);
        }
    }
    finalized_ = true;
}

void ProcessGraph::require_finalized() const
{
    if (!finalized_) throw std::logic_error("process graph not finalized");
}

// ------------------------------------------------------------------- steps

void ProcessGraph::set_injection(std::optional<SpikeEncoderConfig> cfg)
{
    require_finalized();
    if (cfg) {
        if (!encoder_.declared) throw std::invalid_argument("network has no spike encoder");
        const auto it = std::find_if(encoder_.target_clusters.begin(), encoder_.target_clusters.end(),
                                     [&](std::size_t c) { return clusters_[c].name == cfg->cluster; });
        if (it == encoder_.target_clusters.end()) {
            throw std::invalid_argument("encoder cannot reach cluster '" + cfg->cluster + "'");
        }
        (void)encode(*cfg, -1, clusters_[*it].spec.size());  // range check
        encoder_.injection_target = static_cast<std::size_t>(it - encoder_.target_clusters.begin());
    }
    encoder_.injection = std::move(cfg);
}

void ProcessGraph::step_encoder()
{
    const std::int64_t window_step = t_ % cycle_;
    for (std::size_t k = 0; k < encoder_.current_outputs.size(); ++k) {
        auto& out = current_channels_[encoder_.current_outputs[k]].begin_write(t_, kEncoderPhase);
        std::fill(out.begin(), out.end(), 0);
        if (!encoder_.injection || k != encoder_.injection_target || window_step >= active_steps_) continue;
        const auto spikes = encode(*encoder_.injection, window_step, out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (spikes[i]) {
                out[i] += encoder_.weight;
                ++encoder_.injected;
            }
        }
    }
}

void ProcessGraph::step_static(StaticProc& p)
{
    const auto& in = spike_channels_[p.spike_input].read(t_, kSynapsePhase);
    auto& out = current_channels_[p.current_output].begin_write(t_, kSynapsePhase);
    std::fill(out.begin(), out.end(), 0);
    p.syn.forward(in, out, options_.kernel_threads);
}

void ProcessGraph::step_plastic(PlasticProc& p)
{
    const auto& pre = spike_channels_[p.pre_input].read(t_, kSynapsePhase);
    const auto& post = spike_channels_[p.post_input].read(t_, kSynapsePhase);
    auto& out = current_channels_[p.current_output].begin_write(t_, kSynapsePhase);
    std::fill(out.begin(), out.end(), 0);
    p.syn.forward(pre, out, options_.kernel_threads);
    // Plasticity is frozen and traces are held at zero while the network resets.
    if (neuron::in_reset_window(t_, clusters_[p.post_cluster].spec.config)) {
        p.syn.clear_traces();
    } else {
        p.syn.learn(pre, post, options_.kernel_threads);
    }
}

void ProcessGraph::step_cluster(ClusterProc& p)
{
    std::vector<std::int64_t> sum(p.spec.size(), 0);
    for (const auto ch : p.current_inputs) {
        const auto& cur = current_channels_[ch].read(t_, kClusterPhase);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += cur[i];
    }
    CurrentVector input(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) input[i] = fxp::saturate(sum[i], &p.sat);

    const auto spikes = neuron::step(p.state, input, p.spec.config, &p.sat, options_.kernel_threads);
    std::uint32_t fired = 0;
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        if (spikes[i]) {
            ++p.spike_totals[i];
            ++fired;
        }
    }
    p.last_spike_count = fired;
    for (const auto ch : p.spike_outputs) {
        auto& out = spike_channels_[ch].begin_write(t_, kClusterPhase);
        std::copy(spikes.begin(), spikes.end(), out.begin());
    }
}

void ProcessGraph::run_step()
{
    if (encoder_.declared) step_encoder();

    const bool reversed = options_.order == ScheduleOrder::reversed;
    const auto n_syn = static_cast<std::ptrdiff_t>(static_.size() + plastic_.size());
#pragma omp parallel for num_threads(options_.process_threads) if (options_.process_threads > 1) schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < n_syn; ++k) {
        const auto idx = static_cast<std::size_t>(reversed ? n_syn - 1 - k : k);
        if (idx < static_.size()) {
            step_static(static_[idx]);
        } else {
            step_plastic(plastic_[idx - static_.size()]);
        }
    }

    const auto n_cl = static_cast<std::ptrdiff_t>(clusters_.size());
#pragma omp parallel for num_threads(options_.process_threads) if (options_.process_threads > 1) schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < n_cl; ++k) {
        step_cluster(clusters_[static_cast<std::size_t>(reversed ? n_cl - 1 - k : k)]);
    }

    ++t_;
    ++steps_executed_;
}

WindowObservation ProcessGraph::run_window(std::int32_t steps)
{
    require_finalized();
    if (steps < 0) throw std::invalid_argument("window length must be >= 0");

    WindowObservation obs;
    obs.start_t = t_;
    obs.steps = steps;
    std::uint64_t sat_before = 0;
    for (auto& c : clusters_) {
        obs.clusters.push_back(c.name);
        std::fill(c.spike_totals.begin(), c.spike_totals.end(), 0);
        sat_before += c.sat.events();
    }
    encoder_.injected = 0;

    obs.spikes_per_step.reserve(static_cast<std::size_t>(steps));
    for (std::int32_t s = 0; s < steps; ++s) {
        run_step();
        std::vector<std::uint32_t> row;
        row.reserve(clusters_.size());
        for (const auto& c : clusters_) row.push_back(c.last_spike_count);
        obs.spikes_per_step.push_back(std::move(row));
    }

    std::uint64_t sat_after = 0;
    for (const auto& c : clusters_) {
        obs.neuron_spikes.push_back(c.spike_totals);
        sat_after += c.sat.events();
    }
    obs.saturation_events = sat_after - sat_before;
    obs.injected_spikes = encoder_.injected;
    return obs;
}

std::int64_t ProcessGraph::inter_paper_reset()
{
    require_finalized();
    const auto saved = encoder_.injection;
    encoder_.injection.reset();
    const std::int64_t remaining = (cycle_ - t_ % cycle_) % cycle_;
    for (std::int64_t s = 0; s < remaining; ++s) run_step();
    encoder_.injection = saved;

    for (auto& c : clusters_) neuron::apply_reset(c.state);
    for (auto& p : plastic_) p.syn.reset_plastic(p.initial_weight);
    for (auto& s : static_) s.syn.clear_pending();
    for (auto& ch : spike_channels_) std::fill(ch.value().begin(), ch.value().end(), 0);
    for (auto& ch : current_channels_) std::fill(ch.value().begin(), ch.value().end(), 0);
    return remaining;
}

bool ProcessGraph::is_quiescent() const
{
    require_finalized();
    if (t_ % cycle_ != 0) return false;
    for (const auto& c : clusters_) {
        if (!neuron::is_quiescent(c.state)) return false;
    }
    for (const auto& p : plastic_) {
        if (!p.syn.at_initial_state()) return false;
    }
    for (const auto& s : static_) {
        if (!s.syn.pending_empty()) return false;
    }
    auto all_zero = [](const auto& xs) { return std::all_of(xs.begin(), xs.end(), [](auto x) { return x == 0; }); };
    return std::all_of(spike_channels_.begin(), spike_channels_.end(), [&](const auto& ch) { return all_zero(ch.value()); });
}

// ----------------------------------------------------------------- queries

std::vector<ProcessInfo> ProcessGraph::processes() const
{
    std::vector<ProcessInfo> out;
    if (encoder_.declared) out.push_back({"encoder", ProcessKind::encoder});
    for (const auto& s : static_) out.push_back({s.name, ProcessKind::dense});
    for (const auto& p : plastic_) out.push_back({p.name, ProcessKind::learning_dense});
    for (const auto& c : clusters_) out.push_back({c.name, ProcessKind::neuron_cluster});
    return out;
}

std::vector<std::string> ProcessGraph::schedule() const
{
    std::vector<std::string> out;
    for (const auto& p : processes()) out.push_back(std::string(to_string(p.kind)) + ":" + p.name);
    return out;
}

std::size_t ProcessGraph::count(ProcessKind kind) const
{
    const auto ps = processes();
    return static_cast<std::size_t>(std::count_if(ps.begin(), ps.end(), [&](const auto& p) { return p.kind == kind; }));
}

std::optional<std::size_t> ProcessGraph::cluster_index_or_none(const std::string& name) const
{
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
        if (clusters_[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t ProcessGraph::cluster_index(const std::string& name) const
{
    if (const auto i = cluster_index_or_none(name)) return *i;
    throw std::out_of_range("unknown cluster '" + name + "'");
}

std::size_t ProcessGraph::plastic_index(const std::string& name) const
{
    for (std::size_t i = 0; i < plastic_.size(); ++i) {
        if (plastic_[i].name == name) return i;
    }
    throw std::out_of_range("unknown plastic block '" + name + "'");
}

std::size_t ProcessGraph::static_index(const std::string& name) const
{
    for (std::size_t i = 0; i < static_.size(); ++i) {
        if (static_[i].name == name) return i;
    }
    throw std::out_of_range("unknown static block '" + name + "'");
}

std::vector<std::int32_t> ProcessGraph::read_plastic_column(std::size_t b, std::size_t post) const
{
    require_finalized();
    return plastic_.at(b).syn.column(post);
}

std::uint64_t ProcessGraph::channel_violations() const
{
    std::uint64_t n = 0;
    for (const auto& ch : spike_channels_) n += ch.violations();
    for (const auto& ch : current_channels_) n += ch.violations();
    return n;
}

// ------------------------------------------------------------------- build

ProcessGraph build(const graph::NetworkSpec& network, RuntimeOptions options)
{
    network.validate();
    ProcessGraph g(options);
    std::vector<std::string> paper_clusters;
    for (const auto& c : network.clusters) {
        g.declare_cluster(c);
        if (c.role != graph::ClusterRole::topic) paper_clusters.push_back(c.name);
    }
    for (const auto& b : network.static_blocks) {
        g.declare_static(b.name, network.clusters[b.pre].name, network.clusters[b.post].name, b.synapses, b.delay);
    }
    for (const auto& b : network.plastic_blocks) {
        g.declare_plastic(b.name, network.clusters[b.pre].name, network.clusters[b.post].name, b.stdp,
                          b.initial_weight, b.delay);
    }
    if (!paper_clusters.empty()) g.declare_encoder(network.encoder_weight, paper_clusters);
    g.finalize();
    return g;
}

} // namespace sgnn::runtime
