#include "sgnn/runtime.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

using namespace sgnn;
using namespace sgnn::runtime;

namespace {

graph::ClusterSpec cluster(const std::string& name, std::size_t n, std::int32_t refractory = 0,
                           std::int32_t interval = 10, std::int32_t length = 3)
{
    graph::ClusterSpec c;
    c.name = name;
    c.members.resize(n);
    c.labels.resize(n);
    c.config.vth = 1;
    c.config.refractory = refractory;
    c.config.reset_interval = interval;
    c.config.reset_length = length;
    return c;
}

// a <-> b with weight-100 links, encoder into "a".
ProcessGraph two_papers(int delay = 0)
{
    ProcessGraph g;
    g.declare_cluster(cluster("a", 1, 20));
    g.declare_cluster(cluster("b", 1, 20));
    g.declare_static("a->b", "a", "b", {{0, 0, 100}}, delay);
    g.declare_static("b->a", "b", "a", {{0, 0, 100}}, delay);
    g.declare_encoder(100, {"a", "b"});
    g.finalize();
    return g;
}

graph::NetworkSpec planted_network(std::uint64_t seed, std::int32_t steps = 14, std::int32_t delay = 0)
{
    synthetic::PlantedOptions o;
    o.topic_sizes = {60, 50, 40};
    o.edges = 400;
    o.seed = seed;
    const auto g = synthetic::planted(o);
    graph::NetworkParams p;
    p.sim_steps = steps;
    p.delay = delay;
    return graph::compile(g, graph::make_split(g, seed, {5, 20}), p);
}

} // namespace

TEST(Runtime, EncodeOneHot)
{
    const SpikeEncoderConfig cfg{"validation", 5, 0};
    const auto v = encode(cfg, 0, 8);
    EXPECT_EQ(std::count(v.begin(), v.end(), 1), 1);
    EXPECT_EQ(v[5], 1);
    const auto z = encode(cfg, 3, 8);
    EXPECT_EQ(std::count(z.begin(), z.end(), 1), 0);
    EXPECT_THROW(encode({"validation", 8, 0}, 0, 8), std::out_of_range);
}

TEST(Runtime, ChannelFlagsSameStepReads)
{
    Channel<int> ch(0);
    ch.begin_write(3, 1) = 5;
    EXPECT_EQ(ch.read(3, 2), 5);
    EXPECT_EQ(ch.violations(), 0u);
    ch.read(3, 1);
    ch.read(3, 0);
    EXPECT_EQ(ch.violations(), 2u);
    ch.read(4, 0);
    EXPECT_EQ(ch.violations(), 2u);
}

TEST(Runtime, BuildErrors)
{
    ProcessGraph empty;
    EXPECT_THROW(empty.finalize(), std::invalid_argument);

    ProcessGraph dangling;
    dangling.declare_cluster(cluster("a", 2));
    dangling.declare_static("a->ghost", "a", "ghost", {{0, 0, 1}}, 0);
    try {
        dangling.finalize();
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("a->ghost"), std::string::npos);
    }

    ProcessGraph shape;
    shape.declare_cluster(cluster("a", 2));
    shape.declare_cluster(cluster("b", 2));
    shape.declare_static("a->b", "a", "b", {{5, 0, 1}}, 0);
    try {
        shape.finalize();
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("a->b"), std::string::npos);
    }
}

TEST(Runtime, SingleClusterRunsTrivially)
{
    ProcessGraph g;
    g.declare_cluster(cluster("solo", 1));
    g.declare_encoder(100, {"solo"});
    g.finalize();
    EXPECT_EQ(g.count(ProcessKind::neuron_cluster), 1u);
    EXPECT_EQ(g.count(ProcessKind::encoder), 1u);
    const auto obs = g.run_window(5);
    EXPECT_EQ(obs.total_spikes(), 0u);
}

TEST(Runtime, IsolatedPaperFiresOnce)
{
    ProcessGraph g;
    g.declare_cluster(cluster("p", 3, 20, 10, 3));
    g.declare_encoder(100, {"p"});
    g.finalize();
    g.set_injection(SpikeEncoderConfig{"p", 1, 0});
    const auto obs = g.run_window(10);
    EXPECT_EQ(obs.injected_spikes, 1u);
    EXPECT_EQ(obs.total_spikes(), 1u);
    EXPECT_EQ(obs.neuron_spikes[0][1], 1u);
}

TEST(Runtime, TwoPaperCascade)
{
    for (int delay = 0; delay <= 3; ++delay) {
        auto g = two_papers(delay);
        g.set_injection(SpikeEncoderConfig{"a", 0, 0});
        const auto obs = g.run_window(8);
        const auto a = g.cluster_index("a"), b = g.cluster_index("b");
        for (std::size_t t = 0; t < 8; ++t) {
            EXPECT_EQ(obs.spikes_per_step[t][a], t == 0 ? 1u : 0u) << delay;
            EXPECT_EQ(obs.spikes_per_step[t][b], t == static_cast<std::size_t>(1 + delay) ? 1u : 0u) << delay;
        }
        EXPECT_EQ(g.channel_violations(), 0u);
    }
}

TEST(Runtime, CoraShapedBuild)
{
    const auto g = synthetic::planted();
    const auto spec = graph::compile(g, graph::make_split(g, 2), {});
    const auto net = build(spec);
    EXPECT_EQ(net.count(ProcessKind::neuron_cluster), 4u);
    EXPECT_EQ(net.count(ProcessKind::encoder), 1u);
    EXPECT_EQ(net.count(ProcessKind::learning_dense), 4u);
    EXPECT_EQ(net.count(ProcessKind::dense), spec.static_blocks.size());
    std::size_t synapses = 0;
    for (std::size_t b = 0; b < net.static_count(); ++b) synapses += net.static_block(b).synapse_count();
    EXPECT_EQ(synapses, 2 * g.edges.size() + 280);
}

TEST(Runtime, ScheduleIsPhaseOrdered)
{
    const auto net = build(planted_network(1));
    const auto order = net.schedule();
    const auto procs = net.processes();
    int last = -1;
    for (const auto& name : order) {
        const auto it = std::find_if(procs.begin(), procs.end(), [&](const auto& p) { return std::string(to_string(p.kind)) + ":" + p.name == name; });
        ASSERT_NE(it, procs.end());
        EXPECT_GE(phase_of(it->kind), last);
        last = phase_of(it->kind);
    }
}

TEST(Runtime, DeterministicAcrossThreadsAndOrders)
{
    const auto spec = planted_network(5);
    auto run = [&](RuntimeOptions o) {
        auto net = build(spec, o);
        net.set_injection(SpikeEncoderConfig{"validation", 3, 0});
        auto obs = net.run_window(net.active_steps());
        std::vector<std::int32_t> w;
        for (std::size_t b = 0; b < net.plastic_count(); ++b) {
            w.insert(w.end(), net.plastic(b).weights().begin(), net.plastic(b).weights().end());
        }
        EXPECT_EQ(net.channel_violations(), 0u);
        return std::make_pair(obs, w);
    };
    const auto base = run({});
    EXPECT_GT(base.first.total_spikes(), 1u);
    EXPECT_EQ(base, run({4, 1, ScheduleOrder::canonical}));
    EXPECT_EQ(base, run({1, 4, ScheduleOrder::canonical}));
    EXPECT_EQ(base, run({3, 2, ScheduleOrder::reversed}));
}

TEST(Runtime, DeclarationOrderDoesNotMatter)
{
    const auto spec = planted_network(6);
    auto forward = build(spec);

    ProcessGraph backward;
    for (auto it = spec.plastic_blocks.rbegin(); it != spec.plastic_blocks.rend(); ++it) {
        backward.declare_plastic(it->name, spec.clusters[it->pre].name, spec.clusters[it->post].name, it->stdp,
                                 it->initial_weight, it->delay);
    }
    for (auto it = spec.static_blocks.rbegin(); it != spec.static_blocks.rend(); ++it) {
        backward.declare_static(it->name, spec.clusters[it->pre].name, spec.clusters[it->post].name, it->synapses,
                                it->delay);
    }
    std::vector<std::string> targets;
    for (auto it = spec.clusters.rbegin(); it != spec.clusters.rend(); ++it) {
        backward.declare_cluster(*it);
        if (it->role != graph::ClusterRole::topic) targets.push_back(it->name);
    }
    backward.declare_encoder(spec.encoder_weight, targets);
    backward.finalize();

    for (auto* g : {&forward, &backward}) g->set_injection(SpikeEncoderConfig{"test", 7, 0});
    EXPECT_EQ(forward.run_window(forward.active_steps()), backward.run_window(backward.active_steps()));
}

TEST(Runtime, InterPaperResetRestoresEverything)
{
    auto net = build(planted_network(7, 12, 1));
    ASSERT_TRUE(net.is_quiescent());
    std::vector<std::vector<synapse::Synapse>> statics;
    for (std::size_t b = 0; b < net.static_count(); ++b) statics.push_back(net.static_block(b).synapses());

    net.set_injection(SpikeEncoderConfig{"validation", 0, 0});
    const auto obs = net.run_window(net.active_steps());
    EXPECT_GT(obs.total_spikes(), 0u);
    EXPECT_FALSE(net.is_quiescent());
    const auto steps = net.inter_paper_reset();
    EXPECT_EQ(steps, net.reset_steps());
    EXPECT_TRUE(net.is_quiescent());
    for (std::size_t b = 0; b < net.plastic_count(); ++b) EXPECT_TRUE(net.plastic(b).at_initial_state());
    for (std::size_t b = 0; b < net.static_count(); ++b) {
        const auto now = net.static_block(b).synapses();
        ASSERT_EQ(now.size(), statics[b].size());
        for (std::size_t k = 0; k < now.size(); ++k) EXPECT_EQ(now[k].weight, statics[b][k].weight);
    }
    // Idempotent on a quiescent graph.
    net.set_injection(std::nullopt);
    const auto t = net.now();
    net.inter_paper_reset();
    EXPECT_TRUE(net.is_quiescent());
    EXPECT_EQ((net.now() - t) % net.cycle(), 0);
}
