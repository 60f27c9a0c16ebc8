#include "sgnn/pipeline.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <charconv>

namespace sgnn::pipeline {

Dataset prepare(const config::RunConfig& run)
{
    Dataset d;
    d.graph = graph::load_graph(run.content, run.cites);
    d.split = graph::make_split(d.graph, run.params.split_seed, run.split_options());
    return d;
}

eval::EvalReport evaluate(const Dataset& data, const graph::NetworkParams& params, config::EvalSet set, int workers)
{
    const auto spec = graph::compile(data.graph, data.split, params);
    auto net = runtime::build(spec);
    const std::string name(config::to_string(set));

    std::vector<eval::PaperRef> papers;
    if (net.cluster_index_or_none(name)) papers = eval::papers_of(net, name);
    return eval::evaluate_set(net, papers, name, {workers});
}

namespace {

std::string format_accuracy(const std::optional<double>& a)
{
    return a ? fmt::format("{:.6f}", *a) : std::string("none");
}

} // namespace

std::string format_run_report(const config::RunConfig& run, const Dataset& data, const eval::EvalReport& r)
{
    const auto& g = data.graph;
    std::string out = "[config]\n" + config::format_run(run);

    out += "\n[summary]\n";
    out += fmt::format("nodes = {}\n", g.nodes.size());
    out += fmt::format("edges = {}\n", g.edges.size());
    out += fmt::format("dropped_self_citations = {}\n", g.dropped_self_citations);
    out += fmt::format("topics = {}\n", fmt::join(g.topics, ","));
    out += fmt::format("train = {}\n", data.split.train.size());
    out += fmt::format("validation = {}\n", data.split.validation.size());
    out += fmt::format("test = {}\n", data.split.test.size());
    out += fmt::format("set = {}\n", r.set_name);
    out += fmt::format("evaluated = {}\n", r.evaluated);
    out += fmt::format("correct = {}\n", r.correct);
    out += fmt::format("accuracy = {}\n", format_accuracy(r.accuracy));
    out += fmt::format("ties = {}\n", r.ties);
    out += fmt::format("rate_correct = {}\n", r.rate_correct);
    out += fmt::format("steps = {}\n", r.total_steps);
    out += fmt::format("saturation_events = {}\n", r.saturation_events);

    out += "\n[confusion]\n";
    out += fmt::format("truth\\predicted,{}\n", fmt::join(g.topics, ","));
    for (std::size_t t = 0; t < r.confusion.size(); ++t) {
        out += fmt::format("{},{}\n", g.topics[t], fmt::join(r.confusion[t], ","));
    }

    out += "\n[papers]\n";
    out += "paper,truth,predicted,correct,tie,weights,rate_predicted,spikes\n";
    for (const auto& p : r.papers) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", g.nodes[p.node].id, g.topics[p.truth], g.topics[p.predicted],
                           p.correct() ? 1 : 0, p.tie ? 1 : 0, fmt::join(p.weights, ";"),
                           g.topics[p.rate_predicted], p.spikes);
    }
    return out;
}

// ----------------------------------------------------------------- search

bopt::SearchSpace search_space(const config::BoConfig& bo)
{
    return bopt::SearchSpace({{"paper_to_paper_w", bo.grid_paper_to_paper_w},
                              {"train_to_topic_w", bo.grid_train_to_topic_w},
                              {"tau", bo.grid_tau},
                              {"sim_steps", bo.grid_sim_steps}});
}

graph::NetworkParams with_point(graph::NetworkParams base, const std::vector<std::int64_t>& values)
{
    base.paper_to_paper_w = static_cast<std::int32_t>(values.at(0));
    base.train_to_topic_w = static_cast<std::int32_t>(values.at(1));
    base.tau = static_cast<std::int32_t>(values.at(2));
    base.sim_steps = static_cast<std::int32_t>(values.at(3));
    return base;
}

bopt::OptimizeResult search(const config::Config& cfg, const Dataset& data)
{
    const auto space = search_space(cfg.bo);
    auto objective = [&](const std::vector<std::int64_t>& values) {
        const auto params = with_point(cfg.run.params, values);
        params.validate();
        const auto r = evaluate(data, params, config::EvalSet::validation, cfg.run.workers);
        if (!r.accuracy) throw std::runtime_error("validation set is empty");
        return *r.accuracy;
    };
    bopt::OptimizeOptions opts;
    opts.n_init = cfg.bo.n_init;
    opts.n_iter = cfg.bo.n_iter;
    opts.seed = cfg.bo.bo_seed;
    return bopt::optimize(objective, space, opts);
}

std::string format_search_report(const config::Config& cfg, const bopt::SearchSpace& space,
                                 const bopt::OptimizeResult& result)
{
    auto run = cfg.run;
    run.set = config::EvalSet::validation;
    std::string out = "[config]\n" + config::format_run(run) + config::format_bo(cfg.bo);

    out += "\n[summary]\n";
    out += fmt::format("grid_points = {}\n", space.size());
    out += fmt::format("evaluations = {}\n", result.history.size());
    out += fmt::format("exhausted = {}\n", result.exhausted ? "yes" : "no");
    if (result.best) {
        const auto& b = result.history[*result.best];
        out += fmt::format("best_iteration = {}\n", *result.best + 1);
        out += fmt::format("best_paper_to_paper_w = {}\n", b.values[0]);
        out += fmt::format("best_train_to_topic_w = {}\n", b.values[1]);
        out += fmt::format("best_tau = {}\n", b.values[2]);
        out += fmt::format("best_sim_steps = {}\n", b.values[3]);
        out += fmt::format("best_accuracy = {:.6f}\n", b.objective);
    } else {
        out += "best_iteration = none\n";
    }

    out += "\n[history]\n";
    out += "iteration,phase,paper_to_paper_w,train_to_topic_w,tau,sim_steps,accuracy,failed,incumbent\n";
    for (std::size_t i = 0; i < result.history.size(); ++i) {
        const auto& o = result.history[i];
        out += fmt::format("{},{},{},{:.6f},{},{:.6f}\n", i + 1, o.random ? "random" : "model", fmt::join(o.values, ","),
                           o.objective, o.failed ? 1 : 0, result.incumbent[i]);
    }
    return out;
}

// ---------------------------------------------------------------- inspect

std::vector<TraceRow> two_neuron_demo(std::int32_t steps, bool long_reset)
{
    if (steps < 0) throw config::ValueError("steps must be >= 0");
    neuron::LifLongResetConfig cfg;
    cfg.du = fxp::Q12Decay(2048);
    cfg.dv = fxp::Q12Decay(512);
    cfg.vth = 100;
    cfg.reset_interval = 10;
    cfg.reset_length = long_reset ? 4 : 0;
    const std::int64_t cycle = long_reset ? cfg.cycle() : 1 << 30;

    constexpr std::int32_t input_w[2] = {60, 40};
    constexpr std::int32_t coupling = 30;

    auto state = neuron::new_cluster(2, cfg);
    SpikeVector last(2, 0);
    std::vector<TraceRow> rows;
    for (std::int64_t t = 0; t < steps; ++t) {
        const bool input = (t % cycle) % 2 == 0;
        std::int32_t in[2];
        for (int i = 0; i < 2; ++i) in[i] = (input ? input_w[i] : 0) + (last[1 - i] ? coupling : 0);
        last = neuron::step(state, in, cfg);
        for (int i = 0; i < 2; ++i) rows.push_back({t, std::to_string(i), state.u[i], state.v[i], last[i] != 0});
    }
    return rows;
}

NeuronSelector parse_selector(const std::string& text)
{
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
        throw config::ValueError("unknown neuron selector '" + text + "' (expected cluster:index)");
    }
    NeuronSelector s;
    s.cluster = text.substr(0, colon);
    const auto* b = text.data() + colon + 1;
    const auto* e = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, s.index);
    if (ec != std::errc{} || ptr != e) throw config::ValueError("unknown neuron selector '" + text + "'");
    return s;
}

std::vector<TraceRow> trace(runtime::ProcessGraph& graph, const std::vector<NeuronSelector>& neurons,
                            const std::optional<NeuronSelector>& inject, std::int32_t steps)
{
    if (steps < 0) throw config::ValueError("steps must be >= 0");
    std::vector<std::pair<std::size_t, std::size_t>> where;
    for (const auto& n : neurons) {
        const auto c = graph.cluster_index_or_none(n.cluster);
        if (!c || n.index >= graph.cluster_spec(*c).size()) {
            throw config::ValueError(fmt::format("unknown neuron selector '{}:{}'", n.cluster, n.index));
        }
        where.emplace_back(*c, n.index);
    }
    if (inject) {
        const auto c = graph.cluster_index_or_none(inject->cluster);
        if (!c || inject->index >= graph.cluster_spec(*c).size() || inject->cluster == "topic") {
            throw config::ValueError(fmt::format("cannot inject into '{}:{}'", inject->cluster, inject->index));
        }
        graph.set_injection(runtime::SpikeEncoderConfig{inject->cluster, inject->index, 0});
    }

    std::vector<TraceRow> rows;
    for (std::int32_t s = 0; s < steps; ++s) {
        const auto t = graph.now();
        const auto obs = graph.run_window(1);
        for (std::size_t k = 0; k < where.size(); ++k) {
            const auto [c, i] = where[k];
            const auto& st = graph.cluster_state(c);
            rows.push_back({t, fmt::format("{}:{}", neurons[k].cluster, neurons[k].index), st.u[i], st.v[i],
                            obs.neuron_spikes[c][i] != 0});
        }
    }
    return rows;
}

std::string format_trace_csv(const std::vector<TraceRow>& rows)
{
    std::string out = "t,neuron,u,v,spike\n";
    for (const auto& r : rows) out += fmt::format("{},{},{},{},{}\n", r.t, r.neuron, r.u, r.v, r.spike ? 1 : 0);
    return out;
}

std::string format_weights_csv(const runtime::ProcessGraph& graph)
{
    std::string out = "block,pre,post,weight\n";
    for (std::size_t b = 0; b < graph.plastic_count(); ++b) {
        const auto& syn = graph.plastic(b);
        for (std::size_t i = 0; i < syn.pre_size(); ++i) {
            for (std::size_t j = 0; j < syn.post_size(); ++j) {
                out += fmt::format("{},{},{},{}\n", graph.plastic_name(b), i, j, syn.weight(i, j));
            }
        }
    }
    return out;
}

} // namespace sgnn::pipeline
