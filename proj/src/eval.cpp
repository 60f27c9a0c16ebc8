#include "sgnn/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgnn::eval {

Decoded decode_label(std::span<const std::int32_t> topic_weights)
{
    if (topic_weights.empty()) throw std::invalid_argument("cannot decode an empty weight row");
    const auto best = std::min_element(topic_weights.begin(), topic_weights.end());
    const auto hits = std::count(topic_weights.begin(), topic_weights.end(), *best);
    return {static_cast<std::uint32_t>(best - topic_weights.begin()), hits > 1};
}

Decoded decode_rate(std::span<const std::uint32_t> topic_spikes)
{
    if (topic_spikes.empty()) throw std::invalid_argument("cannot decode an empty spike-count row");
    const auto best = std::max_element(topic_spikes.begin(), topic_spikes.end());
    const auto hits = std::count(topic_spikes.begin(), topic_spikes.end(), *best);
    return {static_cast<std::uint32_t>(best - topic_spikes.begin()), hits > 1};
}

std::string topic_block_for(const std::string& cluster)
{
    return "topic->" + cluster;
}

PaperEvalResult evaluate_paper(runtime::ProcessGraph& graph, const PaperRef& paper)
{
    if (!graph.is_quiescent()) {
        throw std::logic_error("evaluate_paper requires a quiescent network (reset not completed)");
    }
    const auto cluster = graph.cluster_index(paper.cluster);
    const auto topic_cluster = graph.cluster_index("topic");
    const auto block = graph.plastic_index(topic_block_for(paper.cluster));
    const auto& spec = graph.cluster_spec(cluster);
    if (paper.index >= spec.size()) throw std::out_of_range("paper index outside cluster '" + paper.cluster + "'");

    const auto start = graph.steps_executed();
    graph.set_injection(runtime::SpikeEncoderConfig{paper.cluster, paper.index, 0});
    const auto obs = graph.run_window(graph.active_steps());

    PaperEvalResult r;
    r.node = spec.members[paper.index];
    r.cluster = paper.cluster;
    r.index = paper.index;
    r.truth = spec.labels[paper.index];
    r.weights = graph.read_plastic_column(block, paper.index);
    const auto label = decode_label(r.weights);
    r.predicted = label.topic;
    r.tie = label.tie;
    r.topic_spikes = obs.neuron_spikes[topic_cluster];
    r.rate_predicted = decode_rate(r.topic_spikes).topic;
    r.spikes = obs.total_spikes();
    r.saturation_events = obs.saturation_events;

    graph.inter_paper_reset();
    graph.set_injection(std::nullopt);
    r.steps = static_cast<std::int64_t>(graph.steps_executed() - start);
    return r;
}

EvalReport evaluate_set(runtime::ProcessGraph& graph, const std::vector<PaperRef>& papers,
                        const std::string& set_name, const EvalOptions& options)
{
    EvalReport rep;
    rep.set_name = set_name;
    rep.topics = graph.cluster_spec(graph.cluster_index("topic")).size();
    rep.confusion.assign(rep.topics, std::vector<std::uint32_t>(rep.topics, 0));
    rep.papers.resize(papers.size());

    const int workers = std::max(1, options.workers);
    if (workers == 1 || papers.size() < 2) {
        for (std::size_t i = 0; i < papers.size(); ++i) rep.papers[i] = evaluate_paper(graph, papers[i]);
    } else {
        if (!graph.is_quiescent()) throw std::logic_error("evaluate_set requires a quiescent network");
        const auto n = static_cast<std::ptrdiff_t>(papers.size());
        std::exception_ptr failure;
#pragma omp parallel num_threads(workers)
        {
            runtime::ProcessGraph local = graph;
#pragma omp for schedule(dynamic, 1)
            for (std::ptrdiff_t i = 0; i < n; ++i) {
                try {
                    rep.papers[static_cast<std::size_t>(i)] = evaluate_paper(local, papers[static_cast<std::size_t>(i)]);
                } catch (...) {
#pragma omp critical(sgnn_eval_failure)
                    if (!failure) failure = std::current_exception();
                }
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    for (const auto& r : rep.papers) {
        ++rep.evaluated;
        if (r.correct()) ++rep.correct;
        if (r.tie) ++rep.ties;
        if (r.rate_predicted == r.truth) ++rep.rate_correct;
        ++rep.confusion[r.truth][r.predicted];
        rep.total_steps += static_cast<std::uint64_t>(r.steps);
        rep.saturation_events += r.saturation_events;
    }
    if (rep.evaluated > 0) rep.accuracy = static_cast<double>(rep.correct) / static_cast<double>(rep.evaluated);
    return rep;
}

std::vector<PaperRef> papers_of(const runtime::ProcessGraph& graph, const std::string& cluster)
{
    const auto c = graph.cluster_index(cluster);
    std::vector<PaperRef> out;
    for (std::size_t i = 0; i < graph.cluster_spec(c).size(); ++i) out.push_back({cluster, i});
    return out;
}

} // namespace sgnn::eval
