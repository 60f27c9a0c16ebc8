#pragma once

// Per-paper classification protocol and set-level accuracy.
//
// One evaluation: inject a single spike into the paper at window step 0, run
// the active window with plasticity live, read the topic->paper learnable
// weights of that paper, pick the most depressed topic, then let the network
// discharge through its reset window and restore learnable weights. Each
// classification is therefore an independent one-shot STDP episode.

#include "sgnn/runtime.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sgnn::eval {

struct Decoded {
    std::uint32_t topic = 0;
    bool tie = false;

    friend bool operator==(const Decoded&, const Decoded&) = default;
};

/// Argmin over the topic->paper weights; ties go to the lowest topic index
/// and set `tie`. Throws std::invalid_argument for an empty row.
Decoded decode_label(std::span<const std::int32_t> topic_weights);

/// Diagnostic alternative: the topic neuron that fired most (argmax, lowest
/// index on ties). Not used for accuracy.
Decoded decode_rate(std::span<const std::uint32_t> topic_spikes);

struct PaperRef {
    std::string cluster;
    std::size_t index = 0;
};

struct PaperEvalResult {
    std::uint32_t node = 0;             // graph node index
    std::string cluster;
    std::size_t index = 0;              // position inside the cluster
    std::uint32_t truth = 0;
    std::uint32_t predicted = 0;
    bool tie = false;
    std::vector<std::int32_t> weights;  // decoded row, one per topic
    std::uint32_t rate_predicted = 0;
    std::vector<std::uint32_t> topic_spikes;
    std::uint64_t spikes = 0;           // all spikes in the active window
    std::uint64_t saturation_events = 0;
    std::int64_t steps = 0;             // active + reset steps consumed

    bool correct() const noexcept { return predicted == truth; }
    friend bool operator==(const PaperEvalResult&, const PaperEvalResult&) = default;
};

/// Requires a quiescent graph (throws std::logic_error otherwise) and leaves
/// it quiescent.
PaperEvalResult evaluate_paper(runtime::ProcessGraph& graph, const PaperRef& paper);

struct EvalReport {
    std::string set_name;
    std::size_t topics = 0;
    std::size_t evaluated = 0;
    std::size_t correct = 0;
    std::size_t ties = 0;
    std::size_t rate_correct = 0;
    std::optional<double> accuracy;              // empty when nothing was evaluated
    std::vector<std::vector<std::uint32_t>> confusion;  // [truth][predicted]
    std::vector<PaperEvalResult> papers;
    std::uint64_t total_steps = 0;
    std::uint64_t saturation_events = 0;
};

struct EvalOptions {
    int workers = 1;  // independent graph copies evaluated in parallel
};

/// Evaluates `papers` in order. With workers > 1 each worker owns a copy of
/// the (quiescent) graph; the report is identical to the sequential one.
EvalReport evaluate_set(runtime::ProcessGraph& graph, const std::vector<PaperRef>& papers,
                        const std::string& set_name, const EvalOptions& options = {});

/// Every neuron of a paper cluster, in cluster order.
std::vector<PaperRef> papers_of(const runtime::ProcessGraph& graph, const std::string& cluster);

/// Name of the learnable block from the topic population onto `cluster`.
std::string topic_block_for(const std::string& cluster);

} // namespace sgnn::eval
