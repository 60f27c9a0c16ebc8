#pragma once

// End-to-end workflows behind the command line: dataset -> split -> network
// -> evaluation, the hyperparameter search loop, neuron tracing, and the
// text reports they produce.

#include "sgnn/bopt.hpp"
#include "sgnn/config.hpp"
#include "sgnn/eval.hpp"
#include "sgnn/graph.hpp"
#include "sgnn/runtime.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sgnn::pipeline {

struct Dataset {
    graph::CitationGraph graph;
    graph::Split split;
};

/// Loads both files and draws the split for `run.params.split_seed`.
Dataset prepare(const config::RunConfig& run);

/// Builds a fresh network for `params` and evaluates the chosen set.
eval::EvalReport evaluate(const Dataset& data, const graph::NetworkParams& params, config::EvalSet set,
                          int workers = 1);

std::string format_run_report(const config::RunConfig& run, const Dataset& data, const eval::EvalReport& report);

// ----------------------------------------------------------------- search

bopt::SearchSpace search_space(const config::BoConfig& bo);

/// `base` with the four searched parameters replaced by a grid point.
graph::NetworkParams with_point(graph::NetworkParams base, const std::vector<std::int64_t>& values);

/// Objective = validation accuracy; an empty validation set or an invalid
/// parameter combination counts as a failed evaluation.
bopt::OptimizeResult search(const config::Config& cfg, const Dataset& data);

std::string format_search_report(const config::Config& cfg, const bopt::SearchSpace& space,
                                 const bopt::OptimizeResult& result);

// ---------------------------------------------------------------- inspect

struct TraceRow {
    std::int64_t t = 0;
    std::string neuron;
    std::int32_t u = 0;
    std::int32_t v = 0;
    bool spike = false;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// Two recurrently coupled neurons driven by an input spike every other step.
/// With `long_reset`, reset interval 10 and reset length 4; otherwise the same
/// neurons without reset.
std::vector<TraceRow> two_neuron_demo(std::int32_t steps, bool long_reset = true);

struct NeuronSelector {
    std::string cluster;
    std::size_t index = 0;
};

/// Parses "cluster:index". Throws config::ValueError.
NeuronSelector parse_selector(const std::string& text);

/// Runs `steps` timesteps from the current state, optionally injecting one
/// paper every cycle, and records the selected neurons after each step.
std::vector<TraceRow> trace(runtime::ProcessGraph& graph, const std::vector<NeuronSelector>& neurons,
                            const std::optional<NeuronSelector>& inject, std::int32_t steps);

std::string format_trace_csv(const std::vector<TraceRow>& rows);

/// Every learnable weight as "block,pre,post,weight" rows.
std::string format_weights_csv(const runtime::ProcessGraph& graph);

} // namespace sgnn::pipeline
