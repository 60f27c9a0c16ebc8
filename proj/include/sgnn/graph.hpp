#pragma once

// Citation graph ingestion, train/validation/test splitting, and compilation
// of a labelled graph into a runnable spiking network description.

#include "sgnn/neuron.hpp"
#include "sgnn/synapse.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sgnn::graph {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PaperNode {
    std::string id;
    std::uint32_t topic = 0;
};

/// Directed citation, citing paper -> cited paper (node indices).
struct Citation {
    std::uint32_t citing = 0;
    std::uint32_t cited = 0;
};

struct CitationGraph {
    std::vector<PaperNode> nodes;
    std::vector<std::string> topics;  // sorted label names; topic index = position
    std::vector<Citation> edges;
    std::size_t dropped_self_citations = 0;

    std::size_t topic_count() const noexcept { return topics.size(); }

    /// Node index for a paper id; throws std::out_of_range when unknown.
    std::uint32_t index_of(std::string_view id) const;

    /// Throws std::invalid_argument when an edge endpoint or topic is out of range.
    void validate() const;
};

/// Content file: one paper per line, "<id> <feature>... <label>". Features
/// are checked for a consistent count and discarded. Returns a graph with
/// nodes and topics but no edges.
CitationGraph parse_content(std::string_view text, const std::string& source = "content");

struct CitationList {
    std::vector<Citation> edges;
    std::size_t dropped_self_citations = 0;
};

/// Cites file: one edge per line, "<cited id> <citing id>". Duplicate lines are
/// kept; self-citations are dropped and counted.
CitationList parse_cites(std::string_view text, const CitationGraph& nodes, const std::string& source = "cites");

CitationGraph load_graph(const std::filesystem::path& content, const std::filesystem::path& cites);

/// Throws IoError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// ------------------------------------------------------------------ split

struct SplitOptions {
    std::uint32_t train_per_topic = 20;
    std::uint32_t validation_size = 140;
};

struct Split {
    std::vector<std::uint32_t> train;       // ascending node indices
    std::vector<std::uint32_t> validation;
    std::vector<std::uint32_t> test;
    std::uint64_t seed = 0;
};

/// `train_per_topic` nodes per topic drawn uniformly into train; from the
/// remainder `validation_size` nodes drawn with per-topic quotas proportional
/// to the remainder (largest remainder rounding); everything else is test.
Split make_split(const CitationGraph& graph, std::uint64_t seed, const SplitOptions& options = {});

/// Per-topic validation quotas used by make_split (exposed for tests).
std::vector<std::uint32_t> proportional_quotas(const std::vector<std::uint32_t>& available, std::uint32_t total);

// ---------------------------------------------------------------- network

struct NetworkParams {
    std::int32_t paper_to_paper_w = 100;
    std::int32_t train_to_topic_w = 1;
    std::int32_t tau = 30;               // sets tau_plus and tau_minus together
    std::int32_t sim_steps = 20;         // T_s; also the reset interval T_r
    std::int32_t delay = 0;
    std::int32_t reset_length = 7;
    std::int32_t lr = 2;
    std::int32_t a_plus = 1;
    std::int32_t a_minus = -1;
    std::int32_t trace_impulse = 16;
    std::int32_t initial_plastic_weight = 0;
    std::uint64_t split_seed = 0;

    void validate() const;
    synapse::StdpConfig stdp() const;

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

enum class ClusterRole { train, validation, test, topic };

std::string_view to_string(ClusterRole role);

struct ClusterSpec {
    std::string name;
    ClusterRole role = ClusterRole::train;
    std::vector<std::uint32_t> members;  // graph node index (papers) or topic index (topics)
    std::vector<std::uint32_t> labels;   // topic of each neuron
    neuron::LifLongResetConfig config;

    std::size_t size() const noexcept { return members.size(); }
};

struct StaticBlockSpec {
    std::string name;
    std::size_t pre = 0;   // cluster index
    std::size_t post = 0;
    std::vector<synapse::Synapse> synapses;
    int delay = 0;
};

struct PlasticBlockSpec {
    std::string name;
    std::size_t pre = 0;
    std::size_t post = 0;
    synapse::StdpConfig stdp;
    std::int32_t initial_weight = 0;
    int delay = 0;
};

struct NeuronRef {
    std::size_t cluster = 0;
    std::size_t index = 0;

    friend bool operator==(const NeuronRef&, const NeuronRef&) = default;
};

struct NetworkSpec {
    std::vector<ClusterSpec> clusters;
    std::vector<StaticBlockSpec> static_blocks;
    std::vector<PlasticBlockSpec> plastic_blocks;
    std::vector<std::string> topic_names;
    std::vector<std::string> paper_ids;  // graph node index -> id
    NetworkParams params;
    std::int32_t encoder_weight = 0;

    /// Throws std::invalid_argument naming the offending block or cluster.
    void validate() const;

    std::size_t static_synapse_count() const;
    std::size_t cluster_index(ClusterRole role) const;  // throws when absent
    bool has_cluster(ClusterRole role) const;
    NeuronRef locate_paper(std::uint32_t node) const;    // throws when absent
};

/// Builds the network: one population per split part plus one topic
/// population; every citation yields synapses in both directions; every train
/// paper is wired to and from its topic; validation/test populations get
/// learnable blocks to and from every topic. All reset intervals equal
/// params.sim_steps.
NetworkSpec compile(const CitationGraph& graph, const Split& split, const NetworkParams& params);

} // namespace sgnn::graph
