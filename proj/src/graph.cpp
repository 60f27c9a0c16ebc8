#include "sgnn/graph.hpp"

#include "sgnn/rng.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace sgnn::graph {

namespace {

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn)
{
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = text.find('\n', pos);
        const std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        ++line_no;
        fn(line_no, line);
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
}

bool is_binary_token(std::string_view s)
{
    return s == "0" || s == "1";
}

} // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line)
{
}

std::uint32_t CitationGraph::index_of(std::string_view id) const
{
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) return static_cast<std::uint32_t>(i);
    }
    throw std::out_of_range("unknown paper id '" + std::string(id) + "'");
}

void CitationGraph::validate() const
{
    for (const auto& n : nodes) {
        if (n.topic >= topics.size()) throw std::invalid_argument("paper '" + n.id + "' has an out-of-range topic");
    }
    for (const auto& e : edges) {
        if (e.citing >= nodes.size() || e.cited >= nodes.size()) {
            throw std::invalid_argument("citation endpoint outside the node list");
        }
    }
}

CitationGraph parse_content(std::string_view text, const std::string& source)
{
    struct Row {
        std::string id;
        std::string label;
    };
    std::vector<Row> rows;
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t expected_fields = 0;

    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto fields = split_fields(line);
        if (fields.empty()) return;
        if (fields.size() < 2) throw ParseError(source, line_no, "expected '<id> <features...> <label>'");
        if (expected_fields == 0) expected_fields = fields.size();
        if (fields.size() != expected_fields) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(expected_fields) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        for (std::size_t f = 1; f + 1 < fields.size(); ++f) {
            if (!is_binary_token(fields[f])) {
                throw ParseError(source, line_no, "feature value '" + std::string(fields[f]) + "' is not 0 or 1");
            }
        }
        if (fields.size() > 2 && is_binary_token(fields.back())) {
            throw ParseError(source, line_no, "missing topic label");
        }
        std::string id(fields.front());
        if (auto [it, fresh] = seen.emplace(id, line_no); !fresh) {
            throw ParseError(source, line_no, "duplicate paper id '" + id + "' (first seen on line " +
                                                  std::to_string(it->second) + ")");
        }
        rows.push_back({std::move(id), std::string(fields.back())});
    });

    if (rows.empty()) throw ParseError(source, 0, "no papers found");

    CitationGraph g;
    for (const auto& r : rows) g.topics.push_back(r.label);
    std::sort(g.topics.begin(), g.topics.end());
    g.topics.erase(std::unique(g.topics.begin(), g.topics.end()), g.topics.end());

    g.nodes.reserve(rows.size());
    for (auto& r : rows) {
        const auto topic = std::lower_bound(g.topics.begin(), g.topics.end(), r.label) - g.topics.begin();
        g.nodes.push_back({std::move(r.id), static_cast<std::uint32_t>(topic)});
    }
    return g;
}

CitationList parse_cites(std::string_view text, const CitationGraph& nodes, const std::string& source)
{
    std::unordered_map<std::string_view, std::uint32_t> index;
    index.reserve(nodes.nodes.size());
    for (std::size_t i = 0; i < nodes.nodes.size(); ++i) index.emplace(nodes.nodes[i].id, static_cast<std::uint32_t>(i));

    auto lookup = [&](std::size_t line_no, std::string_view id) {
        const auto it = index.find(id);
        if (it == index.end()) throw ParseError(source, line_no, "unknown paper id '" + std::string(id) + "'");
        return it->second;
    };

    CitationList out;
    std::size_t lines = 0;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto fields = split_fields(line);
        if (fields.empty()) return;
        if (fields.size() != 2) throw ParseError(source, line_no, "expected '<cited id> <citing id>'");
        ++lines;
        const auto cited = lookup(line_no, fields[0]);
        const auto citing = lookup(line_no, fields[1]);
        if (cited == citing) {
            ++out.dropped_self_citations;
            return;
        }
        out.edges.push_back({citing, cited});
    });
    if (lines == 0) throw ParseError(source, 0, "no citations found");
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CitationGraph load_graph(const std::filesystem::path& content, const std::filesystem::path& cites)
{
    auto g = parse_content(read_file(content), content.string());
    auto list = parse_cites(read_file(cites), g, cites.string());
    g.edges = std::move(list.edges);
    g.dropped_self_citations = list.dropped_self_citations;
    return g;
}

// ------------------------------------------------------------------ split

std::vector<std::uint32_t> proportional_quotas(const std::vector<std::uint32_t>& available, std::uint32_t total)
{
    const std::uint64_t pool = std::accumulate(available.begin(), available.end(), std::uint64_t{0});
    std::vector<std::uint32_t> quota(available.size(), 0);
    if (pool == 0 || total == 0) return quota;

    std::vector<std::pair<std::uint64_t, std::size_t>> remainders;
    std::uint64_t assigned = 0;
    for (std::size_t k = 0; k < available.size(); ++k) {
        const std::uint64_t scaled = std::uint64_t{total} * available[k];
        quota[k] = static_cast<std::uint32_t>(scaled / pool);
        assigned += quota[k];
        remainders.emplace_back(scaled % pool, k);
    }
    // Largest fractional part first, lower topic index on ties.
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total && r < remainders.size(); ++r, ++assigned) {
        ++quota[remainders[r].second];
    }
    return quota;
}

Split make_split(const CitationGraph& graph, std::uint64_t seed, const SplitOptions& options)
{
    if (options.train_per_topic == 0) throw std::invalid_argument("train_per_topic must be >= 1");
    const std::size_t k_topics = graph.topic_count();

    std::vector<std::vector<std::uint32_t>> by_topic(k_topics);
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) by_topic[graph.nodes[i].topic].push_back(static_cast<std::uint32_t>(i));

    for (std::size_t k = 0; k < k_topics; ++k) {
        if (by_topic[k].size() < options.train_per_topic) {
            throw std::invalid_argument("topic '" + graph.topics[k] + "' has " + std::to_string(by_topic[k].size()) +
                                        " papers, fewer than train_per_topic = " +
                                        std::to_string(options.train_per_topic));
        }
    }

    Rng rng(derive_seed(seed, "split"));
    Split split;
    split.seed = seed;

    std::vector<std::uint32_t> available(k_topics);
    for (std::size_t k = 0; k < k_topics; ++k) {
        rng.shuffle(std::span<std::uint32_t>(by_topic[k]));
        split.train.insert(split.train.end(), by_topic[k].begin(), by_topic[k].begin() + options.train_per_topic);
        available[k] = static_cast<std::uint32_t>(by_topic[k].size() - options.train_per_topic);
    }

    const auto pool = std::accumulate(available.begin(), available.end(), std::uint64_t{0});
    if (pool < options.validation_size) {
        throw std::invalid_argument("validation quota " + std::to_string(options.validation_size) +
                                    " unreachable: only " + std::to_string(pool) +
                                    " papers remain after the training draw");
    }

    const auto quota = proportional_quotas(available, options.validation_size);
    for (std::size_t k = 0; k < k_topics; ++k) {
        auto first = by_topic[k].begin() + options.train_per_topic;
        split.validation.insert(split.validation.end(), first, first + quota[k]);
        split.test.insert(split.test.end(), first + quota[k], by_topic[k].end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

// ---------------------------------------------------------------- network

void NetworkParams::validate() const
{
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw std::invalid_argument(what);
    };
    require(paper_to_paper_w >= 1, "paper_to_paper_w must be >= 1");
    require(train_to_topic_w >= 1, "train_to_topic_w must be >= 1");
    (void)synapse::encode_weight(paper_to_paper_w);
    (void)synapse::encode_weight(train_to_topic_w);
    require(tau >= 1, "tau must be >= 1");
    require(sim_steps >= 1, "sim_steps must be >= 1");
    require(delay >= 0, "delay must be >= 0");
    require(reset_length >= 0, "reset_length must be >= 0");
    require(reset_length < sim_steps, "reset_length must be smaller than sim_steps");
    require(trace_impulse >= 1 && trace_impulse <= synapse::kTraceCap, "trace_impulse must lie in [1, 127]");
    stdp().validate();
    require(initial_plastic_weight >= -synapse::kWeightMantissaMax &&
                initial_plastic_weight <= synapse::kWeightMantissaMax,
            "initial_plastic_weight must lie in [-255, 255]");
}

synapse::StdpConfig NetworkParams::stdp() const
{
    synapse::StdpConfig cfg;
    cfg.lr = lr;
    cfg.a_plus = a_plus;
    cfg.a_minus = a_minus;
    cfg.tau_plus = tau;
    cfg.tau_minus = tau;
    cfg.trace_impulse = trace_impulse;
    return cfg;
}

std::string_view to_string(ClusterRole role)
{
    switch (role) {
    case ClusterRole::train: return "train";
    case ClusterRole::validation: return "validation";
    case ClusterRole::test: return "test";
    case ClusterRole::topic: return "topic";
    }
    return "?";
}

void NetworkSpec::validate() const
{
    if (clusters.empty()) throw std::invalid_argument("network has no clusters");
    for (const auto& c : clusters) {
        if (c.members.empty()) throw std::invalid_argument("cluster '" + c.name + "' is empty");
        if (c.labels.size() != c.members.size()) throw std::invalid_argument("cluster '" + c.name + "' label count mismatch");
        c.config.validate();
    }
    for (const auto& b : static_blocks) {
        if (b.pre >= clusters.size() || b.post >= clusters.size()) {
            throw std::invalid_argument("static block '" + b.name + "' references a missing cluster");
        }
        for (const auto& s : b.synapses) {
            if (s.pre >= clusters[b.pre].size() || s.post >= clusters[b.post].size()) {
                throw std::invalid_argument("static block '" + b.name + "' has a synapse outside its shape");
            }
        }
    }
    for (const auto& b : plastic_blocks) {
        if (b.pre >= clusters.size() || b.post >= clusters.size()) {
            throw std::invalid_argument("plastic block '" + b.name + "' references a missing cluster");
        }
        b.stdp.validate();
    }
}

std::size_t NetworkSpec::static_synapse_count() const
{
    std::size_t n = 0;
    for (const auto& b : static_blocks) n += b.synapses.size();
    return n;
}

bool NetworkSpec::has_cluster(ClusterRole role) const
{
    return std::any_of(clusters.begin(), clusters.end(), [&](const auto& c) { return c.role == role; });
}

std::size_t NetworkSpec::cluster_index(ClusterRole role) const
{
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (clusters[i].role == role) return i;
    }
    throw std::out_of_range("network has no " + std::string(to_string(role)) + " cluster");
}

NeuronRef NetworkSpec::locate_paper(std::uint32_t node) const
{
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        if (clusters[c].role == ClusterRole::topic) continue;
        const auto& m = clusters[c].members;
        const auto it = std::lower_bound(m.begin(), m.end(), node);
        if (it != m.end() && *it == node) return {c, static_cast<std::size_t>(it - m.begin())};
    }
    throw std::out_of_range("paper node " + std::to_string(node) + " is not in any cluster");
}

NetworkSpec compile(const CitationGraph& graph, const Split& split, const NetworkParams& params)
{
    params.validate();
    graph.validate();

    NetworkSpec net;
    net.params = params;
    net.topic_names = graph.topics;
    net.encoder_weight = params.paper_to_paper_w;
    net.paper_ids.reserve(graph.nodes.size());
    for (const auto& n : graph.nodes) net.paper_ids.push_back(n.id);

    neuron::LifLongResetConfig persistent;  // train and topic: leak off, refractory off
    persistent.vth = 1;
    persistent.refractory = 0;
    persistent.reset_interval = params.sim_steps;
    persistent.reset_length = params.reset_length;

    neuron::LifLongResetConfig single_shot = persistent;  // validation and test fire once per window
    single_shot.refractory = params.sim_steps + 1;

    // node index -> (cluster, local index)
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::pair<std::size_t, std::size_t>> where(graph.nodes.size(), {kNone, 0});

    auto add_papers = [&](ClusterRole role, const std::vector<std::uint32_t>& members,
                          const neuron::LifLongResetConfig& cfg) {
        if (members.empty()) return;
        ClusterSpec c;
        c.name = std::string(to_string(role));
        c.role = role;
        c.members = members;
        std::sort(c.members.begin(), c.members.end());
        c.config = cfg;
        for (std::size_t i = 0; i < c.members.size(); ++i) {
            const auto node = c.members[i];
            if (node >= graph.nodes.size()) throw std::invalid_argument("split references a node outside the graph");
            if (where[node].first != kNone) throw std::invalid_argument("split parts are not disjoint");
            where[node] = {net.clusters.size(), i};
            c.labels.push_back(graph.nodes[node].topic);
        }
        net.clusters.push_back(std::move(c));
    };
    add_papers(ClusterRole::train, split.train, persistent);
    add_papers(ClusterRole::validation, split.validation, single_shot);
    add_papers(ClusterRole::test, split.test, single_shot);
    for (std::size_t i = 0; i < where.size(); ++i) {
        if (where[i].first == kNone) throw std::invalid_argument("split does not cover node " + std::to_string(i));
    }

    ClusterSpec topic;
    topic.name = "topic";
    topic.role = ClusterRole::topic;
    topic.config = persistent;
    for (std::uint32_t k = 0; k < graph.topic_count(); ++k) {
        topic.members.push_back(k);
        topic.labels.push_back(k);
    }
    const std::size_t topic_cluster = net.clusters.size();
    net.clusters.push_back(std::move(topic));

    std::map<std::pair<std::size_t, std::size_t>, std::vector<synapse::Synapse>> blocks;
    auto connect = [&](std::pair<std::size_t, std::size_t> from, std::pair<std::size_t, std::size_t> to, std::int32_t w) {
        blocks[{from.first, to.first}].push_back(
            {static_cast<std::uint32_t>(from.second), static_cast<std::uint32_t>(to.second), w});
    };

    for (const auto& e : graph.edges) {
        if (e.citing == e.cited) continue;
        connect(where[e.citing], where[e.cited], params.paper_to_paper_w);
        connect(where[e.cited], where[e.citing], params.paper_to_paper_w);
    }
    for (const auto node : split.train) {
        const std::pair<std::size_t, std::size_t> topic_neuron{topic_cluster, graph.nodes[node].topic};
        connect(where[node], topic_neuron, params.train_to_topic_w);
        connect(topic_neuron, where[node], params.train_to_topic_w);
    }

    for (auto& [key, syns] : blocks) {
        StaticBlockSpec b;
        b.pre = key.first;
        b.post = key.second;
        b.name = net.clusters[b.pre].name + "->" + net.clusters[b.post].name;
        b.synapses = std::move(syns);
        b.delay = params.delay;
        net.static_blocks.push_back(std::move(b));
    }

    for (std::size_t c = 0; c < topic_cluster; ++c) {
        const auto role = net.clusters[c].role;
        if (role != ClusterRole::validation && role != ClusterRole::test) continue;
        for (auto [pre, post] : {std::pair{c, topic_cluster}, std::pair{topic_cluster, c}}) {
            PlasticBlockSpec b;
            b.pre = pre;
            b.post = post;
            b.name = net.clusters[pre].name + "->" + net.clusters[post].name;
            b.stdp = params.stdp();
            b.initial_weight = params.initial_plastic_weight;
            b.delay = params.delay;
            net.plastic_blocks.push_back(std::move(b));
        }
    }

    net.validate();
    return net;
}

} // namespace sgnn::graph
