#include "sgnn/eval.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace sgnn;
using namespace sgnn::eval;

namespace {

graph::CitationGraph toy()
{
    const std::string dir = SGNN_SOURCE_DIR "/data/toy/";
    return graph::load_graph(dir + "toy.content", dir + "toy.cites");
}

runtime::ProcessGraph toy_network(const graph::NetworkParams& p = {})
{
    const auto g = toy();
    return runtime::build(graph::compile(g, graph::make_split(g, 0, {2, 6}), p));
}

} // namespace

TEST(Eval, DecodeLabel)
{
    const std::vector<std::int32_t> a{0, 0, -26, 0, 0, 0, 0};
    EXPECT_EQ(decode_label(a), (Decoded{2, false}));
    const std::vector<std::int32_t> z(7, 0);
    EXPECT_EQ(decode_label(z), (Decoded{0, true}));
    const std::vector<std::int32_t> t{-10, -26, -26, 0, 0, 0, 0};
    EXPECT_EQ(decode_label(t), (Decoded{1, true}));
    EXPECT_THROW(decode_label(std::span<const std::int32_t>{}), std::invalid_argument);
}

TEST(Eval, DecodeMatchesScan)
{
    std::mt19937 g(9);
    std::uniform_int_distribution<std::int32_t> w(-5, 5);
    for (int k = 0; k < 5000; ++k) {
        std::vector<std::int32_t> row(7);
        for (auto& x : row) x = w(g);
        std::size_t best = 0;
        int count = 0;
        for (std::size_t i = 0; i < 7; ++i) {
            if (row[i] < row[best]) best = i;
        }
        for (auto x : row) count += x == row[best];
        const auto d = decode_label(row);
        ASSERT_EQ(d.topic, best);
        ASSERT_EQ(d.tie, count > 1);
    }
}

TEST(Eval, CitedTrainPaperDecidesLabel)
{
    // P (validation) cites a train paper of topic Y; topic X has an isolated
    // train paper.
    auto g = graph::parse_content("tx 0 X\nty 0 Y\nP 0 X\n");
    g.edges = {{2, 1}};
    graph::Split s;
    s.train = {0, 1};
    s.validation = {2};
    auto net = runtime::build(graph::compile(g, s, {}));
    const auto r = evaluate_paper(net, {"validation", 0});
    EXPECT_EQ(r.predicted, 1u);
    EXPECT_FALSE(r.tie);
    EXPECT_EQ(r.weights[0], 0);
    EXPECT_LT(r.weights[1], 0);
    EXPECT_EQ(r.truth, 0u);
    EXPECT_FALSE(r.correct());
}

TEST(Eval, IsolatedPaperTies)
{
    auto g = graph::parse_content("tx 0 X\nty 0 Y\nP 0 Y\n");
    g.edges = {{0, 1}};
    graph::Split s;
    s.train = {0, 1};
    s.validation = {2};
    auto net = runtime::build(graph::compile(g, s, {}));
    const auto r = evaluate_paper(net, {"validation", 0});
    EXPECT_EQ(r.weights, (std::vector<std::int32_t>{0, 0}));
    EXPECT_EQ(r.predicted, 0u);
    EXPECT_TRUE(r.tie);
}

TEST(Eval, RepeatAndQuiescenceGuard)
{
    auto net = toy_network();
    const auto a = evaluate_paper(net, {"validation", 2});
    const auto b = evaluate_paper(net, {"validation", 2});
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.steps, 20 + 7);

    net.set_injection(runtime::SpikeEncoderConfig{"validation", 0, 0});
    net.run_window(3);
    EXPECT_THROW(evaluate_paper(net, {"validation", 1}), std::logic_error);
}

TEST(Eval, ResetIsolationOnToyPairs)
{
    std::mt19937 g(77);
    auto shared = toy_network();
    std::vector<PaperRef> papers = papers_of(shared, "validation");
    const auto test = papers_of(shared, "test");
    papers.insert(papers.end(), test.begin(), test.end());
    for (int k = 0; k < 20; ++k) {
        const auto& a = papers[g() % papers.size()];
        const auto& b = papers[g() % papers.size()];
        const auto ra = evaluate_paper(shared, a);
        const auto rb = evaluate_paper(shared, b);
        auto fresh_a = toy_network();
        auto fresh_b = toy_network();
        EXPECT_EQ(ra, evaluate_paper(fresh_a, a));
        EXPECT_EQ(rb, evaluate_paper(fresh_b, b));
    }
}

TEST(Eval, OrderInvarianceAndWorkers)
{
    synthetic::PlantedOptions o;
    o.topic_sizes = {80, 60, 50};
    o.edges = 500;
    const auto g = synthetic::planted(o);
    auto net = runtime::build(graph::compile(g, graph::make_split(g, 3, {10, 40}), {}));
    auto papers = papers_of(net, "validation");
    const auto base = evaluate_set(net, papers, "validation");
    EXPECT_EQ(base.evaluated, 40u);
    EXPECT_EQ(base.total_steps, 40u * (20 + 7));
    ASSERT_TRUE(base.accuracy.has_value());
    EXPECT_DOUBLE_EQ(*base.accuracy, static_cast<double>(base.correct) / 40.0);

    std::vector<std::uint32_t> truth_counts(3, 0);
    for (const auto& p : base.papers) ++truth_counts[p.truth];
    for (std::size_t t = 0; t < 3; ++t) {
        std::uint32_t row = 0;
        for (auto c : base.confusion[t]) row += c;
        EXPECT_EQ(row, truth_counts[t]);
    }

    std::mt19937 rng(1);
    std::shuffle(papers.begin(), papers.end(), rng);
    const auto shuffled = evaluate_set(net, papers, "validation");
    EXPECT_EQ(shuffled.correct, base.correct);
    EXPECT_EQ(shuffled.confusion, base.confusion);

    const auto parallel = evaluate_set(net, papers_of(net, "validation"), "validation", {4});
    EXPECT_EQ(parallel.papers, base.papers);
    EXPECT_EQ(parallel.confusion, base.confusion);
}

TEST(Eval, EmptySetHasNoAccuracy)
{
    auto net = toy_network();
    const auto r = evaluate_set(net, {}, "validation");
    EXPECT_EQ(r.evaluated, 0u);
    EXPECT_FALSE(r.accuracy.has_value());
}
