#include "sgnn/kernels.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace sgnn;

namespace {

std::vector<std::int32_t> random_ints(std::size_t n, std::int32_t lo, std::int32_t hi, std::mt19937& g)
{
    std::uniform_int_distribution<std::int32_t> d(lo, hi);
    std::vector<std::int32_t> v(n);
    for (auto& x : v) x = d(g);
    return v;
}

std::vector<std::uint8_t> random_spikes(std::size_t n, double p, std::mt19937& g)
{
    std::bernoulli_distribution d(p);
    std::vector<std::uint8_t> v(n);
    for (auto& x : v) x = d(g) ? 1 : 0;
    return v;
}

} // namespace

class KernelThreads : public ::testing::TestWithParam<int> {};

TEST_P(KernelThreads, LifMatchesReference)
{
    std::mt19937 g(11);
    const std::size_t n = 3 * kernels::kParallelGrain + 17;
    kernels::LifParams p{fxp::Q12Decay(300), fxp::Q12Decay(40), 500, 3, -2};
    auto u1 = random_ints(n, -9000000, 9000000, g), v1 = random_ints(n, -5000, 5000, g);
    auto r1 = random_ints(n, 0, 3, g);
    auto u2 = u1, v2 = v1, r2 = r1;
    for (int step = 0; step < 20; ++step) {
        const auto in = random_ints(n, -800, 1200, g);
        std::vector<std::uint8_t> s1(n), s2(n);
        const auto sat1 = kernels::lif_step(u1, v1, r1, in, p, s1, GetParam());
        const auto sat2 = kernels::ref::lif_step(u2, v2, r2, in, p, s2);
        ASSERT_EQ(sat1, sat2);
        ASSERT_EQ(s1, s2);
        ASSERT_EQ(u1, u2);
        ASSERT_EQ(v1, v2);
        ASSERT_EQ(r1, r2);
    }
}

TEST_P(KernelThreads, TraceDecayMatchesReference)
{
    std::mt19937 g(12);
    auto a = random_ints(2 * kernels::kParallelGrain + 5, 0, 127, g);
    auto b = a;
    for (int s = 0; s < 40; ++s) {
        kernels::trace_decay(a, fxp::Q12Decay(134), GetParam());
        kernels::ref::trace_decay(b, fxp::Q12Decay(134));
        ASSERT_EQ(a, b);
    }
}

TEST_P(KernelThreads, DenseAccumulateMatchesReference)
{
    std::mt19937 g(13);
    const std::size_t pre = 300, post = 170;
    const auto w = random_ints(pre * post, -255, 255, g);
    for (int rep = 0; rep < 5; ++rep) {
        const auto spikes = random_spikes(pre, 0.2, g);
        std::vector<std::int64_t> a(post, 3), b(post, 3);
        kernels::dense_accumulate(w, pre, post, rep % 3, spikes, a, GetParam());
        kernels::ref::dense_accumulate(w, pre, post, rep % 3, spikes, b);
        ASSERT_EQ(a, b);
    }
}

TEST_P(KernelThreads, SparseScatterAndGatherAgree)
{
    std::mt19937 g(14);
    const std::size_t pre = 500, post = 400;
    std::vector<std::vector<std::pair<std::uint32_t, std::int16_t>>> rows(pre);
    std::vector<std::vector<std::pair<std::uint32_t, std::int16_t>>> cols(post);
    std::uniform_int_distribution<std::uint32_t> pick_pre(0, pre - 1), pick_post(0, post - 1);
    std::uniform_int_distribution<int> val(-255, 255);
    for (int k = 0; k < 5000; ++k) {
        const auto i = pick_pre(g), j = pick_post(g);
        const auto v = static_cast<std::int16_t>(val(g));
        rows[i].push_back({j, v});
        cols[j].push_back({i, v});
    }
    std::vector<std::uint32_t> row_ptr{0}, col, col_ptr{0}, row;
    std::vector<std::int16_t> rval, cval;
    for (const auto& r : rows) {
        for (auto [j, v] : r) col.push_back(j), rval.push_back(v);
        row_ptr.push_back(static_cast<std::uint32_t>(col.size()));
    }
    for (const auto& c : cols) {
        for (auto [i, v] : c) row.push_back(i), cval.push_back(v);
        col_ptr.push_back(static_cast<std::uint32_t>(row.size()));
    }
    const auto spikes = random_spikes(pre, 0.3, g);
    std::vector<std::int64_t> a(post, 0), b(post, 0), expect(post, 0);
    kernels::csr_scatter(row_ptr, col, rval, 2, spikes, a);
    kernels::csc_gather(col_ptr, row, cval, 2, spikes, b, GetParam());
    for (std::size_t i = 0; i < pre; ++i) {
        if (!spikes[i]) continue;
        for (auto [j, v] : rows[i]) expect[j] += std::int64_t{v} * 4;
    }
    EXPECT_EQ(a, expect);
    EXPECT_EQ(b, expect);
}

TEST_P(KernelThreads, StdpMatchesReference)
{
    std::mt19937 g(15);
    const std::size_t pre = 2428, post = 7;
    auto w1 = random_ints(pre * post, -255, 255, g);
    auto w2 = w1;
    for (int s = 0; s < 10; ++s) {
        const auto x = random_ints(pre, 0, 127, g), y = random_ints(post, 0, 127, g);
        const auto ps = random_spikes(pre, 0.1, g), qs = random_spikes(post, 0.4, g);
        kernels::stdp_apply(w1, pre, post, x, y, ps, qs, 2, -2, -255, 255, GetParam());
        kernels::ref::stdp_apply(w2, pre, post, x, y, ps, qs, 2, -2, -255, 255);
        ASSERT_EQ(w1, w2);
    }
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelThreads, ::testing::Values(1, 2, 4));

TEST(Kernels, TraceImpulseCaps)
{
    std::vector<std::int32_t> t{0, 120, 5};
    const std::vector<std::uint8_t> s{1, 1, 0};
    kernels::trace_impulse(t, s, 16, 127);
    EXPECT_EQ(t, (std::vector<std::int32_t>{16, 127, 5}));
}
