// OpenMP kernels against their serial references, on Cora-sized shapes.
// Thread count is the benchmark argument; "ref" rows ignore it.

#include "sgnn/kernels.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <vector>

using namespace sgnn;

namespace {

constexpr std::size_t kNodes = 2708;
constexpr std::size_t kEdges = 5258;

struct Population {
    std::vector<std::int32_t> u, v, refrac, input;
    std::vector<std::uint8_t> spikes;
    explicit Population(std::size_t n) : u(n), v(n), refrac(n), input(n), spikes(n)
    {
        std::mt19937 g(1);
        std::uniform_int_distribution<std::int32_t> d(-500, 3000);
        for (auto& x : input) x = d(g);
    }
};

kernels::LifParams lif_params()
{
    return {fxp::tau_to_decay(30), fxp::tau_to_decay(30), 1000, 20, 0};
}

std::vector<std::uint8_t> spikes(std::size_t n, double rate, unsigned seed)
{
    std::mt19937 g(seed);
    std::bernoulli_distribution b(rate);
    std::vector<std::uint8_t> s(n);
    for (auto& x : s) x = b(g);
    return s;
}

// Symmetric citation adjacency in both compressed layouts.
struct Sparse {
    std::vector<std::uint32_t> row_ptr, col, col_ptr, row;
    std::vector<std::int16_t> val_r, val_c;
    Sparse()
    {
        std::mt19937 g(7);
        std::uniform_int_distribution<std::uint32_t> node(0, kNodes - 1);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
        while (e.size() < 2 * kEdges) {
            const auto a = node(g), b = node(g);
            if (a == b) continue;
            e.emplace_back(a, b);
            e.emplace_back(b, a);
        }
        auto build = [&](auto key, std::vector<std::uint32_t>& ptr, std::vector<std::uint32_t>& idx,
                         std::vector<std::int16_t>& val) {
            std::sort(e.begin(), e.end(), [&](auto x, auto y) { return key(x) < key(y); });
            ptr.assign(kNodes + 1, 0);
            for (const auto& p : e) {
                ++ptr[key(p).first + 1];
                idx.push_back(key(p).second);
                val.push_back(125);
            }
            for (std::size_t i = 0; i < kNodes; ++i) ptr[i + 1] += ptr[i];
        };
        build([](auto p) { return p; }, row_ptr, col, val_r);
        build([](auto p) { return std::make_pair(p.second, p.first); }, col_ptr, row, val_c);
    }
};

const Sparse& sparse()
{
    static const Sparse s;
    return s;
}

void BM_lif(benchmark::State& st)
{
    Population p(kNodes);
    const auto c = lif_params();
    for (auto _ : st) {
        benchmark::DoNotOptimize(kernels::lif_step(p.u, p.v, p.refrac, p.input, c, p.spikes, int(st.range(0))));
    }
    st.SetItemsProcessed(st.iterations() * kNodes);
}

void BM_lif_ref(benchmark::State& st)
{
    Population p(kNodes);
    const auto c = lif_params();
    for (auto _ : st) benchmark::DoNotOptimize(kernels::ref::lif_step(p.u, p.v, p.refrac, p.input, c, p.spikes));
    st.SetItemsProcessed(st.iterations() * kNodes);
}

// train -> topic style block, scaled up to the test set (2428 x 7).
constexpr std::size_t kPre = 2428, kPost = 7;

void BM_dense(benchmark::State& st)
{
    std::vector<std::int32_t> w(kPre * kPost, 100);
    const auto s = spikes(kPre, 0.2, 3);
    std::vector<std::int64_t> out(kPost);
    for (auto _ : st) {
        kernels::dense_accumulate(w, kPre, kPost, 3, s, out, int(st.range(0)));
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_dense_ref(benchmark::State& st)
{
    std::vector<std::int32_t> w(kPre * kPost, 100);
    const auto s = spikes(kPre, 0.2, 3);
    std::vector<std::int64_t> out(kPost);
    for (auto _ : st) {
        kernels::ref::dense_accumulate(w, kPre, kPost, 3, s, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_csr_scatter(benchmark::State& st)
{
    const auto& a = sparse();
    const auto s = spikes(kNodes, st.range(0) / 100.0, 4);
    std::vector<std::int64_t> out(kNodes);
    for (auto _ : st) {
        kernels::csr_scatter(a.row_ptr, a.col, a.val_r, 3, s, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_csc_gather(benchmark::State& st)
{
    const auto& a = sparse();
    const auto s = spikes(kNodes, st.range(0) / 100.0, 4);
    std::vector<std::int64_t> out(kNodes);
    for (auto _ : st) {
        kernels::csc_gather(a.col_ptr, a.row, a.val_c, 3, s, out, int(st.range(1)));
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_stdp(benchmark::State& st)
{
    std::vector<std::int32_t> w(kPre * kPost, 0), x(kPre, 12), y(kPost, 9);
    const auto pre = spikes(kPre, 0.1, 5), post = spikes(kPost, 0.5, 6);
    for (auto _ : st) {
        kernels::stdp_apply(w, kPre, kPost, x, y, pre, post, 2, -2, -255, 255, int(st.range(0)));
        benchmark::DoNotOptimize(w.data());
    }
}

void BM_stdp_ref(benchmark::State& st)
{
    std::vector<std::int32_t> w(kPre * kPost, 0), x(kPre, 12), y(kPost, 9);
    const auto pre = spikes(kPre, 0.1, 5), post = spikes(kPost, 0.5, 6);
    for (auto _ : st) {
        kernels::ref::stdp_apply(w, kPre, kPost, x, y, pre, post, 2, -2, -255, 255);
        benchmark::DoNotOptimize(w.data());
    }
}

} // namespace

BENCHMARK(BM_lif)->Arg(1)->Arg(2)->Arg(4);
BENCHMARK(BM_lif_ref);
BENCHMARK(BM_dense)->Arg(1)->Arg(2)->Arg(4);
BENCHMARK(BM_dense_ref);
BENCHMARK(BM_csr_scatter)->Arg(1)->Arg(10)->Arg(50);  // spike rate, percent
BENCHMARK(BM_csc_gather)->ArgsProduct({{1, 10, 50}, {1, 4}});
BENCHMARK(BM_stdp)->Arg(1)->Arg(2)->Arg(4);
BENCHMARK(BM_stdp_ref);

BENCHMARK_MAIN();
