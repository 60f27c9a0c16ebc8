#include "sgnn/kernels.hpp"

#include <algorithm>

namespace sgnn::kernels {

namespace {

bool go_parallel(std::size_t n, int threads)
{
    return threads > 1 && n >= kParallelGrain;
}

inline std::int64_t shifted(std::int64_t w, int exponent)
{
    return w * (std::int64_t{1} << exponent);
}

} // namespace

std::uint64_t lif_step(std::span<std::int32_t> u, std::span<std::int32_t> v,
                       std::span<std::int32_t> refrac, std::span<const std::int32_t> input,
                       const LifParams& p, std::span<std::uint8_t> spikes, int threads)
{
    const auto n = static_cast<std::ptrdiff_t>(u.size());
    std::uint64_t saturated = 0;

#pragma omp parallel for num_threads(threads) if (go_parallel(u.size(), threads)) reduction(+ : saturated) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        fxp::SaturationCounter local;
        const std::int64_t cur = std::int64_t{fxp::decay_mul(u[i], p.du)} + input[i];
        u[i] = fxp::saturate(cur, &local);

        std::uint8_t fired = 0;
        if (refrac[i] > 0) {
            --refrac[i];
            v[i] = 0;
        } else {
            const std::int64_t volt = std::int64_t{fxp::decay_mul(v[i], p.dv)} + u[i] + p.bias;
            v[i] = fxp::saturate(volt, &local);
            if (v[i] >= p.vth) {
                fired = 1;
                v[i] = 0;
                refrac[i] = p.refractory;
            }
        }
        spikes[i] = fired;
        saturated += local.events();
    }
    return saturated;
}

void trace_decay(std::span<std::int32_t> trace, fxp::Q12Decay d, int threads)
{
    if (d.raw() == 0) return;
    const auto n = static_cast<std::ptrdiff_t>(trace.size());
#pragma omp parallel for num_threads(threads) if (go_parallel(trace.size(), threads)) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (trace[i] != 0) trace[i] = fxp::decay_mul(trace[i], d);
    }
}

void trace_impulse(std::span<std::int32_t> trace, std::span<const std::uint8_t> spikes,
                   std::int32_t impulse, std::int32_t cap)
{
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (spikes[i]) trace[i] = std::min(trace[i] + impulse, cap);
    }
}

void dense_accumulate(std::span<const std::int32_t> w, std::size_t pre, std::size_t post,
                      int exponent, std::span<const std::uint8_t> spikes,
                      std::span<std::int64_t> out, int threads)
{
    const auto cols = static_cast<std::ptrdiff_t>(post);
    const bool par = go_parallel(pre * post, threads) && post >= 64;
    if (!par) {
        for (std::size_t i = 0; i < pre; ++i) {
            if (!spikes[i]) continue;
            const auto* row = w.data() + i * post;
            for (std::size_t j = 0; j < post; ++j) out[j] += shifted(row[j], exponent);
        }
        return;
    }
    // Columns split across threads so each owns a disjoint slice of `out`.
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < pre; ++i) {
            if (spikes[i]) acc += w[i * post + static_cast<std::size_t>(j)];
        }
        out[j] += shifted(acc, exponent);
    }
}

void csr_scatter(std::span<const std::uint32_t> row_ptr, std::span<const std::uint32_t> col,
                 std::span<const std::int16_t> val, int exponent,
                 std::span<const std::uint8_t> spikes, std::span<std::int64_t> out)
{
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        if (!spikes[i]) continue;
        for (std::uint32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            out[col[k]] += shifted(val[k], exponent);
        }
    }
}

void csc_gather(std::span<const std::uint32_t> col_ptr, std::span<const std::uint32_t> row,
                std::span<const std::int16_t> val, int exponent,
                std::span<const std::uint8_t> spikes, std::span<std::int64_t> out, int threads)
{
    const auto cols = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for num_threads(threads) if (go_parallel(row.size(), threads)) schedule(static)
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
        std::int64_t acc = 0;
        for (std::uint32_t k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
            if (spikes[row[k]]) acc += val[k];
        }
        out[j] += shifted(acc, exponent);
    }
}

void stdp_apply(std::span<std::int32_t> w, std::size_t pre, std::size_t post,
                std::span<const std::int32_t> x, std::span<const std::int32_t> y,
                std::span<const std::uint8_t> pre_spikes, std::span<const std::uint8_t> post_spikes,
                std::int32_t potentiation, std::int32_t depression,
                std::int32_t w_min, std::int32_t w_max, int threads)
{
    const bool any_post = std::any_of(post_spikes.begin(), post_spikes.end(), [](auto s) { return s != 0; });
    const auto rows = static_cast<std::ptrdiff_t>(pre);

#pragma omp parallel for num_threads(threads) if (go_parallel(pre * post, threads)) schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const bool pre_fired = pre_spikes[i] != 0;
        const bool potentiates = any_post && x[i] != 0;
        if (!pre_fired && !potentiates) continue;

        std::int32_t* row = w.data() + static_cast<std::size_t>(i) * post;
        const std::int64_t pot = std::int64_t{potentiation} * x[i];
        for (std::size_t j = 0; j < post; ++j) {
            std::int64_t dw = 0;
            if (post_spikes[j]) dw += pot;
            if (pre_fired) dw += std::int64_t{depression} * y[j];
            if (dw == 0) continue;
            row[j] = static_cast<std::int32_t>(std::clamp<std::int64_t>(row[j] + dw, w_min, w_max));
        }
    }
}

namespace ref {

std::uint64_t lif_step(std::span<std::int32_t> u, std::span<std::int32_t> v,
                       std::span<std::int32_t> refrac, std::span<const std::int32_t> input,
                       const LifParams& p, std::span<std::uint8_t> spikes)
{
    fxp::SaturationCounter sat;
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = fxp::saturate(std::int64_t{fxp::decay_mul(u[i], p.du)} + input[i], &sat);
        spikes[i] = 0;
        if (refrac[i] > 0) {
            refrac[i] -= 1;
            v[i] = 0;
            continue;
        }
        v[i] = fxp::saturate(std::int64_t{fxp::decay_mul(v[i], p.dv)} + u[i] + p.bias, &sat);
        if (v[i] >= p.vth) {
            spikes[i] = 1;
            v[i] = 0;
            refrac[i] = p.refractory;
        }
    }
    return sat.events();
}

void trace_decay(std::span<std::int32_t> trace, fxp::Q12Decay d)
{
    for (auto& x : trace) x = fxp::decay_mul(x, d);
}

void dense_accumulate(std::span<const std::int32_t> w, std::size_t pre, std::size_t post,
                      int exponent, std::span<const std::uint8_t> spikes,
                      std::span<std::int64_t> out)
{
    for (std::size_t i = 0; i < pre; ++i) {
        if (!spikes[i]) continue;
        for (std::size_t j = 0; j < post; ++j) out[j] += shifted(w[i * post + j], exponent);
    }
}

void stdp_apply(std::span<std::int32_t> w, std::size_t pre, std::size_t post,
                std::span<const std::int32_t> x, std::span<const std::int32_t> y,
                std::span<const std::uint8_t> pre_spikes, std::span<const std::uint8_t> post_spikes,
                std::int32_t potentiation, std::int32_t depression,
                std::int32_t w_min, std::int32_t w_max)
{
    for (std::size_t i = 0; i < pre; ++i) {
        for (std::size_t j = 0; j < post; ++j) {
            std::int64_t dw = 0;
            if (post_spikes[j]) dw += std::int64_t{potentiation} * x[i];
            if (pre_spikes[i]) dw += std::int64_t{depression} * y[j];
            const std::int64_t next = w[i * post + j] + dw;
            w[i * post + j] = static_cast<std::int32_t>(std::clamp<std::int64_t>(next, w_min, w_max));
        }
    }
}

} // namespace ref

} // namespace sgnn::kernels
