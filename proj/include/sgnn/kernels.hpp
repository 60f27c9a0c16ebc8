#pragma once

// Data-parallel inner loops of the simulator.
//
// Every kernel exists twice: the OpenMP version used by the runtime, and a
// serial reference in sgnn::kernels::ref that is kept deliberately naive. The
// unit tests require both to agree bit-for-bit and the benchmark compares
// their throughput. `threads <= 1` runs the OpenMP version serially.

#include "sgnn/fxp.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace sgnn::kernels {

struct LifParams {
    fxp::Q12Decay du;
    fxp::Q12Decay dv;
    std::int32_t vth = 1;
    std::int32_t refractory = 0;
    std::int32_t bias = 0;
};

// Below this many elements the OpenMP kernels stay on the calling thread.
inline constexpr std::size_t kParallelGrain = 4096;

/// One LIF update over a population. Writes spikes and returns the number of
/// 24-bit saturation events.
std::uint64_t lif_step(std::span<std::int32_t> u, std::span<std::int32_t> v,
                       std::span<std::int32_t> refrac, std::span<const std::int32_t> input,
                       const LifParams& p, std::span<std::uint8_t> spikes, int threads);

/// x <- decay_mul(x, d) elementwise.
void trace_decay(std::span<std::int32_t> trace, fxp::Q12Decay d, int threads);

/// x[i] <- min(x[i] + impulse, cap) where spikes[i].
void trace_impulse(std::span<std::int32_t> trace, std::span<const std::uint8_t> spikes,
                   std::int32_t impulse, std::int32_t cap);

/// out[j] += sum_i spikes[i] * (w[i*post + j] << exponent), row-major pre x post.
void dense_accumulate(std::span<const std::int32_t> w, std::size_t pre, std::size_t post,
                      int exponent, std::span<const std::uint8_t> spikes,
                      std::span<std::int64_t> out, int threads);

/// Compressed-row scatter: for each spiking pre i, out[col[k]] += val[k] << exponent.
void csr_scatter(std::span<const std::uint32_t> row_ptr, std::span<const std::uint32_t> col,
                 std::span<const std::int16_t> val, int exponent,
                 std::span<const std::uint8_t> spikes, std::span<std::int64_t> out);

/// Compressed-column gather: out[j] += sum over in-synapses k of j with spiking
/// source row[k]. Same result as csr_scatter on the transposed layout.
void csc_gather(std::span<const std::uint32_t> col_ptr, std::span<const std::uint32_t> row,
                std::span<const std::int16_t> val, int exponent,
                std::span<const std::uint8_t> spikes, std::span<std::int64_t> out, int threads);

/// Pairwise trace STDP on a dense row-major pre x post matrix:
/// dw = post_spike[j] * potentiation * x[i] + pre_spike[i] * depression * y[j],
/// then w clamped to [w_min, w_max].
void stdp_apply(std::span<std::int32_t> w, std::size_t pre, std::size_t post,
                std::span<const std::int32_t> x, std::span<const std::int32_t> y,
                std::span<const std::uint8_t> pre_spikes, std::span<const std::uint8_t> post_spikes,
                std::int32_t potentiation, std::int32_t depression,
                std::int32_t w_min, std::int32_t w_max, int threads);

namespace ref {

std::uint64_t lif_step(std::span<std::int32_t> u, std::span<std::int32_t> v,
                       std::span<std::int32_t> refrac, std::span<const std::int32_t> input,
                       const LifParams& p, std::span<std::uint8_t> spikes);

void trace_decay(std::span<std::int32_t> trace, fxp::Q12Decay d);

void dense_accumulate(std::span<const std::int32_t> w, std::size_t pre, std::size_t post,
                      int exponent, std::span<const std::uint8_t> spikes,
                      std::span<std::int64_t> out);

void stdp_apply(std::span<std::int32_t> w, std::size_t pre, std::size_t post,
                std::span<const std::int32_t> x, std::span<const std::int32_t> y,
                std::span<const std::uint8_t> pre_spikes, std::span<const std::uint8_t> post_spikes,
                std::int32_t potentiation, std::int32_t depression,
                std::int32_t w_min, std::int32_t w_max);

} // namespace ref

} // namespace sgnn::kernels
