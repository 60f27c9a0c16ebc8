#include "sgnn/synapse.hpp"

#include "sgnn/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace sgnn::synapse {

WeightEncoding encode_weight(std::int32_t w)
{
    for (int e = 0; e <= kWeightExponentMax; ++e) {
        const std::int32_t unit = std::int32_t{1} << e;
        if (w % unit != 0) break;
        const std::int32_t m = w / unit;
        if (std::abs(m) <= kWeightMantissaMax) return {m, e};
    }
    throw std::invalid_argument("weight " + std::to_string(w) +
                                " has no exact 8-bit mantissa / exponent encoding");
}

// ---------------------------------------------------------------- DelayLine

DelayLine::DelayLine(std::size_t width, int delay) : delay_(delay)
{
    if (delay < 0) throw std::invalid_argument("synaptic delay must be >= 0");
    ring_.assign(static_cast<std::size_t>(delay) + 1, SpikeVector(width, 0));
}

const SpikeVector& DelayLine::push(std::span<const std::uint8_t> spikes)
{
    std::copy(spikes.begin(), spikes.end(), ring_[head_].begin());
    const std::size_t out = (head_ + 1) % ring_.size();
    head_ = out;
    return ring_[out];
}

void DelayLine::clear()
{
    for (auto& slot : ring_) std::fill(slot.begin(), slot.end(), 0);
    head_ = 0;
}

bool DelayLine::empty() const
{
    return std::all_of(ring_.begin(), ring_.end(), [](const SpikeVector& s) {
        return std::all_of(s.begin(), s.end(), [](auto b) { return b == 0; });
    });
}

// ------------------------------------------------------------ StaticSynapse

StaticSynapse::StaticSynapse(std::size_t pre_size, std::size_t post_size,
                             std::span<const Synapse> synapses, int delay)
    : pre_size_(pre_size), post_size_(post_size), delay_(pre_size, delay)
{
    if (pre_size == 0 || post_size == 0) throw std::invalid_argument("synapse block needs non-empty populations");

    int exponent = 0;
    for (const auto& s : synapses) {
        if (s.pre >= pre_size || s.post >= post_size) {
            throw std::out_of_range("synapse (" + std::to_string(s.pre) + ", " + std::to_string(s.post) +
                                    ") outside block shape " + std::to_string(pre_size) + "x" +
                                    std::to_string(post_size));
        }
        exponent = std::max(exponent, encode_weight(s.weight).exponent);
    }
    for (const auto& s : synapses) {
        const std::int32_t unit = std::int32_t{1} << exponent;
        if (s.weight % unit != 0 || std::abs(s.weight / unit) > kWeightMantissaMax) {
            throw std::invalid_argument("weights in one static block must share an exponent");
        }
    }
    exponent_ = exponent;

    row_ptr_.assign(pre_size + 1, 0);
    col_ptr_.assign(post_size + 1, 0);
    for (const auto& s : synapses) {
        ++row_ptr_[s.pre + 1];
        ++col_ptr_[s.post + 1];
    }
    for (std::size_t i = 0; i < pre_size; ++i) row_ptr_[i + 1] += row_ptr_[i];
    for (std::size_t j = 0; j < post_size; ++j) col_ptr_[j + 1] += col_ptr_[j];

    col_.resize(synapses.size());
    row_val_.resize(synapses.size());
    row_.resize(synapses.size());
    col_val_.resize(synapses.size());
    auto rfill = std::vector<std::uint32_t>(row_ptr_.begin(), row_ptr_.end() - 1);
    auto cfill = std::vector<std::uint32_t>(col_ptr_.begin(), col_ptr_.end() - 1);
    for (const auto& s : synapses) {
        const auto m = static_cast<std::int16_t>(s.weight >> exponent_);
        const auto r = rfill[s.pre]++;
        col_[r] = s.post;
        row_val_[r] = m;
        const auto c = cfill[s.post]++;
        row_[c] = s.pre;
        col_val_[c] = m;
    }
}

void StaticSynapse::forward(std::span<const std::uint8_t> pre_spikes, std::span<std::int64_t> out, int threads)
{
    if (pre_spikes.size() != pre_size_) {
        throw std::invalid_argument("spike vector length " + std::to_string(pre_spikes.size()) +
                                    " does not match pre population " + std::to_string(pre_size_));
    }
    if (out.size() != post_size_) throw std::invalid_argument("output length does not match post population");
    const SpikeVector& arrived = delay_.push(pre_spikes);
    if (threads > 1) {
        kernels::csc_gather(col_ptr_, row_, col_val_, exponent_, arrived, out, threads);
    } else {
        kernels::csr_scatter(row_ptr_, col_, row_val_, exponent_, arrived, out);
    }
}

CurrentVector StaticSynapse::forward(std::span<const std::uint8_t> pre_spikes)
{
    std::vector<std::int64_t> acc(post_size_, 0);
    forward(pre_spikes, acc);
    CurrentVector out(post_size_);
    std::transform(acc.begin(), acc.end(), out.begin(), [](auto a) { return fxp::saturate(a); });
    return out;
}

std::vector<Synapse> StaticSynapse::synapses() const
{
    std::vector<Synapse> out;
    out.reserve(col_.size());
    for (std::size_t i = 0; i < pre_size_; ++i) {
        for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            out.push_back({static_cast<std::uint32_t>(i), col_[k], std::int32_t{row_val_[k]} << exponent_});
        }
    }
    return out;
}

// --------------------------------------------------------------------- STDP

void StdpConfig::validate() const
{
    if (lr < 1) throw std::invalid_argument("STDP learning rate must be >= 1");
    if (tau_plus < 1 || tau_minus < 1) throw std::invalid_argument("STDP time constants must be >= 1");
    if (trace_impulse < 1) throw std::invalid_argument("trace impulse must be >= 1");
    if (!(w_min <= 0 && 0 <= w_max)) throw std::invalid_argument("STDP bounds must satisfy w_min <= 0 <= w_max");
    if (w_min < -kWeightMantissaMax || w_max > kWeightMantissaMax) {
        throw std::invalid_argument("STDP bounds exceed the 9-bit signed weight range");
    }
}

bool TraceState::is_zero() const
{
    auto zero = [](const std::vector<std::int32_t>& v) {
        return std::all_of(v.begin(), v.end(), [](auto a) { return a == 0; });
    };
    return zero(x) && zero(y);
}

void TraceState::clear()
{
    std::fill(x.begin(), x.end(), 0);
    std::fill(y.begin(), y.end(), 0);
}

void update_traces(TraceState& traces, std::span<const std::uint8_t> pre_spikes,
                   std::span<const std::uint8_t> post_spikes, const StdpConfig& cfg)
{
    if (pre_spikes.size() != traces.x.size() || post_spikes.size() != traces.y.size()) {
        throw std::invalid_argument("spike vectors do not match trace shapes");
    }
    kernels::trace_decay(traces.x, fxp::tau_to_decay(cfg.tau_plus), 1);
    kernels::trace_decay(traces.y, fxp::tau_to_decay(cfg.tau_minus), 1);
    kernels::trace_impulse(traces.x, pre_spikes, cfg.trace_impulse, kTraceCap);
    kernels::trace_impulse(traces.y, post_spikes, cfg.trace_impulse, kTraceCap);
}

// ----------------------------------------------------------- PlasticSynapse

PlasticSynapse::PlasticSynapse(std::size_t pre_size, std::size_t post_size, std::int32_t initial_weight,
                               const StdpConfig& cfg, int delay)
    : pre_size_(pre_size), post_size_(post_size), initial_weight_(initial_weight), cfg_(cfg),
      delay_(pre_size, delay)
{
    if (pre_size == 0 || post_size == 0) throw std::invalid_argument("synapse block needs non-empty populations");
    cfg_.validate();
    if (initial_weight < cfg_.w_min || initial_weight > cfg_.w_max) {
        throw std::invalid_argument("initial plastic weight outside STDP bounds");
    }
    decay_x_ = fxp::tau_to_decay(cfg_.tau_plus);
    decay_y_ = fxp::tau_to_decay(cfg_.tau_minus);
    w_.assign(pre_size * post_size, initial_weight);
    traces_.x.assign(pre_size, 0);
    traces_.y.assign(post_size, 0);
}

std::vector<std::int32_t> PlasticSynapse::column(std::size_t post) const
{
    if (post >= post_size_) throw std::out_of_range("plastic column index out of range");
    std::vector<std::int32_t> out(pre_size_);
    for (std::size_t i = 0; i < pre_size_; ++i) out[i] = w_[i * post_size_ + post];
    return out;
}

void PlasticSynapse::forward(std::span<const std::uint8_t> pre_spikes, std::span<std::int64_t> out, int threads)
{
    if (pre_spikes.size() != pre_size_) {
        throw std::invalid_argument("spike vector length " + std::to_string(pre_spikes.size()) +
                                    " does not match pre population " + std::to_string(pre_size_));
    }
    if (out.size() != post_size_) throw std::invalid_argument("output length does not match post population");
    const SpikeVector& arrived = delay_.push(pre_spikes);
    if (threads > 1) {
        kernels::dense_accumulate(w_, pre_size_, post_size_, 0, arrived, out, threads);
    } else {
        kernels::ref::dense_accumulate(w_, pre_size_, post_size_, 0, arrived, out);
    }
}

CurrentVector PlasticSynapse::forward(std::span<const std::uint8_t> pre_spikes)
{
    std::vector<std::int64_t> acc(post_size_, 0);
    forward(pre_spikes, acc);
    CurrentVector out(post_size_);
    std::transform(acc.begin(), acc.end(), out.begin(), [](auto a) { return fxp::saturate(a); });
    return out;
}

void PlasticSynapse::decay_traces(int threads)
{
    kernels::trace_decay(traces_.x, decay_x_, threads);
    kernels::trace_decay(traces_.y, decay_y_, threads);
}

void PlasticSynapse::stdp_update(std::span<const std::uint8_t> pre_spikes,
                                 std::span<const std::uint8_t> post_spikes, int threads)
{
    if (pre_spikes.size() != pre_size_ || post_spikes.size() != post_size_) {
        throw std::invalid_argument("spike vectors do not match plastic block shape");
    }
    kernels::stdp_apply(w_, pre_size_, post_size_, traces_.x, traces_.y, pre_spikes, post_spikes,
                        cfg_.lr * cfg_.a_plus, cfg_.lr * cfg_.a_minus, cfg_.w_min, cfg_.w_max, threads);
}

void PlasticSynapse::add_impulses(std::span<const std::uint8_t> pre_spikes,
                                  std::span<const std::uint8_t> post_spikes)
{
    kernels::trace_impulse(traces_.x, pre_spikes, cfg_.trace_impulse, kTraceCap);
    kernels::trace_impulse(traces_.y, post_spikes, cfg_.trace_impulse, kTraceCap);
}

void PlasticSynapse::learn(std::span<const std::uint8_t> pre_spikes, std::span<const std::uint8_t> post_spikes,
                           int threads)
{
    decay_traces(threads);
    stdp_update(pre_spikes, post_spikes, threads);
    add_impulses(pre_spikes, post_spikes);
}

void PlasticSynapse::reset_plastic(std::int32_t initial_weight)
{
    if (initial_weight < cfg_.w_min || initial_weight > cfg_.w_max) {
        throw std::invalid_argument("initial plastic weight outside STDP bounds");
    }
    initial_weight_ = initial_weight;
    std::fill(w_.begin(), w_.end(), initial_weight);
    traces_.clear();
    delay_.clear();
}

bool PlasticSynapse::at_initial_state() const
{
    return std::all_of(w_.begin(), w_.end(), [this](auto w) { return w == initial_weight_; }) &&
           traces_.is_zero() && delay_.empty();
}

void PlasticSynapse::set_weight(std::size_t pre, std::size_t post, std::int32_t w)
{
    if (pre >= pre_size_ || post >= post_size_) throw std::out_of_range("plastic weight index out of range");
    w_[pre * post_size_ + post] = std::clamp(w, cfg_.w_min, cfg_.w_max);
}

} // namespace sgnn::synapse
