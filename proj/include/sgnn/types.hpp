#pragma once

#include <cstdint>
#include <vector>

namespace sgnn {

// One byte per neuron; std::vector<bool> is avoided so kernels can take spans.
using SpikeVector = std::vector<std::uint8_t>;
using CurrentVector = std::vector<std::int32_t>;

} // namespace sgnn
