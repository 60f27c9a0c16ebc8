#include "sgnn/fxp.hpp"

#include <cmath>
#include <string>

namespace sgnn::fxp {

Q12Decay tau_to_decay(int tau)
{
    if (tau < 1) {
        throw std::invalid_argument("time constant must be >= 1 timestep, got " + std::to_string(tau));
    }
    const double raw = std::round(static_cast<double>(kDecayOne) * -std::expm1(-1.0 / tau));
    return Q12Decay{static_cast<std::int32_t>(raw)};
}

} // namespace sgnn::fxp
