#pragma once

// Separable concave objective over a rank-normalised grid with exactly one
// maximiser, plus helpers to rank any point against the full enumeration.

#include "sgnn/bopt.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

namespace grid_oracle {

struct Peak {
    std::array<double, 4> centre{};  // rank coordinates of the maximiser
    std::array<double, 4> weight{1.0, 0.8, 0.6, 0.4};
};

/// Peak sitting on grid coordinates (3, 1, 2, 6) of the 7x7x5x10 space.
inline Peak table3_peak()
{
    return {{3.0 / 6.0, 1.0 / 6.0, 2.0 / 4.0, 6.0 / 9.0}, {1.0, 0.8, 0.6, 0.4}};
}

inline double value(const sgnn::bopt::SearchSpace& space, const Peak& peak, std::size_t flat)
{
    const auto r = space.normalized(flat);
    double f = 1.0;
    for (std::size_t d = 0; d < r.size(); ++d) f -= peak.weight[d] * (r[d] - peak.centre[d]) * (r[d] - peak.centre[d]);
    return f;
}

inline std::vector<double> enumerate(const sgnn::bopt::SearchSpace& space, const Peak& peak)
{
    std::vector<double> all(space.size());
    for (std::size_t p = 0; p < space.size(); ++p) all[p] = value(space, peak, p);
    return all;
}

/// Number of grid points strictly better than `f`.
inline std::size_t points_above(const std::vector<double>& all, double f)
{
    return static_cast<std::size_t>(std::count_if(all.begin(), all.end(), [&](double x) { return x > f + 1e-12; }));
}

inline std::size_t argmax(const std::vector<double>& all)
{
    return static_cast<std::size_t>(std::max_element(all.begin(), all.end()) - all.begin());
}

} // namespace grid_oracle
