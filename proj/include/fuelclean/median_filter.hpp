#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "fuelclean/error.hpp"

namespace fuelclean {

/// Sliding median with half-width h = (window-1)/2. Near the ends the window
/// shrinks symmetrically to the largest odd span that fits, so every output
/// is the middle element of an odd window and no padding values are invented.
inline std::vector<double> median_filter(std::span<const double> values, std::size_t window) {
    if (window < 3 || window % 2 == 0) {
        throw Error(Errc::EvenWindow, "median window must be odd and >= 3, got " + std::to_string(window));
    }
    if (values.empty()) throw Error(Errc::EmptyInput, "median filter on empty input");

    const std::size_t n = values.size();
    const std::size_t half = (window - 1) / 2;
    std::vector<double> out(n);
    std::vector<double> scratch;
    scratch.reserve(window);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = std::min({half, i, n - 1 - i});
        scratch.assign(values.begin() + static_cast<std::ptrdiff_t>(i - h),
                       values.begin() + static_cast<std::ptrdiff_t>(i + h + 1));
        auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(h);
        std::nth_element(scratch.begin(), mid, scratch.end());
        out[i] = *mid;
    }
    return out;
}

} // namespace fuelclean
