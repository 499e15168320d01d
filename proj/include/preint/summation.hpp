#pragma once

#include <cstddef>
#include <span>

namespace preint {

/// Pairwise (tree) summation with a fixed split order, so the result depends
/// only on the input sequence and not on how the work was scheduled.
inline double pairwise_sum(std::span<const double> xs) noexcept {
    if (xs.size() <= 32) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_mean(std::span<const double> xs) noexcept {
    return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace preint
