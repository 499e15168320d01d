#pragma once

#include <cstdint>
#include <random>

namespace preint {

/// Named random streams. Every (seed, tag, index) triple selects an
/// independent, reproducible mt19937_64 sequence, so work can be split
/// across threads without changing the numbers drawn.
enum class StreamTag : std::uint32_t {
    Shift = 1,        // index = shift number
    MonteCarlo = 2,   // index = replicate (group) number
};

class RandomStream {
public:
    RandomStream(std::uint64_t seed, StreamTag tag, std::uint64_t index);

    /// Uniform on [0,1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0,1); never returns an endpoint.
    double open_uniform() noexcept;
    /// Standard normal via the inverse cdf of open_uniform().
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace preint
