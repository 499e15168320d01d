#include "preint/rng.hpp"

#include "preint/normal.hpp"

namespace preint {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    // seed_seq's mixing is fixed by the standard, so streams are identical
    // across conforming implementations.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32U)};
    return std::mt19937_64(seq);
}

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, StreamTag tag, std::uint64_t index)
    : engine_(make_engine(seed, tag, index)) {}

double RandomStream::uniform() noexcept {
    return static_cast<double>(engine_() >> 11U) * kTwoPowMinus53;
}

double RandomStream::open_uniform() noexcept {
    return (static_cast<double>(engine_() >> 11U) + 0.5) * kTwoPowMinus53;
}

double RandomStream::normal() { return inverse_normal_cdf(open_uniform()); }

}  // namespace preint
