#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace preint {

/// The N values of the published convergence study (all prime).
inline constexpr std::uint64_t kPaperLadder[] = {101,   251,   503,   997,    1999,  4001,
                                                 8009,  16001, 32003, 64007,  128021};
/// Desk-scale prefix of the paper ladder: 101 .. 8009.
inline constexpr std::size_t kDeskLadderSize = 7;

/// "paper", "desk", or a comma-separated list of primes. Throws DomainError.
std::vector<std::uint64_t> parse_ladder(std::string_view spec);

/// Command-line entry point. Returns 0 on success, 2 on usage errors and 1
/// on numeric failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace preint
