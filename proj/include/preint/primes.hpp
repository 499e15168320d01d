#pragma once

#include <cstdint>
#include <vector>

namespace preint {

bool is_prime(std::uint64_t n) noexcept;

/// Distinct prime factors in increasing order.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

/// Smallest primitive root modulo the prime n. Throws DomainError if n is
/// not prime.
std::uint64_t primitive_root(std::uint64_t n);

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) noexcept;

}  // namespace preint
