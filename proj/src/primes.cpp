#include "preint/primes.hpp"

#include <string>

#include "preint/errors.hpp"

namespace preint {

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t f = 3; f * f <= n; f += 2) {
        if (n % f == 0) return false;
    }
    return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t f = 2; f * f <= n; ++f) {
        if (n % f == 0) {
            out.push_back(f);
            while (n % f == 0) n /= f;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

__extension__ using Wide = unsigned __int128;

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) noexcept {
    Wide result = 1;
    Wide b = base % mod;
    while (exp > 0) {
        if (exp & 1U) result = result * b % mod;
        b = b * b % mod;
        exp >>= 1U;
    }
    return static_cast<std::uint64_t>(result);
}

std::uint64_t primitive_root(std::uint64_t n) {
    if (!is_prime(n)) {
        throw DomainError("primitive_root: " + std::to_string(n) + " is not prime");
    }
    if (n == 2) return 1;
    const auto factors = prime_factors(n - 1);
    for (std::uint64_t g = 2; g < n; ++g) {
        bool generator = true;
        for (auto f : factors) {
            if (pow_mod(g, (n - 1) / f, n) == 1) {
                generator = false;
                break;
            }
        }
        if (generator) return g;
    }
    throw DomainError("primitive_root: none found for " + std::to_string(n));
}

}  // namespace preint
