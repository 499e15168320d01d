#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the library; they are deliberately naive.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

inline double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Inverse normal cdf by bisection on the erfc-based cdf.
inline double inverse_cdf_bisect(double u) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (phi_cdf(mid) < u) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Black-Scholes European put.
inline double bs_put(double s0, double k, double r, double sigma, double t) {
    const double d1 = (std::log(s0 / k) + (r + 0.5 * sigma * sigma) * t) / (sigma * std::sqrt(t));
    const double d2 = d1 - sigma * std::sqrt(t);
    return k * std::exp(-r * t) * phi_cdf(-d2) - s0 * phi_cdf(-d1);
}

inline double bernoulli2_kernel(double t) {
    return 2.0 * std::numbers::pi * std::numbers::pi * (t * t - t + 1.0 / 6.0);
}

/// Product-weight criterion straight from the definition, product minus one.
inline double naive_criterion(const std::vector<std::uint32_t>& z, std::uint64_t n,
                              const std::vector<double>& gamma) {
    long double sum = 0.0L;
    for (std::uint64_t k = 0; k < n; ++k) {
        long double p = 1.0L;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double t = static_cast<double>((k * z[j]) % n) / static_cast<double>(n);
            p *= 1.0L + gamma[j] * bernoulli2_kernel(t);
        }
        sum += p;
    }
    return static_cast<double>(sum / n - 1.0L);
}

/// Brownian covariance T min(j+1, k+1)/m.
inline double brownian_cov(int j, int k, int m, double t) {
    return t * std::min(j + 1, k + 1) / m;
}

/// E[(1/m) sum_k S_k] under the risk-neutral measure.
inline double mean_average_price(double s0, double r, double t, int m) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += std::exp(r * (k + 1) * t / m);
    return s0 * s / m;
}

}  // namespace oracle
