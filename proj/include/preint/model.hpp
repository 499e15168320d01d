#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace preint {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Black-Scholes economy and an Asian put on the discretely sampled
/// arithmetic average. Defaults are the benchmark configuration.
struct MarketParams {
    double s0 = 100.0;       ///< initial price
    double r = 0.1;          ///< risk-free rate, per unit time
    double sigma = 0.2;      ///< volatility, per sqrt(time)
    double t_expiry = 1.0;   ///< expiry T
    double strike = 100.0;   ///< K
    int m = 256;             ///< timesteps (d + 1)

    /// Dimension left after preintegrating out y0.
    int dim() const noexcept { return m - 1; }
    /// Throws DomainError unless s0, sigma, t_expiry > 0 and m >= 1.
    void validate() const;
};

/// PCA factor A of the discrete Brownian covariance, Sigma = A A^T with
/// Sigma_jk = T min(j+1, k+1)/m, in closed sine form.
struct BrownianFactor {
    RowMatrix a;                 ///< m x m, A(k, i)
    double tau_d = 0.0;          ///< sqrt(T / ((d+1)(2d+3)))
    std::vector<double> chi;     ///< chi_i = pi(2i+1)/(2(2d+3))
    std::vector<double> lambda;  ///< derivative bounds sigma tau_d (2d+3)/(2i+1)
    double z_mean = 0.0;         ///< average price at y = 0

    int m() const noexcept { return static_cast<int>(a.rows()); }
};

BrownianFactor pca_factor(const MarketParams& params);

/// phi restricted to the y0 axis for fixed remaining coordinates:
///   phi(y0) = sum_k exp(log_coeff[k] + slope[k] * y0)
/// where log_coeff already carries S0/m, the drift, and sigma A_k,1: y.
/// Non-owning; both spans must outlive the section.
class AverageSection {
public:
    AverageSection(std::span<const double> slope, std::span<const double> log_coeff) noexcept
        : slope_(slope), log_coeff_(log_coeff) {}

    struct Value {
        double phi;
        double dphi0;  ///< derivative in y0, always > 0
    };

    double value(double y0) const noexcept;
    Value value_and_slope(double y0) const noexcept;

    std::span<const double> slope() const noexcept { return slope_; }
    std::span<const double> log_coeff() const noexcept { return log_coeff_; }

private:
    std::span<const double> slope_;
    std::span<const double> log_coeff_;
};

/// The average-price map phi : R^m -> (0, inf) together with the caches the
/// estimators need: sigma*A and the per-timestep log drift. Immutable after
/// construction and safe to share between threads.
class AsianModel {
public:
    explicit AsianModel(const MarketParams& params);

    const MarketParams& params() const noexcept { return params_; }
    const BrownianFactor& factor() const noexcept { return factor_; }
    int m() const noexcept { return params_.m; }
    int dim() const noexcept { return params_.m - 1; }

    /// Time-discretised average price at y (length m).
    double phi(std::span<const double> y) const;

    /// Mixed derivative D^eta phi at y; eta has length m, entries >= 0.
    double dphi(std::span<const int> eta, std::span<const double> y) const;

    /// sigma * A, row-major m x m.
    const RowMatrix& sigma_a() const noexcept { return sigma_a_; }
    /// sigma * A(k, 0) for every k; strictly positive.
    std::span<const double> leading_slope() const noexcept { return leading_slope_; }
    /// log(S0/m) + (r - sigma^2/2)(k+1)T/m.
    std::span<const double> log_base() const noexcept { return log_base_; }

    /// Fills `out` (length m) with the section coefficients for the tail
    /// y = (y_1, ..., y_d).
    void section_coefficients(std::span<const double> tail, std::span<double> out) const;

    /// Batched section coefficients: row j of the result belongs to row j of
    /// `tails` (B x d).
    RowMatrix section_coefficients(const RowMatrix& tails) const;

    /// Batched full exponents log(S_k / m) for points (B x m).
    RowMatrix log_terms(const RowMatrix& points) const;

private:
    MarketParams params_;
    BrownianFactor factor_;
    RowMatrix sigma_a_;
    RowMatrix sigma_a_tail_t_;  // (sigma A(:, 1:))^T, d x m
    std::vector<double> leading_slope_;
    std::vector<double> log_base_;
};

/// Exponent clamp applied before every exp() in the price map.
inline constexpr double kMaxExponent = 700.0;

inline double clamped_exp(double e) noexcept {
    return std::exp(std::clamp(e, -kMaxExponent, kMaxExponent));
}

}  // namespace preint
