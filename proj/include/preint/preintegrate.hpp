#pragma once

#include <span>
#include <string_view>

#include "preint/model.hpp"

namespace preint {

enum class TargetKind { Price, Cdf, Pdf };

/// What an estimator integrates. For Price, x is the strike.
struct Target {
    TargetKind kind = TargetKind::Price;
    double x = 100.0;

    static Target price(double strike) noexcept { return {TargetKind::Price, strike}; }
    static Target cdf(double x) noexcept { return {TargetKind::Cdf, x}; }
    static Target pdf(double x) noexcept { return {TargetKind::Pdf, x}; }
};

std::string_view to_string(TargetKind kind) noexcept;
/// Accepts "price", "cdf", "pdf"; throws DomainError otherwise.
TargetKind parse_target_kind(std::string_view name);

struct RootResult {
    double xi = 0.0;           ///< phi(xi, y) = x
    double dphi0_at_xi = 0.0;  ///< d phi / d y0 at the root, > 0
    int iterations = 0;
};

/// Residual tolerance of solve_xi: |phi(xi) - x| <= 1e-12 max(1, x).
inline double root_tolerance(double x) noexcept { return 1e-12 * std::max(1.0, x); }

/// Unique root of y0 -> phi(y0, y) - x on a section. Bracket by doubling
/// out from [-1, 1], then Newton on log(phi) with bisection fallback.
/// Throws DomainError for x <= 0 and SolverFailure past the caps.
RootResult solve_xi(const AverageSection& section, double x);
RootResult solve_xi(const AsianModel& model, double x, std::span<const double> tail);

/// Phi(xi(x, y)); 0 when x <= 0.
double preint_cdf(const AverageSection& section, double x);
double preint_cdf(const AsianModel& model, double x, std::span<const double> tail);

/// rho(xi) / D0 phi(xi, y); 0 when x <= 0.
double preint_pdf(const AverageSection& section, double x);
double preint_pdf(const AsianModel& model, double x, std::span<const double> tail);

/// Undiscounted conditional put value
///   int_{-inf}^{xi} (K - phi(y0, y)) rho(y0) dy0
///   = K Phi(xi) - sum_k c_k exp(a_k^2 / 2) Phi(xi - a_k),
/// clamped to [0, K]; 0 when K <= 0.
double preint_price(const AverageSection& section, double strike);
double preint_price(const AsianModel& model, std::span<const double> tail);

/// Preintegrated value for any target on a section.
double preintegrate(const AverageSection& section, const Target& target);

/// Test oracle: the same one-dimensional integral by adaptive Gauss-Kronrod
/// quadrature on (-inf, xi] mapped to (0, 1]. Price and Cdf only
/// (UnsupportedTarget otherwise); OracleFailure above 1e-12 estimated error.
double reference_preintegrate(const AsianModel& model, const Target& target,
                              std::span<const double> tail);

}  // namespace preint
