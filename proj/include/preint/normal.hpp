#pragma once

namespace preint {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal cdf Phi(x), accurate to a few ulps relative in both
/// tails (the lower tail underflows to 0 below about -38.4).
double normal_cdf(double x) noexcept;

/// Upper tail 1 - Phi(x) = Phi(-x).
double normal_ccdf(double x) noexcept;

/// Inverse of Phi on (0,1), Wichura's AS241 rational approximation.
/// Throws DomainError outside (0,1).
double inverse_normal_cdf(double u);

}  // namespace preint
