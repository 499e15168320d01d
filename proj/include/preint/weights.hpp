#pragma once

#include <span>
#include <vector>

#include "preint/model.hpp"
#include "preint/preintegrate.hpp"
#include "preint/weight_spec.hpp"

namespace preint {

/// Weights actually used for the lattice rules: gamma_j = Lambda_j^(4/3),
/// j = 1..d, the delta -> 0 limit of the optimal POD weights.
WeightSpec product_weights(const BrownianFactor& factor);

/// Same family over all d+1 coordinates (j = 0..d), for the rule used by
/// plain QMC before preintegration.
WeightSpec full_product_weights(const BrownianFactor& factor);

inline constexpr int kDefaultBetaMax = 10;

/// sup_v |He_beta(v)| rho(v), by a grid scan of [-20, 20] (step 1e-3)
/// refined with golden-section search. Throws DomainError if beta > beta_max.
double kappa_beta(int beta, int beta_max = kDefaultBetaMax);

/// log kappa_beta for beta = 0..beta_max, computed with normalised Hermite
/// recurrences so large orders do not overflow.
std::vector<double> log_kappa_table(int beta_max);

/// Whether the smoothing function theta is 1 (cdf, pdf) or x - phi (price).
enum class ThetaKind { One, XMinusPhi };

/// Hermite polynomial He_beta(v) by three-term recurrence.
double hermite_he(int beta, double v) noexcept;

/// Riemann zeta for s > 1: direct sum plus Euler-Maclaurin tail.
double riemann_zeta(double s);

/// Exponential weight function Lambda0 exp(-2 Lambda0 |y|).
double psi_weight(double lambda0, double y) noexcept;

/// int e^{2 Lambda |y|} rho(y) dy = 2 e^{2 Lambda^2} Phi(2 Lambda).
double i1_integral(double lambda) noexcept;
/// int e^{2 Lambda_i |y|} psi(y) dy = 1 + 1/(2i), i >= 1.
double i2_integral(int i);

struct TheoryConstants {
    std::vector<double> log_kappa;  ///< beta = 0..beta_max
    std::vector<double> i1;         ///< I_{1,i}, i = 0..d
    std::vector<double> i2;         ///< I_{2,i}, i = 0..d (entry 0 unused, NaN)
    double lambda0 = 0.0;
    double z_mean = 0.0;
    double delta = 0.25;
    double c2 = 1.0;                ///< placeholder scale constant, not a derived value
    double x_lo = 100.0;            ///< [a, b] range of x used by Omega_q
    double x_hi = 100.0;

    int beta_max() const noexcept { return static_cast<int>(log_kappa.size()) - 1; }
    double kappa(int beta) const;
    /// max_{beta <= n} kappa_beta, in log form.
    double log_kappa_max(int n) const;
    /// Omega_q of the derivative bounds; DomainError when 1/a or log b is undefined.
    double omega(int q, ThetaKind theta) const;
};

/// Constants for `model` with the x-range [x_lo, x_hi]. beta_max defaults to
/// max(10, d) so that POD weights of every order can be formed.
TheoryConstants make_theory_constants(const AsianModel& model, double x_lo, double x_hi,
                                      double delta, double c2, int beta_max = -1);

/// B_{q,eta} of the derivative bounds, in log form. eta has length d.
double log_b_constant(int q, std::span<const int> eta, ThetaKind theta,
                      const TheoryConstants& constants, const BrownianFactor& factor);
double b_constant(int q, std::span<const int> eta, ThetaKind theta,
                  const TheoryConstants& constants, const BrownianFactor& factor);

/// Error-bound-minimising POD weights for the preintegrated target:
///   gamma*_eta = (A_eta / [2 C2 zeta(1+delta)]^|eta|)^(2(1-delta)/(3-2delta)).
WeightSpec pod_weights(TargetKind target, const TheoryConstants& constants,
                       const BrownianFactor& factor);

}  // namespace preint
