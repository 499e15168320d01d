#include "preint/weights.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "preint/errors.hpp"
#include "preint/normal.hpp"

namespace preint {
namespace {

constexpr double kGridHalfWidth = 20.0;
constexpr double kGridStep = 1e-3;
constexpr double kGolden = 0.6180339887498949;

// He_beta(v) / sqrt(beta!) for beta = 0..beta_max; stays O(1) in size.
void normalised_hermite(double v, std::span<double> out) {
    out[0] = 1.0;
    if (out.size() > 1) out[1] = v;
    for (std::size_t b = 1; b + 1 < out.size(); ++b) {
        out[b + 1] = (v * out[b] - std::sqrt(static_cast<double>(b)) * out[b - 1]) /
                     std::sqrt(static_cast<double>(b + 1));
    }
}

double normalised_envelope(int beta, double v) {
    std::vector<double> h(beta + 1);
    normalised_hermite(v, h);
    return std::fabs(h[beta]) * normal_pdf(v);
}

double golden_max(int beta, double lo, double hi) {
    double a = hi - kGolden * (hi - lo);
    double b = lo + kGolden * (hi - lo);
    double fa = normalised_envelope(beta, a);
    double fb = normalised_envelope(beta, b);
    while (hi - lo > 1e-10) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + kGolden * (hi - lo);
            fb = normalised_envelope(beta, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - kGolden * (hi - lo);
            fa = normalised_envelope(beta, a);
        }
    }
    return std::max({fa, fb, normalised_envelope(beta, 0.5 * (lo + hi))});
}

int order_of(std::span<const int> eta) {
    int order = 0;
    for (int e : eta) order += (e != 0) ? 1 : 0;
    return order;
}

}  // namespace

WeightSpec product_weights(const BrownianFactor& factor) {
    const int d = factor.m() - 1;
    if (d < 1) throw DomainError("product_weights: need d >= 1");
    std::vector<double> g(d);
    for (int j = 1; j <= d; ++j) g[j - 1] = std::pow(factor.lambda[j], 4.0 / 3.0);
    return WeightSpec::product(std::move(g));
}

WeightSpec full_product_weights(const BrownianFactor& factor) {
    std::vector<double> g(factor.m());
    for (int j = 0; j < factor.m(); ++j) g[j] = std::pow(factor.lambda[j], 4.0 / 3.0);
    return WeightSpec::product(std::move(g));
}

double hermite_he(int beta, double v) noexcept {
    if (beta == 0) return 1.0;
    double prev = 1.0;
    double cur = v;
    for (int b = 1; b < beta; ++b) {
        const double next = v * cur - b * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> log_kappa_table(int beta_max) {
    if (beta_max < 0) throw DomainError("log_kappa_table: beta_max must be >= 0");
    const int points = static_cast<int>(std::lround(2.0 * kGridHalfWidth / kGridStep)) + 1;
    std::vector<double> best(beta_max + 1, -1.0);
    std::vector<double> best_v(beta_max + 1, 0.0);
    std::vector<double> h(beta_max + 1);
    for (int j = 0; j < points; ++j) {
        const double v = -kGridHalfWidth + j * kGridStep;
        normalised_hermite(v, h);
        const double rho = normal_pdf(v);
        for (int b = 0; b <= beta_max; ++b) {
            const double f = std::fabs(h[b]) * rho;
            if (f > best[b]) {
                best[b] = f;
                best_v[b] = v;
            }
        }
    }
    std::vector<double> out(beta_max + 1);
    for (int b = 0; b <= beta_max; ++b) {
        const double peak = golden_max(b, best_v[b] - kGridStep, best_v[b] + kGridStep);
        out[b] = 0.5 * std::lgamma(b + 1.0) + std::log(std::max(peak, best[b]));
    }
    return out;
}

double kappa_beta(int beta, int beta_max) {
    if (beta < 0 || beta > beta_max) {
        throw DomainError("kappa_beta: beta " + std::to_string(beta) + " outside [0, " +
                          std::to_string(beta_max) + "]");
    }
    return std::exp(log_kappa_table(beta)[beta]);
}

double riemann_zeta(double s) {
    if (!(s > 1.0)) throw DomainError("riemann_zeta: s must exceed 1");
    constexpr int kTerms = 10;
    // B_{2k} / (2k)!, k = 1..7
    constexpr std::array<double, 7> kBernoulli = {
        1.0 / 6.0 / 2.0,          -1.0 / 30.0 / 24.0,      1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,    5.0 / 66.0 / 3628800.0,  -691.0 / 2730.0 / 479001600.0,
        7.0 / 6.0 / 87178291200.0};
    double sum = 0.0;
    for (int n = kTerms - 1; n >= 1; --n) sum += std::pow(n, -s);
    const double big_n = kTerms;
    sum += std::pow(big_n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(big_n, -s);
    double rising = s;  // s (s+1) ... (s+2k-2)
    double power = std::pow(big_n, -s - 1.0);
    for (std::size_t k = 0; k < kBernoulli.size(); ++k) {
        sum += kBernoulli[k] * rising * power;
        rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
        power /= big_n * big_n;
    }
    return sum;
}

double psi_weight(double lambda0, double y) noexcept {
    return lambda0 * std::exp(-2.0 * lambda0 * std::fabs(y));
}

double i1_integral(double lambda) noexcept {
    return 2.0 * std::exp(2.0 * lambda * lambda) * normal_cdf(2.0 * lambda);
}

double i2_integral(int i) {
    if (i < 1) throw DomainError("i2_integral: index must be >= 1");
    return 1.0 + 1.0 / (2.0 * i);
}

double TheoryConstants::kappa(int beta) const {
    if (beta < 0 || beta > beta_max()) {
        throw DomainError("kappa: beta " + std::to_string(beta) + " outside table");
    }
    return std::exp(log_kappa[beta]);
}

double TheoryConstants::log_kappa_max(int n) const {
    if (n < 0 || n > beta_max()) {
        throw DomainError("kappa: order " + std::to_string(n) + " exceeds beta_max " +
                          std::to_string(beta_max()));
    }
    return *std::max_element(log_kappa.begin(), log_kappa.begin() + n + 1);
}

double TheoryConstants::omega(int q, ThetaKind theta) const {
    if (q != 0 && q != 1) throw DomainError("omega: q must be 0 or 1");
    if (theta == ThetaKind::One) {
        if (q == 0) return 1.0;
        if (!(x_lo > 0.0)) throw DomainError("omega: 1/a needs a > 0");
        return 1.0 / x_lo;
    }
    if (q == 1) return 1.0;
    if (!(x_hi > 0.0)) throw DomainError("omega: b must be positive");
    return x_hi;
}

TheoryConstants make_theory_constants(const AsianModel& model, double x_lo, double x_hi,
                                      double delta, double c2, int beta_max) {
    if (!(delta > 0.0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
    if (!(c2 > 0.0) || !std::isfinite(c2)) throw DomainError("c2 must be positive");
    if (!(x_lo <= x_hi)) throw DomainError("x range must satisfy a <= b");
    const auto& f = model.factor();
    const int d = model.dim();
    TheoryConstants c;
    c.log_kappa = log_kappa_table(beta_max < 0 ? std::max(kDefaultBetaMax, d) : beta_max);
    c.i1.resize(model.m());
    c.i2.assign(model.m(), std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < model.m(); ++i) {
        c.i1[i] = i1_integral(f.lambda[i]);
        if (i >= 1) c.i2[i] = i2_integral(i);
    }
    c.lambda0 = f.lambda[0];
    c.z_mean = f.z_mean;
    c.delta = delta;
    c.c2 = c2;
    c.x_lo = x_lo;
    c.x_hi = x_hi;
    return c;
}

double log_b_constant(int q, std::span<const int> eta, ThetaKind theta,
                      const TheoryConstants& constants, const BrownianFactor& factor) {
    const int d = factor.m() - 1;
    if (static_cast<int>(eta.size()) != d) throw DomainError("b_constant: eta must have length d");
    if (q != 0 && q != 1) throw DomainError("b_constant: q must be 0 or 1");
    for (int e : eta) {
        if (e != 0 && e != 1) throw DomainError("b_constant: eta must be a 0/1 multi-index");
    }
    const int order = order_of(eta);
    if (order + q < 1) throw DomainError("b_constant: needs |eta| + q >= 1");
    const double lambda0 = factor.lambda[0];
    double log_inner = constants.log_kappa_max(order + q - 1) +
                       std::log(constants.omega(q, theta)) +
                       (2.0 * order + 2.0 * q - 1.0) * std::log(2.0 * d + 3.0) -
                       (order + q) * std::log(std::min(lambda0, 1.0));
    for (int j = 0; j < d; ++j) {
        if (eta[j] != 0) log_inner += std::log(factor.lambda[j + 1]);
    }
    return 2.0 * log_inner;
}

double b_constant(int q, std::span<const int> eta, ThetaKind theta,
                  const TheoryConstants& constants, const BrownianFactor& factor) {
    return std::exp(log_b_constant(q, eta, theta, constants, factor));
}

WeightSpec pod_weights(TargetKind target, const TheoryConstants& constants,
                       const BrownianFactor& factor) {
    const int d = factor.m() - 1;
    if (d < 1) throw DomainError("pod_weights: need d >= 1");
    const double delta = constants.delta;
    const double exponent = 2.0 * (1.0 - delta) / (3.0 - 2.0 * delta);
    const double log_scale = std::log(2.0 * constants.c2 * riemann_zeta(1.0 + delta));
    const double log_8 = std::log(8.0);
    const double log_2d3 = std::log(2.0 * d + 3.0);
    const double log_min = std::log(std::min(factor.lambda[0], 1.0));

    // log B_{q,eta} without the dimension product, as a function of |eta|.
    auto log_b_order = [&](int q, int order, ThetaKind theta) {
        return 2.0 * (constants.log_kappa_max(order + q - 1) + std::log(constants.omega(q, theta)) +
                      (2.0 * order + 2.0 * q - 1.0) * log_2d3 - (order + q) * log_min);
    };

    std::vector<double> log_lambda_sq(d);
    for (int j = 0; j < d; ++j) log_lambda_sq[j] = 2.0 * std::log(factor.lambda[j + 1]);

    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<WeightSpec::PodComponent> components;
    switch (target) {
        case TargetKind::Cdf: {
            WeightSpec::PodComponent c{std::vector<double>(d + 1), log_lambda_sq};
            c.log_order[0] = 0.0;
            for (int l = 1; l <= d; ++l) {
                c.log_order[l] = 2.0 * ((l - 1) * log_8 + std::lgamma(static_cast<double>(l))) +
                                 log_b_order(0, l, ThetaKind::One);
            }
            components.push_back(std::move(c));
            break;
        }
        case TargetKind::Pdf: {
            WeightSpec::PodComponent c{std::vector<double>(d + 1), log_lambda_sq};
            for (int l = 0; l <= d; ++l) {
                c.log_order[l] = 2.0 * (l * log_8 + std::lgamma(l + 1.0)) +
                                 log_b_order(1, l, ThetaKind::One);
            }
            components.push_back(std::move(c));
            break;
        }
        case TargetKind::Price: {
            // 2 Z^2 I_{1,0} prod_{i not in u} I_{1,i} prod_{i in u} Lambda_i^2 I_{2,i}
            double log_all_i1 = 0.0;
            for (double v : constants.i1) log_all_i1 += std::log(v);
            WeightSpec::PodComponent smooth{
                std::vector<double>(d + 1, std::log(2.0) + 2.0 * std::log(constants.z_mean) + log_all_i1),
                std::vector<double>(d)};
            for (int j = 0; j < d; ++j) {
                smooth.log_dim[j] = log_lambda_sq[j] + std::log(constants.i2[j + 1]) -
                                    std::log(constants.i1[j + 1]);
            }
            WeightSpec::PodComponent kink{std::vector<double>(d + 1), log_lambda_sq};
            kink.log_order[0] = neg_inf;
            for (int l = 1; l <= d; ++l) {
                kink.log_order[l] = std::log(2.0) +
                                    2.0 * ((l - 1) * log_8 + std::lgamma(static_cast<double>(l))) +
                                    log_b_order(0, l, ThetaKind::XMinusPhi);
            }
            components.push_back(std::move(smooth));
            components.push_back(std::move(kink));
            break;
        }
    }
    return WeightSpec::pod(std::move(components), exponent, log_scale);
}

}  // namespace preint
