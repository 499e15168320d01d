#include "preint/preintegrate.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <limits>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "preint/errors.hpp"
#include "preint/normal.hpp"

namespace preint {
namespace {

constexpr int kMaxDoublings = 60;
constexpr int kMaxIterations = 100;

std::vector<double> coefficients_for(const AsianModel& model, std::span<const double> tail) {
    std::vector<double> coeff(model.m());
    model.section_coefficients(tail, coeff);
    return coeff;
}

}  // namespace

std::string_view to_string(TargetKind kind) noexcept {
    switch (kind) {
        case TargetKind::Price: return "price";
        case TargetKind::Cdf: return "cdf";
        case TargetKind::Pdf: return "pdf";
    }
    return "unknown";
}

TargetKind parse_target_kind(std::string_view name) {
    if (name == "price") return TargetKind::Price;
    if (name == "cdf") return TargetKind::Cdf;
    if (name == "pdf") return TargetKind::Pdf;
    throw DomainError("unknown target '" + std::string(name) + "'");
}

RootResult solve_xi(const AverageSection& section, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("solve_xi: x must be positive and finite, got " + std::to_string(x));
    }
    const double tol = root_tolerance(x);
    auto residual = [&](double y0) { return section.value(y0) - x; };

    double lo = -1.0;
    double hi = 1.0;
    double r_lo = residual(lo);
    double r_hi = residual(hi);
    int doublings = 0;
    while (r_lo > 0.0) {
        if (++doublings > kMaxDoublings) throw SolverFailure("solve_xi: no lower bracket", lo, hi);
        hi = lo;
        r_hi = r_lo;
        lo *= 2.0;
        r_lo = residual(lo);
    }
    while (r_hi < 0.0) {
        if (++doublings > kMaxDoublings) throw SolverFailure("solve_xi: no upper bracket", lo, hi);
        lo = hi;
        r_lo = r_hi;
        hi *= 2.0;
        r_hi = residual(hi);
    }

    // Start from the secant of log(phi) across the bracket; log(phi) is
    // close to affine in y0 so this is usually within a few percent.
    double y = 0.5 * (lo + hi);
    {
        const double g_lo = std::log1p(r_lo / x);
        const double g_hi = std::log1p(r_hi / x);
        if (g_hi > g_lo && std::isfinite(g_lo) && std::isfinite(g_hi)) {
            const double s = lo - g_lo * (hi - lo) / (g_hi - g_lo);
            if (s > lo && s < hi) y = s;
        }
    }

    double last_abs = std::numeric_limits<double>::infinity();
    bool bisect_next = false;
    for (int it = 1; it <= kMaxIterations; ++it) {
        const auto v = section.value_and_slope(y);
        const double r = v.phi - x;
        if (std::fabs(r) <= tol) return {y, v.dphi0, it};
        if (r < 0.0) {
            lo = y;
        } else {
            hi = y;
        }
        if (std::fabs(r) > 0.9 * last_abs) bisect_next = true;
        last_abs = std::fabs(r);

        double next = y - std::log1p(r / x) * v.phi / v.dphi0;
        if (bisect_next || !(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
            bisect_next = false;
        }
        if (next == y || next <= lo || next >= hi) {
            // Bracket has collapsed to adjacent doubles.
            const auto vlo = section.value_and_slope(lo);
            const auto vhi = section.value_and_slope(hi);
            const bool use_lo = std::fabs(vlo.phi - x) <= std::fabs(vhi.phi - x);
            const auto& best = use_lo ? vlo : vhi;
            if (std::fabs(best.phi - x) <= tol) return {use_lo ? lo : hi, best.dphi0, it};
            throw SolverFailure("solve_xi: bracket collapsed above tolerance", lo, hi);
        }
        y = next;
    }
    throw SolverFailure("solve_xi: iteration cap reached", lo, hi);
}

RootResult solve_xi(const AsianModel& model, double x, std::span<const double> tail) {
    const auto coeff = coefficients_for(model, tail);
    return solve_xi(AverageSection(model.leading_slope(), coeff), x);
}

double preint_cdf(const AverageSection& section, double x) {
    if (!(x > 0.0)) return 0.0;
    return normal_cdf(solve_xi(section, x).xi);
}

double preint_cdf(const AsianModel& model, double x, std::span<const double> tail) {
    const auto coeff = coefficients_for(model, tail);
    return preint_cdf(AverageSection(model.leading_slope(), coeff), x);
}

double preint_pdf(const AverageSection& section, double x) {
    if (!(x > 0.0)) return 0.0;
    const auto root = solve_xi(section, x);
    return normal_pdf(root.xi) / root.dphi0_at_xi;
}

double preint_pdf(const AsianModel& model, double x, std::span<const double> tail) {
    const auto coeff = coefficients_for(model, tail);
    return preint_pdf(AverageSection(model.leading_slope(), coeff), x);
}

double preint_price(const AverageSection& section, double strike) {
    if (!(strike > 0.0)) return 0.0;
    const double xi = solve_xi(section, strike).xi;
    const auto slope = section.slope();
    const auto log_coeff = section.log_coeff();
    double asset_part = 0.0;
    for (std::size_t k = 0; k < slope.size(); ++k) {
        const double a = slope[k];
        asset_part += clamped_exp(log_coeff[k] + 0.5 * a * a) * normal_cdf(xi - a);
    }
    const double value = strike * normal_cdf(xi) - asset_part;
    return std::clamp(value, 0.0, strike);
}

double preint_price(const AsianModel& model, std::span<const double> tail) {
    const auto coeff = coefficients_for(model, tail);
    return preint_price(AverageSection(model.leading_slope(), coeff), model.params().strike);
}

double preintegrate(const AverageSection& section, const Target& target) {
    switch (target.kind) {
        case TargetKind::Price: return preint_price(section, target.x);
        case TargetKind::Cdf: return preint_cdf(section, target.x);
        case TargetKind::Pdf: return preint_pdf(section, target.x);
    }
    return 0.0;
}

double reference_preintegrate(const AsianModel& model, const Target& target,
                              std::span<const double> tail) {
    if (target.kind == TargetKind::Pdf) {
        throw UnsupportedTarget("reference_preintegrate: pdf has no quadrature form");
    }
    if (!(target.x > 0.0)) return 0.0;
    const auto coeff = coefficients_for(model, tail);
    const AverageSection section(model.leading_slope(), coeff);
    const double xi = solve_xi(section, target.x).xi;
    const bool price = target.kind == TargetKind::Price;

    // y0 = xi - (1 - s)/s maps (0, 1] onto (-inf, xi].
    auto integrand = [&](double s) {
        if (s <= 0.0) return 0.0;
        const double y0 = xi - (1.0 - s) / s;
        const double theta = price ? target.x - section.value(y0) : 1.0;
        return theta * normal_pdf(y0) / (s * s);
    };
    // Boost's tolerance is relative to the L1 norm; 1e-14 sits above the
    // roundoff floor of the Kronrod-Gauss difference yet keeps the absolute
    // error far inside 1e-12 for values of order K.
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, 1.0, 15, 1e-14, &error);
    if (!(error <= 1e-12)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "reference_preintegrate: quadrature error %.3g above 1e-12", error);
        throw OracleFailure(buf);
    }
    return value;
}

}  // namespace preint
