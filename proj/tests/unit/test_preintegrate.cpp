#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "preint/errors.hpp"
#include "preint/normal.hpp"
#include "preint/preintegrate.hpp"

using namespace preint;

namespace {

MarketParams desk(int m = 16) {
    MarketParams p;
    p.m = m;
    return p;
}

std::vector<double> random_tail(std::mt19937_64& g, int d, double scale = 1.0) {
    std::normal_distribution<double> n01;
    std::vector<double> t(d);
    for (auto& v : t) v = scale * n01(g);
    return t;
}

}  // namespace

TEST_CASE("root solves the section equation to tolerance") {
    const AsianModel model(desk());
    std::mt19937_64 g(3);
    for (int i = 0; i < 200; ++i) {
        const auto tail = random_tail(g, 15, 2.0);
        for (double x : {1.0, 50.0, 100.0, 180.0, 1e4}) {
            const auto root = solve_xi(model, x, tail);
            std::vector<double> y(16);
            y[0] = root.xi;
            std::copy(tail.begin(), tail.end(), y.begin() + 1);
            CHECK(std::fabs(model.phi(y) - x) <= root_tolerance(x));
            CHECK(root.dphi0_at_xi > 0.0);
            CHECK(root.iterations <= 100);
        }
    }
}

TEST_CASE("root rejects non-positive x") {
    const AsianModel model(desk());
    const std::vector<double> tail(15, 0.0);
    CHECK_THROWS_AS(solve_xi(model, 0.0, tail), DomainError);
    CHECK_THROWS_AS(solve_xi(model, -3.0, tail), DomainError);
}

TEST_CASE("root at extreme x needs many doublings but succeeds") {
    const AsianModel model(desk());
    const std::vector<double> tail(15, 0.0);
    for (double x : {1e-30, 1e-8, 1e8, 1e30}) {
        const auto r = solve_xi(model, x, tail);
        std::vector<double> y(16, 0.0);
        y[0] = r.xi;
        CHECK(std::fabs(model.phi(y) - x) <= root_tolerance(x) + 1e-12 * x);
    }
}

TEST_CASE("closed-form price matches adaptive quadrature") {
    const AsianModel model(desk());
    std::mt19937_64 g(17);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        const auto tail = random_tail(g, 15);
        const double exact = preint_price(model, tail);
        const double ref = reference_preintegrate(model, Target::price(100.0), tail);
        worst = std::max(worst, std::fabs(exact - ref));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("closed-form cdf matches adaptive quadrature") {
    const AsianModel model(desk());
    std::mt19937_64 g(18);
    for (int i = 0; i < 100; ++i) {
        const auto tail = random_tail(g, 15);
        for (double x : {80.0, 100.0, 125.0}) {
            CHECK(std::fabs(preint_cdf(model, x, tail) -
                            reference_preintegrate(model, Target::cdf(x), tail)) <= 1e-10);
        }
    }
    CHECK_THROWS_AS(reference_preintegrate(model, Target::pdf(100.0), std::vector<double>(15)),
                    UnsupportedTarget);
}

TEST_CASE("pdf is the x-derivative of the cdf") {
    const AsianModel model(desk());
    std::mt19937_64 g(19);
    const double h = 1e-4;
    for (int i = 0; i < 200; ++i) {
        const auto tail = random_tail(g, 15);
        for (double x : {70.0, 100.0, 140.0}) {
            const double fd = (preint_cdf(model, x + h, tail) - preint_cdf(model, x - h, tail)) / (2 * h);
            CHECK(std::fabs(preint_pdf(model, x, tail) - fd) <= 1e-6);
        }
    }
}

TEST_CASE("price is the integral of the cdf in the strike") {
    // d/dK of the undiscounted conditional put is the conditional cdf
    const AsianModel model(desk());
    std::mt19937_64 g(23);
    const double h = 1e-3;
    for (int i = 0; i < 50; ++i) {
        const auto tail = random_tail(g, 15);
        std::vector<double> coeff(16);
        model.section_coefficients(tail, coeff);
        const AverageSection s(model.leading_slope(), coeff);
        for (double k : {90.0, 100.0, 110.0}) {
            const double fd = (preint_price(s, k + h) - preint_price(s, k - h)) / (2 * h);
            CHECK(fd == doctest::Approx(preint_cdf(s, k)).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("targets vanish for non-positive x and stay in range") {
    const AsianModel model(desk());
    std::mt19937_64 g(29);
    const auto tail = random_tail(g, 15);
    CHECK(preint_cdf(model, 0.0, tail) == 0.0);
    CHECK(preint_cdf(model, -1.0, tail) == 0.0);
    CHECK(preint_pdf(model, -1.0, tail) == 0.0);
    std::vector<double> coeff(16);
    model.section_coefficients(tail, coeff);
    const AverageSection s(model.leading_slope(), coeff);
    CHECK(preint_price(s, 0.0) == 0.0);
    double prev = -1.0;
    for (double x = 10.0; x < 400.0; x += 10.0) {
        const double c = preint_cdf(s, x);
        CHECK(c >= prev);
        CHECK(c <= 1.0);
        prev = c;
        const double p = preint_price(s, x);
        CHECK(p >= 0.0);
        CHECK(p <= x);
    }
}

TEST_CASE("one time step: preintegration is the Black-Scholes put") {
    MarketParams p;
    p.m = 1;
    const AsianModel model(p);
    const std::vector<double> none;
    const double undiscounted = oracle::bs_put(100, 100, 0.1, 0.2, 1.0) * std::exp(0.1);
    CHECK(preint_price(model, none) == doctest::Approx(undiscounted).epsilon(1e-13));
    // P(S_T <= 100) = Phi(-d2) with d2 = 0.4
    CHECK(preint_cdf(model, 100.0, none) == doctest::Approx(oracle::phi_cdf(-0.4)).epsilon(1e-13));
}

TEST_CASE("huge strike: the payoff is linear in the average") {
    const AsianModel model(desk());
    std::mt19937_64 g(31);
    const auto tail = random_tail(g, 15);
    std::vector<double> coeff(16);
    model.section_coefficients(tail, coeff);
    const AverageSection s(model.leading_slope(), coeff);
    // K - E[phi | tail]
    double cond_mean = 0.0;
    for (int k = 0; k < 16; ++k) {
        const double a = model.leading_slope()[k];
        cond_mean += std::exp(coeff[k] + 0.5 * a * a);
    }
    CHECK(preint_price(s, 1e6) == doctest::Approx(1e6 - cond_mean).epsilon(1e-14));
}

TEST_CASE("target parsing round trips") {
    for (auto k : {TargetKind::Price, TargetKind::Cdf, TargetKind::Pdf}) {
        CHECK(parse_target_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_target_kind("delta"), DomainError);
}

TEST_CASE("root residual over a random suite never fails") {
    std::mt19937_64 g(101);
    std::uniform_real_distribution<double> ux(50.0, 200.0);
    int failures = 0;
    for (int m : {2, 16, 64}) {
        const AsianModel model(desk(m));
        for (int i = 0; i < 3334; ++i) {
            const double x = ux(g);
            const auto tail = random_tail(g, m - 1, 1.5);
            try {
                const auto r = solve_xi(model, x, tail);
                std::vector<double> y(m);
                y[0] = r.xi;
                std::copy(tail.begin(), tail.end(), y.begin() + 1);
                CHECK(std::fabs(model.phi(y) - x) <= root_tolerance(x) * (1 + 1e-9));
            } catch (const SolverFailure&) {
                ++failures;
            }
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("reference quadrature examples") {
    MarketParams p;
    p.m = 1;
    const AsianModel one(p);
    const std::vector<double> none;
    CHECK(std::fabs(reference_preintegrate(one, Target::price(100), none) - preint_price(one, none)) <= 1e-10);
    CHECK(reference_preintegrate(one, Target::price(0.0), none) == 0.0);
    CHECK(reference_preintegrate(one, Target::price(-5.0), none) == 0.0);

    const AsianModel model(desk());
    std::mt19937_64 g(5);
    for (int i = 0; i < 20; ++i) {
        const auto tail = random_tail(g, 15);
        const double xi = solve_xi(model, 95.0, tail).xi;
        CHECK(std::fabs(reference_preintegrate(model, Target::cdf(95.0), tail) - normal_cdf(xi)) <= 1e-12);
    }
}
