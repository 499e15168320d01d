// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "preint/cli.hpp"
#include "preint/estimate.hpp"
#include "preint/normal.hpp"
#include "preint/report.hpp"
#include "preint/weights.hpp"

using namespace preint;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

MarketParams with_m(int m) {
    MarketParams p;
    p.m = m;
    return p;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome factor_correctness() {
    double worst = 0.0;
    for (int m : {1, 2, 4, 16, 64, 256}) {
        const auto f = pca_factor(with_m(m));
        const RowMatrix cov = f.a * f.a.transpose();
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) worst = std::max(worst, std::fabs(cov(j, k) - oracle::brownian_cov(j, k, m, 1.0)));
    }
    return {worst <= 1e-10, fmt("max |AA^T - Sigma| = %.3g", worst)};
}

Outcome preintegration_exactness() {
    const AsianModel model(with_m(16));
    std::mt19937_64 g(2024);
    std::normal_distribution<double> n01;
    double worst_price = 0.0;
    double worst_pdf = 0.0;
    std::vector<double> tail(15);
    for (int i = 0; i < 1000; ++i) {
        for (auto& v : tail) v = n01(g);
        worst_price = std::max(worst_price, std::fabs(preint_price(model, tail) -
                                                      reference_preintegrate(model, Target::price(100), tail)));
        const double h = 1e-4;
        for (double x : {80.0, 100.0, 120.0}) {
            const double fd = (preint_cdf(model, x + h, tail) - preint_cdf(model, x - h, tail)) / (2 * h);
            worst_pdf = std::max(worst_pdf, std::fabs(preint_pdf(model, x, tail) - fd));
        }
    }
    return {worst_price <= 1e-10 && worst_pdf <= 1e-6,
            fmt("price vs quadrature %.3g, ", worst_price) + fmt("pdf vs d/dx cdf %.3g", worst_pdf)};
}

Outcome one_timestep() {
    const AsianModel model(with_m(1));
    const double bs = oracle::bs_put(100, 100, 0.1, 0.2, 1.0);
    const double cdf_exact = oracle::phi_cdf(-0.4);
    const auto price = qmc_preint_estimate(Target::price(100), model, preint_rule(model, Target::price(100), 4001, {}), 8, 1);
    const auto cdf = qmc_preint_estimate(Target::cdf(100), model, preint_rule(model, Target::cdf(100), 4001, {}), 8, 1);
    // d = 0: the estimator is exact and stderr is 0, so "within 4 stderr" is
    // read with a roundoff floor.
    auto close = [](double est, double se, double ref) {
        const double diff = std::fabs(est - ref);
        return diff <= std::max(4 * se, 1e-12 * std::fabs(ref)) && diff <= 1e-3;
    };
    const bool ok = close(price.mean, price.std_error, bs) && close(cdf.mean, cdf.std_error, cdf_exact);
    return {ok, fmt("price %.15g ", price.mean) + fmt("(BS %.15g), ", bs) + fmt("cdf %.15g ", cdf.mean) +
                    fmt("(Phi(-0.4) %.15g)", cdf_exact)};
}

Outcome cbc_optimality() {
    bool ok = true;
    int checked = 0;
    for (auto [n, d] : {std::pair<std::uint64_t, int>{5, 2}, {17, 3}, {31, 4}}) {
        std::vector<double> g(d);
        for (int j = 0; j < d; ++j) g[j] = std::pow(0.9, j + 1);
        const auto rule = cbc_construct(d, n, WeightSpec::product(g));
        for (int s = 0; s < d; ++s) {
            std::vector<std::uint32_t> z(rule.z.begin(), rule.z.begin() + s + 1);
            const std::vector<double> gs(g.begin(), g.begin() + s + 1);
            const double chosen = oracle::naive_criterion(z, n, gs);
            double best = std::numeric_limits<double>::infinity();
            for (std::uint32_t c = 1; c < n; ++c) {
                z.back() = c;
                best = std::min(best, oracle::naive_criterion(z, n, gs));
            }
            ok &= chosen <= best * (1 + 1e-12);
            ++checked;
        }
    }
    double worst_rel = 0.0;
    for (std::uint64_t n : {101ULL, 251ULL, 503ULL}) {
        for (int d : {2, 5, 8}) {
            std::vector<double> g(d);
            for (int j = 0; j < d; ++j) g[j] = std::pow(0.9, j + 1);
            const auto spec = WeightSpec::product(g);
            const auto fast = cbc_construct(d, n, spec, CbcPath::Fast);
            const auto direct = cbc_construct(d, n, spec, CbcPath::Direct);
            ok &= fast.z == direct.z;
            worst_rel = std::max(worst_rel, std::fabs(fast.criterion_value - direct.criterion_value) / direct.criterion_value);
        }
    }
    ok &= worst_rel <= 1e-11;
    return {ok, std::to_string(checked) + " components optimal; fast vs direct rel diff " + fmt("%.3g", worst_rel)};
}

std::vector<Estimate> desk_study(const Target& target, std::uint64_t seed) {
    const AsianModel model(with_m(16));
    const auto ladder = parse_ladder("desk");
    return convergence_study(target, model, ladder, 8, seed, kAllMethods);
}

Outcome convergence_rates() {
    bool ok = true;
    std::string detail;
    for (const Target& t : {Target::price(100), Target::cdf(100)}) {
        const auto rows = desk_study(t, 1);
        std::vector<double> n, qp, mc;
        for (std::size_t i = 0; i < rows.size(); i += 4) {
            const auto& mc_row = rows[i];
            const auto& qmc_row = rows[i + 1];
            const auto& mcp_row = rows[i + 2];
            const auto& qmcp_row = rows[i + 3];
            n.push_back(static_cast<double>(qmcp_row.n));
            qp.push_back(qmcp_row.std_error);
            mc.push_back(mc_row.std_error);
            const bool order = qmcp_row.std_error < qmc_row.std_error && qmcp_row.std_error < mcp_row.std_error;
            if (!order) detail += " [ordering fails at N=" + std::to_string(qmcp_row.n) + "]";
            ok &= order;
        }
        const double s_q = slope(n, qp);
        const double s_mc = slope(n, mc);
        ok &= s_q <= -0.85 && s_mc >= -0.6 && s_mc <= -0.4;
        detail += std::string(" ") + std::string(to_string(t.kind)) + fmt(": QMCPreint slope %.3f,", s_q) +
                  fmt(" MC slope %.3f;", s_mc);
    }
    return {ok, detail};
}

Outcome density_normalization() {
    const AsianModel model(with_m(16));
    const auto rule = preint_rule(model, Target::pdf(100), 16001, {});
    const auto curve = pdf_curve(model, 70, 150, 30, rule, 8, 1);
    const double lo = qmc_preint_estimate(Target::cdf(70), model, rule, 8, 1).mean;
    const double hi = qmc_preint_estimate(Target::cdf(150), model, rule, 8, 1).mean;
    const double mass = curve.interpolant.integral();
    const double total = mass + lo + (1 - hi);
    return {total >= 0.995 && total <= 1.005,
            fmt("interior %.6f + ", mass) + fmt("tails %.3g = ", lo + 1 - hi) + fmt("%.8f", total)};
}

Outcome paper_scale() {
    const AsianModel model(MarketParams{});
    std::vector<Estimate> rows;
    for (const Target& t : {Target::price(100), Target::cdf(100), Target::pdf(100)}) {
        const auto rule = preint_rule(model, t, 16001, {});
        rows.push_back(qmc_preint_estimate(t, model, rule, 32, 1));
    }
    std::ostringstream csv;
    write_csv(csv, rows, false);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    bool ok = line == kCsvHeader;
    int data_lines = 0;
    while (std::getline(in, line)) {
        ++data_lines;
        int commas = 0;
        for (char c : line) commas += c == ',';
        ok &= commas == 8;
    }
    ok &= data_lines == 3;
    for (const auto& r : rows) ok &= std::isfinite(r.mean) && std::isfinite(r.std_error);
    const double rel = rows[0].std_error / rows[0].mean;
    ok &= rel < 1e-3;
    return {ok, fmt("price %.10f ", rows[0].mean) + fmt("stderr/mean %.3g; ", rel) + fmt("cdf %.8f, ", rows[1].mean) +
                    fmt("pdf %.8f", rows[2].mean)};
}

Outcome determinism() {
    auto render = [] {
        std::ostringstream out;
        std::ostringstream err;
        const char* argv[] = {"asianqmc", "study", "--target", "price", "--ladder", "desk",
                              "--m",      "16",    "--l",      "8",     "--seed",   "1"};
        const int code = run_cli(12, argv, out, err);
        return code == 0 ? out.str() : std::string();
    };
    const auto a = render();
    const auto b = render();
    return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, identical: " + (a == b ? "yes" : "no")};
}

Outcome weight_identities() {
    const auto f = pca_factor(MarketParams{});
    double worst = 0.0;
    const double s2pi = std::sqrt(2 * std::numbers::pi);
    for (int i : {0, 1, 2, 5, 50, 255}) {
        const double lam = f.lambda[i];
        // Simpson on [0, top]: both integrands are even in y
        auto simpson = [](double top, const std::function<double(double)>& g) {
            const int n = 400000;
            const double h = top / n;
            double s = g(0) + g(top);
            for (int k = 1; k < n; ++k) s += g(k * h) * (k % 2 ? 4 : 2);
            return 2 * s * h / 3;
        };
        const double i1 = simpson(40.0, [&](double y) { return std::exp(2 * lam * y - 0.5 * y * y) / s2pi; });
        worst = std::max(worst, std::fabs(i1 - i1_integral(lam)));
        if (i >= 1) {
            const double l0 = f.lambda[0];
            const double i2 = simpson(200.0, [&](double y) { return l0 * std::exp((2 * lam - 2 * l0) * y); });
            worst = std::max(worst, std::fabs(i2 - i2_integral(i)));
        }
    }
    const double k0 = std::fabs(kappa_beta(0) - 1 / s2pi);
    const AsianModel model(with_m(16));
    const auto spec = pod_weights(TargetKind::Cdf, make_theory_constants(model, 100, 100, 1e-6, 1.0), model.factor());
    double worst_ratio = 0.0;
    for (int i = 0; i < 15; ++i) {
        std::vector<int> ei(15, 0);
        std::vector<int> e0(15, 0);
        ei[i] = 1;
        e0[0] = 1;
        const double ratio = spec.gamma(ei) / spec.gamma(e0);
        const double expect = std::pow(model.factor().lambda[i + 1] / model.factor().lambda[1], 4.0 / 3.0);
        worst_ratio = std::max(worst_ratio, std::fabs(ratio / expect - 1));
    }
    return {worst <= 1e-10 && k0 <= 1e-12 && worst_ratio <= 1e-3,
            fmt("I-identities %.3g, ", worst) + fmt("kappa0 %.3g, ", k0) + fmt("POD ratio %.3g", worst_ratio)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "factor correctness", factor_correctness},
        {2, "preintegration exactness", preintegration_exactness},
        {3, "one-timestep oracle", one_timestep},
        {4, "CBC optimality", cbc_optimality},
        {5, "convergence rates", convergence_rates},
        {6, "density normalization", density_normalization},
        {7, "paper-scale smoke run", paper_scale},
        {8, "weight identities", weight_identities},
        {9, "determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d (%s): %s - %s [%.1fs]\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
