#include "preint/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "preint/errors.hpp"
#include "preint/estimate.hpp"
#include "preint/primes.hpp"
#include "preint/report.hpp"

namespace preint {
namespace {

/// Raised for bad argument values; mapped to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    MarketParams market;
    std::uint64_t n = 16001;
    std::string ladder = "paper";
    int l = 32;
    std::uint64_t seed = 1;
    std::string target = "price";
    double x = 100.0;
    double x_lo = 70.0;
    double x_hi = 150.0;
    int nodes = 30;
    std::string weights = "product";
    double delta = 0.25;
    double c2 = 1.0;
    std::string out;
    std::string format = "auto";
    int threads = 0;
    std::string gv_cache;
    std::string method = "QMCPreint";
    std::string methods = "MC,QMC,MCPreint,QMCPreint";
    bool timing = false;
    bool plain = false;
};

void add_market(CLI::App* app, Options& o) {
    app->add_option("--s0", o.market.s0, "initial asset price S0 (currency)")->capture_default_str();
    app->add_option("--r", o.market.r, "risk-free rate R (per unit time, continuous)")->capture_default_str();
    app->add_option("--sigma", o.market.sigma, "volatility (per sqrt unit time)")->capture_default_str();
    app->add_option("--t", o.market.t_expiry, "expiry T (time units)")->capture_default_str();
    app->add_option("--strike", o.market.strike, "strike K of the put (currency)")->capture_default_str();
    app->add_option("--m", o.market.m, "number of time steps, d + 1 (count)")->capture_default_str();
}

void add_run_flags(CLI::App* app, Options& o) {
    app->add_option("--l", o.l, "random shifts / MC groups L (count, >= 2)")->capture_default_str();
    app->add_option("--seed", o.seed, "RNG seed (integer)")->capture_default_str();
    app->add_option("--weights", o.weights, "lattice weights: product | pod")
        ->check(CLI::IsMember({"product", "pod"}))
        ->capture_default_str();
    app->add_option("--delta", o.delta, "POD weight parameter delta in (0, 1/2)")->capture_default_str();
    app->add_option("--c2", o.c2, "POD scale constant C2 (> 0, placeholder)")->capture_default_str();
    app->add_option("--gv-cache", o.gv_cache, "generating-vector cache directory (empty: none)")
        ->capture_default_str();
    app->add_option("--threads", o.threads, "worker thread cap (0: all cores)")->capture_default_str();
    app->add_option("--out", o.out, "output file (empty: stdout)")->capture_default_str();
    app->add_option("--format", o.format, "output format: csv | json | auto")
        ->check(CLI::IsMember({"csv", "json", "auto"}))
        ->capture_default_str();
    app->add_flag("--timing", o.timing, "write measured wall time in the seconds column (default 0)");
}

void add_n(CLI::App* app, Options& o) {
    app->add_option("--n", o.n, "lattice points per shift N (prime)")->capture_default_str();
}

void add_method(CLI::App* app, Options& o) {
    app->add_option("--method", o.method, "estimator: MC | QMC | MCPreint | QMCPreint")
        ->check(CLI::IsMember({"MC", "QMC", "MCPreint", "QMCPreint"}))
        ->capture_default_str();
}

void require_prime_flag(std::uint64_t n, const char* flag) {
    if (n < 3 || !is_prime(n)) throw UsageError(std::string(flag) + ": " + std::to_string(n) + " is not a prime >= 3");
}

void validate(const Options& o) {
    if (o.l < 2) throw UsageError("--l: need at least 2 shifts, got " + std::to_string(o.l));
    if (o.threads < 0) throw UsageError("--threads: must be >= 0");
    try {
        o.market.validate();
    } catch (const DomainError& e) {
        throw UsageError(std::string("market parameters (--s0/--sigma/--t/--m): ") + e.what());
    }
    if (o.weights == "pod" && !(o.delta > 0.0 && o.delta < 0.5)) throw UsageError("--delta: must lie in (0, 1/2)");
    if (o.weights == "pod" && !(o.c2 > 0.0)) throw UsageError("--c2: must be positive");
}

RuleOptions rule_options(const Options& o, const Target& target) {
    RuleOptions r;
    r.weights = o.weights == "pod" ? RuleWeights::Pod : RuleWeights::Product;
    r.delta = o.delta;
    r.c2 = o.c2;
    r.x_lo = target.x;
    r.x_hi = target.x;
    r.cache_dir = o.gv_cache;
    return r;
}

Target make_target(const std::string& kind, const Options& o) {
    const TargetKind k = parse_target_kind(kind);
    return k == TargetKind::Price ? Target::price(o.market.strike) : Target{k, o.x};
}

/// Writes to --out when given, else to `out`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw UsageError("--out: cannot open '" + path + "' for writing");
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

void emit(const Options& o, std::span<const Estimate> rows, bool csv_default, std::ostream& out) {
    const bool csv = o.format == "csv" || (o.format == "auto" && csv_default);
    Sink sink(o.out, out);
    if (csv) {
        write_csv(sink.get(), rows, o.timing);
    } else if (rows.size() == 1) {
        sink.get() << to_json(rows.front(), o.timing).dump(2) << '\n';
    } else {
        sink.get() << to_json(rows, o.timing).dump(2) << '\n';
    }
    if (!sink.get()) throw std::runtime_error("write failed");
}

Estimate single_estimate(const Options& o, const Target& target) {
    require_prime_flag(o.n, "--n");
    const AsianModel model(o.market);
    const Method method = parse_method(o.method);
    const auto ropt = rule_options(o, target);
    switch (method) {
        case Method::MC: return mc_estimate(target, model, o.n, o.l, o.seed);
        case Method::MCPreint: return mc_preint_estimate(target, model, o.n, o.l, o.seed);
        case Method::QMC: return qmc_estimate(target, model, plain_rule(model, o.n, ropt), o.l, o.seed);
        case Method::QMCPreint: break;
    }
    return qmc_preint_estimate(target, model, preint_rule(model, target, o.n, ropt), o.l, o.seed);
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(parse_method(item));
        } catch (const DomainError& e) {
            throw UsageError(std::string("--methods: ") + e.what());
        }
    }
    if (out.empty()) throw UsageError("--methods: empty list");
    return out;
}

int dispatch(CLI::App& app, Options& o, std::ostream& out, std::ostream& err) {
    validate(o);
    set_thread_limit(o.threads);
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "price" || name == "cdf" || name == "pdf") {
        if (o.method == "MC" || o.method == "QMC") {
            if (name == "pdf") throw UsageError("--method: plain " + o.method + " cannot estimate the pdf");
        }
        const Estimate e = single_estimate(o, make_target(name, o));
        emit(o, std::span(&e, 1), false, out);
        return 0;
    }
    if (name == "study") {
        std::vector<std::uint64_t> ladder;
        try {
            ladder = parse_ladder(o.ladder);
        } catch (const DomainError& e) {
            throw UsageError(std::string("--ladder: ") + e.what());
        }
        const auto methods = parse_methods(o.methods);
        const Target target = make_target(o.target, o);
        const AsianModel model(o.market);
        const auto rows = convergence_study(target, model, ladder, o.l, o.seed, methods,
                                            rule_options(o, target), [&](const Estimate& e) {
                                                err << to_string(e.method) << " N=" << e.n
                                                    << " mean=" << format_real(e.mean)
                                                    << " stderr=" << format_real(e.std_error) << '\n';
                                            });
        emit(o, rows, true, out);
        return 0;
    }
    if (name == "curve") {
        require_prime_flag(o.n, "--n");
        if (!(o.x_lo > 0.0 && o.x_lo < o.x_hi)) throw UsageError("--x-lo/--x-hi: need 0 < x-lo < x-hi");
        if (o.nodes < 2) throw UsageError("--nodes: need at least 2 nodes");
        const AsianModel model(o.market);
        Options mid = o;
        const Target centre = Target::pdf(0.5 * (o.x_lo + o.x_hi));
        auto ropt = rule_options(mid, centre);
        ropt.x_lo = o.x_lo;
        ropt.x_hi = o.x_hi;
        const auto rule = preint_rule(model, centre, o.n, ropt);
        const auto curve = pdf_curve(model, o.x_lo, o.x_hi, o.nodes, rule, o.l, o.seed);
        err << "integral over [" << format_real(o.x_lo) << ", " << format_real(o.x_hi)
            << "] = " << format_real(curve.interpolant.integral()) << '\n';
        emit(o, curve.nodes, true, out);
        return 0;
    }
    // cbc
    require_prime_flag(o.n, "--n");
    if (o.gv_cache.empty()) throw UsageError("--gv-cache: cbc needs a cache directory");
    const AsianModel model(o.market);
    const Target target = make_target(o.target, o);
    const auto ropt = rule_options(o, target);
    const auto rule = o.plain ? plain_rule(model, o.n, ropt) : preint_rule(model, target, o.n, ropt);
    out << (std::filesystem::path(o.gv_cache) / rule_cache_name(rule.n, rule.dim(), rule.weights)).string()
        << '\n';
    return 0;
}

}  // namespace

std::vector<std::uint64_t> parse_ladder(std::string_view spec) {
    if (spec == "paper") return {std::begin(kPaperLadder), std::end(kPaperLadder)};
    if (spec == "desk") return {std::begin(kPaperLadder), std::begin(kPaperLadder) + kDeskLadderSize};
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = std::min(spec.find(',', pos), spec.size());
        const auto item = spec.substr(pos, comma - pos);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw DomainError("'" + std::string(item) + "' is not an integer");
        }
        if (v < 3 || !is_prime(v)) throw DomainError(std::to_string(v) + " is not a prime >= 3");
        out.push_back(v);
        pos = comma + 1;
    }
    if (out.empty()) throw DomainError("empty ladder");
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Asian option price, cdf and pdf by preintegration and randomly shifted lattice rules"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    for (const char* name : {"price", "cdf", "pdf"}) {
        const std::string what = std::string(name) == "price" ? "discounted Asian put price"
                                 : std::string(name) == "cdf" ? "cdf of the average price at x"
                                                              : "pdf of the average price at x";
        auto* sub = app.add_subcommand(name, "estimate the " + what);
        add_market(sub, o);
        add_n(sub, o);
        add_run_flags(sub, o);
        add_method(sub, o);
        if (std::string(name) != "price") {
            sub->add_option("--x", o.x, "evaluation point x (currency, > 0 for a nonzero result)")
                ->capture_default_str();
        }
    }

    auto* study = app.add_subcommand("study", "convergence study over a ladder of N");
    add_market(study, o);
    add_run_flags(study, o);
    study->add_option("--ladder", o.ladder, "N values: paper | desk | comma-separated primes")->capture_default_str();
    study->add_option("--target", o.target, "price | cdf | pdf")
        ->check(CLI::IsMember({"price", "cdf", "pdf"}))
        ->capture_default_str();
    study->add_option("--x", o.x, "evaluation point for cdf/pdf (currency)")->capture_default_str();
    study->add_option("--methods", o.methods, "comma-separated estimators")->capture_default_str();

    auto* curve = app.add_subcommand("curve", "pdf at Chebyshev nodes on [x-lo, x-hi]");
    add_market(curve, o);
    add_n(curve, o);
    add_run_flags(curve, o);
    curve->add_option("--x-lo", o.x_lo, "left end of the x interval (currency)")->capture_default_str();
    curve->add_option("--x-hi", o.x_hi, "right end of the x interval (currency)")->capture_default_str();
    curve->add_option("--nodes", o.nodes, "Chebyshev node count (>= 2)")->capture_default_str();

    auto* cbc = app.add_subcommand("cbc", "construct a generating vector and write it to the cache");
    add_market(cbc, o);
    add_n(cbc, o);
    add_run_flags(cbc, o);
    cbc->add_option("--target", o.target, "target whose POD weights are used (price | cdf | pdf)")
        ->check(CLI::IsMember({"price", "cdf", "pdf"}))
        ->capture_default_str();
    cbc->add_option("--x", o.x, "x used for POD constants (currency)")->capture_default_str();
    cbc->add_flag("--plain", o.plain, "rule of dimension m for plain QMC instead of m - 1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        return dispatch(app, o, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace preint
