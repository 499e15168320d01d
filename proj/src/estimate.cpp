#include "preint/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "preint/errors.hpp"
#include "preint/normal.hpp"
#include "preint/rng.hpp"
#include "preint/summation.hpp"
#include "preint/weights.hpp"

namespace preint {
namespace {

constexpr std::uint64_t kBlockRows = 256;
// Lattice coordinate 0 only occurs without a shift; map it to 2^-64 rather than -inf.
constexpr double kZeroNudge = 0x1p-64;

std::atomic<int> g_thread_limit{0};

/// Runs body(i) for i in [0, count) on up to thread_limit() workers. Work is
/// assigned by index, so results do not depend on the worker count.
template <class Body>
void parallel_for(int count, Body&& body) {
    const int workers = std::max(1, std::min(count, thread_limit()));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void require_replicates(int l) {
    if (l < 2) throw DomainError("need l >= 2 shifts or groups for a standard error, got " + std::to_string(l));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Estimate finish(Method method, const Target& target, const AsianModel& model, ReplicateStats stats,
                int l, std::uint64_t n, std::chrono::steady_clock::time_point start) {
    Estimate e;
    e.method = method;
    e.target = target;
    e.m = model.m();
    e.l = l;
    e.n = n;
    e.undiscounted_mean = stats.mean;
    if (target.kind == TargetKind::Price) {
        const auto& p = model.params();
        e.discount = std::exp(-p.r * p.t_expiry);
    }
    e.mean = e.discount * stats.mean;
    e.std_error = e.discount * stats.std_error;
    e.group_means = std::move(stats.means);
    e.seconds = seconds_since(start);
    return e;
}

void require_supported_plain(const Target& target) {
    if (target.kind == TargetKind::Pdf) {
        throw UnsupportedTarget("plain MC/QMC cannot estimate the pdf: the integrand is a Dirac delta");
    }
}

double theory_x(const Target& target, double given) { return given > 0.0 ? given : target.x; }

WeightSpec rule_weight_spec(const AsianModel& model, const Target& target,
                            const RuleOptions& options) {
    if (options.weights == RuleWeights::Product) return product_weights(model.factor());
    const double lo = theory_x(target, options.x_lo);
    const double hi = theory_x(target, options.x_hi);
    const auto constants = make_theory_constants(model, lo, hi, options.delta, options.c2);
    return pod_weights(target.kind, constants, model.factor());
}

LatticeRule cached_rule(int d, std::uint64_t n, const WeightSpec& weights,
                        const std::filesystem::path& cache_dir) {
    if (cache_dir.empty()) return cbc_construct(d, n, weights);
    const auto path = cache_dir / rule_cache_name(n, d, weights);
    if (std::ifstream in{path}) {
        LatticeRule rule = read_rule(in);
        if (rule.n != n || rule.dim() != d) {
            throw DomainError("cache file " + path.string() + " does not match n=" + std::to_string(n) +
                              ", d=" + std::to_string(d));
        }
        rule.weights = weights;
        return rule;
    }
    LatticeRule rule = cbc_construct(d, n, weights);
    std::filesystem::create_directories(cache_dir);
    // Write-then-rename so a concurrent reader never sees a partial file.
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        write_rule(out, rule);
        if (!out) throw std::runtime_error("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
    return rule;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::MC: return "MC";
        case Method::QMC: return "QMC";
        case Method::MCPreint: return "MCPreint";
        case Method::QMCPreint: return "QMCPreint";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (Method m : kAllMethods) {
        if (to_string(m) == name) return m;
    }
    throw DomainError("unknown method '" + std::string(name) + "'");
}

void set_thread_limit(int threads) noexcept { g_thread_limit = std::max(0, threads); }

int thread_limit() noexcept {
    const int cap = g_thread_limit.load();
    if (cap > 0) return cap;
    return std::max(1u, std::thread::hardware_concurrency());
}

ReplicateStats replicate_stats(std::vector<double> means) {
    ReplicateStats s;
    s.means = std::move(means);
    const std::size_t l = s.means.size();
    s.mean = pairwise_mean(s.means);
    if (l >= 2) {
        std::vector<double> sq(l);
        for (std::size_t i = 0; i < l; ++i) sq[i] = (s.means[i] - s.mean) * (s.means[i] - s.mean);
        s.std_error = std::sqrt(pairwise_sum(sq) / (static_cast<double>(l) * (l - 1)));
    }
    return s;
}

ReplicateStats qmc_integrate(const LatticeRule& rule, int l, std::uint64_t seed,
                             const GaussianBlockFn& f) {
    require_replicates(l);
    const int d = rule.dim();
    const auto shifts = sample_shifts(l, d, seed);
    std::vector<double> means(l);
    parallel_for(l, [&](int s) {
        std::vector<double> values(rule.n);
        RowMatrix block;
        for (std::uint64_t first = 0; first < rule.n; first += kBlockRows) {
            const std::uint64_t count = std::min(kBlockRows, rule.n - first);
            generate_point_block(rule, shifts[s], first, count, block);
            for (Eigen::Index i = 0; i < block.size(); ++i) {
                double& u = block.data()[i];
                u = inverse_normal_cdf(u > 0.0 ? u : kZeroNudge);
            }
            f(block, std::span<double>(values).subspan(first, count));
        }
        means[s] = pairwise_mean(values);
    });
    return replicate_stats(std::move(means));
}

ReplicateStats mc_integrate(int dim, std::uint64_t n, int l, std::uint64_t seed,
                            const GaussianBlockFn& f) {
    require_replicates(l);
    if (n < 1) throw DomainError("mc_integrate: need n >= 1");
    if (dim < 0) throw DomainError("mc_integrate: negative dimension");
    std::vector<double> means(l);
    parallel_for(l, [&](int g) {
        RandomStream stream(seed, StreamTag::MonteCarlo, static_cast<std::uint64_t>(g));
        std::vector<double> values(n);
        RowMatrix block;
        for (std::uint64_t first = 0; first < n; first += kBlockRows) {
            const std::uint64_t count = std::min(kBlockRows, n - first);
            block.resize(static_cast<Eigen::Index>(count), dim);
            for (Eigen::Index i = 0; i < block.size(); ++i) block.data()[i] = stream.normal();
            f(block, std::span<double>(values).subspan(first, count));
        }
        means[g] = pairwise_mean(values);
    });
    return replicate_stats(std::move(means));
}

GaussianBlockFn preint_integrand(const AsianModel& model, const Target& target) {
    return [&model, target](const RowMatrix& y, std::span<double> out) {
        const RowMatrix coeff = model.section_coefficients(y);
        const auto m = static_cast<std::size_t>(model.m());
        for (Eigen::Index r = 0; r < coeff.rows(); ++r) {
            const AverageSection section(model.leading_slope(),
                                         std::span<const double>(coeff.data() + r * m, m));
            out[r] = preintegrate(section, target);
        }
    };
}

GaussianBlockFn plain_integrand(const AsianModel& model, const Target& target) {
    require_supported_plain(target);
    return [&model, target](const RowMatrix& y, std::span<double> out) {
        const RowMatrix logs = model.log_terms(y);
        for (Eigen::Index r = 0; r < logs.rows(); ++r) {
            double phi = 0.0;
            for (Eigen::Index k = 0; k < logs.cols(); ++k) phi += clamped_exp(logs(r, k));
            if (target.kind == TargetKind::Price) {
                out[r] = std::max(target.x - phi, 0.0);
            } else {
                out[r] = phi <= target.x ? 1.0 : 0.0;
            }
        }
    };
}

Estimate qmc_preint_estimate(const Target& target, const AsianModel& model,
                             const LatticeRule& rule, int l, std::uint64_t seed) {
    if (rule.dim() != model.dim()) {
        throw DomainError("qmc_preint_estimate: rule dimension " + std::to_string(rule.dim()) +
                          " != d = " + std::to_string(model.dim()));
    }
    const auto start = std::chrono::steady_clock::now();
    auto stats = qmc_integrate(rule, l, seed, preint_integrand(model, target));
    return finish(Method::QMCPreint, target, model, std::move(stats), l, rule.n, start);
}

Estimate mc_preint_estimate(const Target& target, const AsianModel& model, std::uint64_t n,
                            int l, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    auto stats = mc_integrate(model.dim(), n, l, seed, preint_integrand(model, target));
    return finish(Method::MCPreint, target, model, std::move(stats), l, n, start);
}

Estimate qmc_estimate(const Target& target, const AsianModel& model, const LatticeRule& rule,
                      int l, std::uint64_t seed) {
    require_supported_plain(target);
    if (rule.dim() != model.m()) {
        throw DomainError("qmc_estimate: rule dimension " + std::to_string(rule.dim()) +
                          " != m = " + std::to_string(model.m()));
    }
    const auto start = std::chrono::steady_clock::now();
    auto stats = qmc_integrate(rule, l, seed, plain_integrand(model, target));
    return finish(Method::QMC, target, model, std::move(stats), l, rule.n, start);
}

Estimate mc_estimate(const Target& target, const AsianModel& model, std::uint64_t n, int l,
                     std::uint64_t seed) {
    require_supported_plain(target);
    const auto start = std::chrono::steady_clock::now();
    auto stats = mc_integrate(model.m(), n, l, seed, plain_integrand(model, target));
    return finish(Method::MC, target, model, std::move(stats), l, n, start);
}

LatticeRule preint_rule(const AsianModel& model, const Target& target, std::uint64_t n,
                        const RuleOptions& options) {
    if (model.dim() == 0) return LatticeRule::trivial(n);
    return cached_rule(model.dim(), n, rule_weight_spec(model, target, options), options.cache_dir);
}

LatticeRule plain_rule(const AsianModel& model, std::uint64_t n, const RuleOptions& options) {
    return cached_rule(model.m(), n, full_product_weights(model.factor()), options.cache_dir);
}

std::vector<Estimate> convergence_study(const Target& target, const AsianModel& model,
                                        std::span<const std::uint64_t> ladder, int l,
                                        std::uint64_t seed, std::span<const Method> methods,
                                        const RuleOptions& options, const StudyProgress& progress) {
    if (ladder.empty()) throw DomainError("convergence_study: empty ladder");
    require_replicates(l);
    std::vector<Estimate> rows;
    for (std::uint64_t n : ladder) {
        for (Method method : methods) {
            const bool plain = method == Method::MC || method == Method::QMC;
            if (plain && target.kind == TargetKind::Pdf) continue;
            Estimate e;
            switch (method) {
                case Method::MC: e = mc_estimate(target, model, n, l, seed); break;
                case Method::MCPreint: e = mc_preint_estimate(target, model, n, l, seed); break;
                case Method::QMC: {
                    const auto start = std::chrono::steady_clock::now();
                    e = qmc_estimate(target, model, plain_rule(model, n, options), l, seed);
                    e.seconds = seconds_since(start);
                    break;
                }
                case Method::QMCPreint: {
                    const auto start = std::chrono::steady_clock::now();
                    e = qmc_preint_estimate(target, model, preint_rule(model, target, n, options), l, seed);
                    e.seconds = seconds_since(start);
                    break;
                }
            }
            if (progress) progress(e);
            rows.push_back(std::move(e));
        }
    }
    return rows;
}

PdfCurve pdf_curve(const AsianModel& model, double x_lo, double x_hi, int node_count,
                   const LatticeRule& rule, int l, std::uint64_t seed) {
    const auto xs = ChebyshevInterpolant::nodes(x_lo, x_hi, node_count);
    std::vector<Estimate> nodes;
    std::vector<double> values;
    nodes.reserve(xs.size());
    for (double x : xs) {
        nodes.push_back(qmc_preint_estimate(Target::pdf(x), model, rule, l, seed));
        values.push_back(nodes.back().mean);
    }
    return {ChebyshevInterpolant(x_lo, x_hi, std::move(values)), std::move(nodes)};
}

}  // namespace preint
