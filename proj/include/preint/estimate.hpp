#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "preint/chebyshev.hpp"
#include "preint/lattice.hpp"
#include "preint/model.hpp"
#include "preint/preintegrate.hpp"

namespace preint {

enum class Method { MC, QMC, MCPreint, QMCPreint };

std::string_view to_string(Method method) noexcept;
/// Accepts the CSV names: MC, QMC, MCPreint, QMCPreint.
Method parse_method(std::string_view name);
inline constexpr Method kAllMethods[] = {Method::MC, Method::QMC, Method::MCPreint, Method::QMCPreint};

struct Estimate {
    Method method = Method::QMCPreint;
    Target target;
    int m = 0;
    double mean = 0.0;
    double std_error = 0.0;            ///< sample standard error over shifts / groups
    int l = 0;                       ///< shifts or MC groups
    std::uint64_t n = 0;             ///< points per shift or group
    double seconds = 0.0;
    double undiscounted_mean = 0.0;  ///< mean before e^{-RT} (equal to mean unless Price)
    double discount = 1.0;
    std::vector<double> group_means; ///< per-shift means, undiscounted
};

/// Per-shift (or per-group) means and their sample statistics.
struct ReplicateStats {
    std::vector<double> means;
    double mean = 0.0;
    double std_error = 0.0;
};

ReplicateStats replicate_stats(std::vector<double> means);

/// Integrand evaluated on a block of standard normal points, one per row;
/// must write one value per row into `out`. Called concurrently for
/// different shifts, so it must not mutate shared state.
using GaussianBlockFn = std::function<void(const RowMatrix& y, std::span<double> out)>;

/// Randomly shifted lattice rule: shift i is (seed, Shift, i); points mapped
/// through the inverse normal cdf.
ReplicateStats qmc_integrate(const LatticeRule& rule, int l, std::uint64_t seed,
                             const GaussianBlockFn& f);

/// l groups of n i.i.d. standard normal points in R^dim; group i is drawn
/// from stream (seed, MonteCarlo, i) in row-major order.
ReplicateStats mc_integrate(int dim, std::uint64_t n, int l, std::uint64_t seed,
                            const GaussianBlockFn& f);

/// Preintegrated integrand P0 g over y = (y_1..y_d).
GaussianBlockFn preint_integrand(const AsianModel& model, const Target& target);
/// Direct integrand g over (y_0..y_d); Price and Cdf only.
GaussianBlockFn plain_integrand(const AsianModel& model, const Target& target);

Estimate qmc_preint_estimate(const Target& target, const AsianModel& model,
                             const LatticeRule& rule, int l, std::uint64_t seed);
Estimate mc_preint_estimate(const Target& target, const AsianModel& model, std::uint64_t n,
                            int l, std::uint64_t seed);
/// `rule` has dimension m = d + 1.
Estimate qmc_estimate(const Target& target, const AsianModel& model, const LatticeRule& rule,
                      int l, std::uint64_t seed);
Estimate mc_estimate(const Target& target, const AsianModel& model, std::uint64_t n, int l,
                     std::uint64_t seed);

/// Which lattice weights the study builds rules with.
enum class RuleWeights { Product, Pod };

struct RuleOptions {
    RuleWeights weights = RuleWeights::Product;
    double delta = 0.25;
    double c2 = 1.0;
    double x_lo = 0.0;  ///< x-range for POD constants; 0 means "use the target's x"
    double x_hi = 0.0;
    std::filesystem::path cache_dir;  ///< empty: no cache
};

/// Rule for the preintegrated methods (dimension d). Uses the cache when set.
LatticeRule preint_rule(const AsianModel& model, const Target& target, std::uint64_t n,
                        const RuleOptions& options);
/// Rule for plain QMC (dimension d + 1, product weights with gamma_0).
LatticeRule plain_rule(const AsianModel& model, std::uint64_t n, const RuleOptions& options);

using StudyProgress = std::function<void(const Estimate&)>;

/// One estimate per (n, method) in ladder-major order. MC-type methods use
/// the same L x N budget as the lattice methods. Plain methods are skipped
/// for the Pdf target.
std::vector<Estimate> convergence_study(const Target& target, const AsianModel& model,
                                        std::span<const std::uint64_t> ladder, int l,
                                        std::uint64_t seed, std::span<const Method> methods,
                                        const RuleOptions& options = {},
                                        const StudyProgress& progress = {});

struct PdfCurve {
    ChebyshevInterpolant interpolant;
    std::vector<Estimate> nodes;
};

/// QMC + preintegration pdf at node_count Chebyshev points on [x_lo, x_hi].
PdfCurve pdf_curve(const AsianModel& model, double x_lo, double x_hi, int node_count,
                   const LatticeRule& rule, int l, std::uint64_t seed);

/// Caps the worker threads used across shifts (0 = hardware concurrency).
void set_thread_limit(int threads) noexcept;
int thread_limit() noexcept;

}  // namespace preint
