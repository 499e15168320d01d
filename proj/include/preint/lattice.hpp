#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "preint/model.hpp"
#include "preint/weight_spec.hpp"

namespace preint {

/// Shift-invariant kernel omega(t) on [0,1). The default is 2 pi^2 B_2(t),
/// the reproducing-kernel term of the unanchored Sobolev space of order one.
using LatticeKernel = std::function<double(double)>;

double bernoulli_kernel(double t) noexcept;

/// Rank-1 lattice rule {k z / n}, n prime.
struct LatticeRule {
    std::uint64_t n = 0;
    std::vector<std::uint32_t> z;
    double criterion_value = 0.0;  ///< shift-averaged squared worst-case error at construction
    WeightSpec weights;

    int dim() const noexcept { return static_cast<int>(z.size()); }

    /// Zero-dimensional rule: every point is the empty vector.
    static LatticeRule trivial(std::uint64_t n);
};

/// Shift-averaged squared worst-case error
///   E^2(z) = (1/n) sum_k sum_{u != {}} gamma_u prod_{j in u} omega({k z_j / n}).
/// Product weights use the product form; POD weights go through elementary
/// symmetric sums (multi-component specs use their POD majorant).
double criterion(std::span<const std::uint32_t> z, std::uint64_t n, const WeightSpec& weights,
                 const LatticeKernel& kernel = bernoulli_kernel);

/// Product-weight shorthand.
double criterion(std::span<const std::uint32_t> z, std::uint64_t n, std::span<const double> gamma,
                 const LatticeKernel& kernel = bernoulli_kernel);

enum class CbcPath {
    Fast,    ///< circulant structure + FFT, O(d n log n)
    Direct,  ///< explicit matrix-vector products, O(d n^2)
};

/// Component-by-component construction: z_s minimises the criterion of the
/// first s coordinates with z_1..z_{s-1} fixed; ties go to the smallest z_s.
LatticeRule cbc_construct(int d, std::uint64_t n, const WeightSpec& weights,
                          CbcPath path = CbcPath::Fast,
                          const LatticeKernel& kernel = bernoulli_kernel);

/// Criterion of every candidate z_s at one CBC step, indexed by z_s - 1,
/// given the already fixed prefix. Used to check CBC choices exhaustively.
std::vector<double> cbc_candidate_criteria(std::span<const std::uint32_t> prefix,
                                           std::uint64_t n, const WeightSpec& weights,
                                           const LatticeKernel& kernel = bernoulli_kernel);

/// frac(k z / n + shift), row k of the returned n x d matrix.
RowMatrix generate_points(const LatticeRule& rule, std::span<const double> shift);

/// Rows [first, first + count) of generate_points, written into `out`.
void generate_point_block(const LatticeRule& rule, std::span<const double> shift,
                          std::uint64_t first, std::uint64_t count, RowMatrix& out);

/// l independent uniform shifts in [0,1)^d; shift i uses stream (seed, Shift, i).
std::vector<std::vector<double>> sample_shifts(int l, int d, std::uint64_t seed);

/// Generating-vector cache file: "n d", then z, then the criterion with 17
/// significant digits.
void write_rule(std::ostream& out, const LatticeRule& rule);
LatticeRule read_rule(std::istream& in);
std::string rule_cache_name(std::uint64_t n, int d, const WeightSpec& weights);

}  // namespace preint
