#pragma once

#include <vector>

namespace preint {

/// Polynomial interpolant on Chebyshev points of the second kind mapped to
/// [lo, hi], evaluated with the barycentric formula.
class ChebyshevInterpolant {
public:
    /// x_j = mid + half * cos(j pi / (count - 1)), j = 0..count-1 (descending).
    static std::vector<double> nodes(double lo, double hi, int count);

    ChebyshevInterpolant(double lo, double hi, std::vector<double> values);

    double operator()(double x) const;
    /// Exact integral of the interpolant over [lo, hi] (Clenshaw-Curtis).
    double integral() const;

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    const std::vector<double>& node_points() const noexcept { return x_; }
    const std::vector<double>& values() const noexcept { return f_; }

private:
    double lo_;
    double hi_;
    std::vector<double> x_;
    std::vector<double> f_;
    std::vector<double> w_;
};

}  // namespace preint
