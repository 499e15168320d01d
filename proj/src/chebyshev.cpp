#include "preint/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "preint/errors.hpp"

namespace preint {

std::vector<double> ChebyshevInterpolant::nodes(double lo, double hi, int count) {
    if (!(lo < hi)) throw DomainError("Chebyshev nodes need lo < hi");
    if (count < 2) throw DomainError("Chebyshev nodes need count >= 2");
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const int n = count - 1;
    std::vector<double> x(count);
    for (int j = 0; j <= n; ++j) {
        // sin form keeps the nodes exactly symmetric about mid
        x[j] = mid + half * std::sin(std::numbers::pi * (n - 2 * j) / (2.0 * n));
    }
    x.front() = hi;
    x.back() = lo;
    return x;
}

ChebyshevInterpolant::ChebyshevInterpolant(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), f_(std::move(values)) {
    x_ = nodes(lo, hi, static_cast<int>(f_.size()));
    w_.resize(f_.size());
    for (std::size_t j = 0; j < w_.size(); ++j) w_[j] = (j % 2 == 0) ? 1.0 : -1.0;
    w_.front() *= 0.5;
    w_.back() *= 0.5;
}

double ChebyshevInterpolant::operator()(double x) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < x_.size(); ++j) {
        const double dx = x - x_[j];
        if (dx == 0.0) return f_[j];
        const double t = w_[j] / dx;
        num += t * f_[j];
        den += t;
    }
    return num / den;
}

double ChebyshevInterpolant::integral() const {
    const int n = static_cast<int>(x_.size()) - 1;
    double total = 0.0;
    for (int j = 0; j <= n; ++j) {
        double s = 0.0;
        for (int k = 1; 2 * k <= n; ++k) {
            const double b = (2 * k == n) ? 1.0 : 2.0;
            s += b / (4.0 * k * k - 1.0) * std::cos(2.0 * k * j * std::numbers::pi / n);
        }
        const double c = (j == 0 || j == n) ? 1.0 : 2.0;
        total += c / n * (1.0 - s) * f_[j];
    }
    return 0.5 * (hi_ - lo_) * total;
}

}  // namespace preint
