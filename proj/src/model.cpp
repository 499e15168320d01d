#include "preint/model.hpp"

#include <numbers>
#include <string>

#include "preint/errors.hpp"

namespace preint {

void MarketParams::validate() const {
    if (!(s0 > 0.0) || !std::isfinite(s0)) throw DomainError("s0 must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
    if (!(t_expiry > 0.0) || !std::isfinite(t_expiry)) throw DomainError("t_expiry must be positive");
    if (!std::isfinite(r)) throw DomainError("r must be finite");
    if (!std::isfinite(strike)) throw DomainError("strike must be finite");
    if (m < 1) throw DomainError("m must be >= 1, got " + std::to_string(m));
}

BrownianFactor pca_factor(const MarketParams& params) {
    params.validate();
    const int m = params.m;
    const int d = m - 1;
    const double two_d3 = 2.0 * d + 3.0;

    BrownianFactor f;
    f.tau_d = std::sqrt(params.t_expiry / (static_cast<double>(m) * two_d3));
    f.chi.resize(m);
    f.lambda.resize(m);
    for (int i = 0; i < m; ++i) {
        f.chi[i] = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * two_d3);
        f.lambda[i] = params.sigma * f.tau_d * two_d3 / (2.0 * i + 1.0);
    }
    f.a.resize(m, m);
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < m; ++i) {
            f.a(k, i) = f.tau_d * std::sin(2.0 * (k + 1) * f.chi[i]) / std::sin(f.chi[i]);
        }
    }
    const double drift = params.r - 0.5 * params.sigma * params.sigma;
    double z = 0.0;
    for (int k = 0; k < m; ++k) {
        z += params.s0 * std::exp(drift * (k + 1) * params.t_expiry / m);
    }
    f.z_mean = z / m;
    return f;
}

double AverageSection::value(double y0) const noexcept {
    double sum = 0.0;
    for (std::size_t k = 0; k < slope_.size(); ++k) {
        sum += clamped_exp(log_coeff_[k] + slope_[k] * y0);
    }
    return sum;
}

AverageSection::Value AverageSection::value_and_slope(double y0) const noexcept {
    double sum = 0.0;
    double dsum = 0.0;
    for (std::size_t k = 0; k < slope_.size(); ++k) {
        const double term = clamped_exp(log_coeff_[k] + slope_[k] * y0);
        sum += term;
        dsum += slope_[k] * term;
    }
    return {sum, dsum};
}

AsianModel::AsianModel(const MarketParams& params)
    : params_(params), factor_(pca_factor(params)) {
    const int m = params_.m;
    sigma_a_ = params_.sigma * factor_.a;
    sigma_a_tail_t_ = sigma_a_.rightCols(m - 1).transpose();
    leading_slope_.resize(m);
    log_base_.resize(m);
    const double drift = params_.r - 0.5 * params_.sigma * params_.sigma;
    const double log_share = std::log(params_.s0 / m);
    for (int k = 0; k < m; ++k) {
        leading_slope_[k] = sigma_a_(k, 0);
        log_base_[k] = log_share + drift * (k + 1) * params_.t_expiry / m;
    }
}

double AsianModel::phi(std::span<const double> y) const {
    if (static_cast<int>(y.size()) != m()) {
        throw DomainError("phi: expected " + std::to_string(m()) + " coordinates");
    }
    double sum = 0.0;
    for (int k = 0; k < m(); ++k) {
        double e = log_base_[k];
        for (int i = 0; i < m(); ++i) e += sigma_a_(k, i) * y[i];
        sum += clamped_exp(e);
    }
    return sum;
}

double AsianModel::dphi(std::span<const int> eta, std::span<const double> y) const {
    if (static_cast<int>(y.size()) != m() || static_cast<int>(eta.size()) != m()) {
        throw DomainError("dphi: expected " + std::to_string(m()) + " coordinates");
    }
    for (int e : eta) {
        if (e < 0) throw DomainError("dphi: multi-index entries must be >= 0");
    }
    double sum = 0.0;
    for (int k = 0; k < m(); ++k) {
        double e = log_base_[k];
        double weight = 1.0;
        for (int i = 0; i < m(); ++i) {
            e += sigma_a_(k, i) * y[i];
            for (int p = 0; p < eta[i]; ++p) weight *= sigma_a_(k, i);
        }
        sum += weight * clamped_exp(e);
    }
    return sum;
}

void AsianModel::section_coefficients(std::span<const double> tail, std::span<double> out) const {
    const int d = dim();
    if (static_cast<int>(tail.size()) != d || static_cast<int>(out.size()) != m()) {
        throw DomainError("section_coefficients: size mismatch");
    }
    for (int k = 0; k < m(); ++k) {
        double e = log_base_[k];
        for (int i = 0; i < d; ++i) e += sigma_a_(k, i + 1) * tail[i];
        out[k] = e;
    }
}

RowMatrix AsianModel::section_coefficients(const RowMatrix& tails) const {
    if (tails.cols() != dim()) throw DomainError("section_coefficients: tail width != d");
    RowMatrix out(tails.rows(), m());
    if (dim() > 0) {
        out.noalias() = tails * sigma_a_tail_t_;
    } else {
        out.setZero();
    }
    const Eigen::Map<const Eigen::RowVectorXd> base(log_base_.data(), m());
    out.rowwise() += base;
    return out;
}

RowMatrix AsianModel::log_terms(const RowMatrix& points) const {
    if (points.cols() != m()) throw DomainError("log_terms: point width != m");
    RowMatrix out(points.rows(), m());
    out.noalias() = points * sigma_a_.transpose();
    const Eigen::Map<const Eigen::RowVectorXd> base(log_base_.data(), m());
    out.rowwise() += base;
    return out;
}

}  // namespace preint
