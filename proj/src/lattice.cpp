#include "preint/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "preint/errors.hpp"
#include "preint/primes.hpp"
#include "preint/rng.hpp"
#include "preint/summation.hpp"

namespace preint {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

/// Cyclic convolution with a fixed first operand, r = c (*) v, length M.
class CyclicConvolver {
public:
    explicit CyclicConvolver(const std::vector<double>& c)
        : size_(c.size()),
          spectrum_len_(size_ / 2 + 1),
          real_(fftw_alloc_real(size_)),
          spec_(fftw_alloc_complex(spectrum_len_)),
          kernel_spec_(spectrum_len_) {
        {
            std::lock_guard lock(planner_mutex());
            forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), real_, spec_, FFTW_ESTIMATE);
            backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(size_), spec_, real_, FFTW_ESTIMATE);
        }
        std::copy(c.begin(), c.end(), real_);
        fftw_execute(forward_);
        for (std::size_t i = 0; i < spectrum_len_; ++i) kernel_spec_[i] = {spec_[i][0], spec_[i][1]};
    }

    CyclicConvolver(const CyclicConvolver&) = delete;
    CyclicConvolver& operator=(const CyclicConvolver&) = delete;

    ~CyclicConvolver() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    void apply(std::span<const double> v, std::span<double> out) {
        std::copy(v.begin(), v.end(), real_);
        fftw_execute(forward_);
        for (std::size_t i = 0; i < spectrum_len_; ++i) {
            const std::complex<double> p = kernel_spec_[i] * std::complex<double>(spec_[i][0], spec_[i][1]);
            spec_[i][0] = p.real();
            spec_[i][1] = p.imag();
        }
        fftw_execute(backward_);
        const double scale = 1.0 / static_cast<double>(size_);
        for (std::size_t i = 0; i < size_; ++i) out[i] = real_[i] * scale;
    }

private:
    std::size_t size_;
    std::size_t spectrum_len_;
    double* real_;
    fftw_complex* spec_;
    std::vector<std::complex<double>> kernel_spec_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

void require_prime(std::uint64_t n) {
    if (!is_prime(n)) throw DomainError("lattice modulus " + std::to_string(n) + " is not prime");
    if (n > std::numeric_limits<std::uint32_t>::max()) throw DomainError("lattice modulus too large");
}

void require_generator_entries(std::span<const std::uint32_t> z, std::uint64_t n) {
    for (auto zj : z) {
        if (zj < 1 || zj >= n) {
            throw DomainError("generating vector entry " + std::to_string(zj) + " outside [1, n-1]");
        }
    }
}

inline double lattice_coord(std::uint64_t k, std::uint64_t zj, std::uint64_t n) noexcept {
    return static_cast<double>((k * zj) % n) / static_cast<double>(n);
}

/// Candidate scores T(z) for z = 1..n-1 of sum_k omega({k z / n}) v[k].
class CandidateScorer {
public:
    CandidateScorer(std::uint64_t n, const LatticeKernel& kernel, CbcPath path)
        : n_(n), path_(path), omega_(n) {
        for (std::uint64_t k = 0; k < n; ++k) omega_[k] = kernel(static_cast<double>(k) / n);
        omega_max_ = 0.0;
        for (double w : omega_) omega_max_ = std::max(omega_max_, std::fabs(w));
        if (path_ == CbcPath::Fast && n_ > 2) {
            const std::uint64_t m = n_ - 1;
            const std::uint64_t g = primitive_root(n_);
            power_.resize(m);
            std::uint64_t p = 1;
            for (std::uint64_t j = 0; j < m; ++j) {
                power_[j] = static_cast<std::uint32_t>(p);
                p = p * g % n_;
            }
            std::vector<double> c(m);
            for (std::uint64_t j = 0; j < m; ++j) c[j] = omega_[power_[j]];
            convolver_ = std::make_unique<CyclicConvolver>(c);
            scratch_in_.resize(m);
            scratch_out_.resize(m);
        }
    }

    double omega_at(std::uint64_t k, std::uint64_t z) const noexcept { return omega_[(k * z) % n_]; }
    double omega_max() const noexcept { return omega_max_; }

    /// scores[z - 1] = sum_k omega({k z/n}) v[k].
    void score(std::span<const double> v, std::vector<double>& scores) {
        scores.assign(n_ - 1, 0.0);
        if (path_ == CbcPath::Direct || n_ <= 2) {
            for (std::uint64_t z = 1; z < n_; ++z) {
                double s = 0.0;
                for (std::uint64_t k = 0; k < n_; ++k) s += omega_at(k, z) * v[k];
                scores[z - 1] = s;
            }
            return;
        }
        const std::uint64_t m = n_ - 1;
        // v'[j] = v[g^{-j}] turns the Hankel product into a cyclic convolution.
        for (std::uint64_t j = 0; j < m; ++j) scratch_in_[j] = v[power_[(m - j) % m]];
        convolver_->apply(scratch_in_, scratch_out_);
        const double origin = omega_[0] * v[0];
        for (std::uint64_t i = 0; i < m; ++i) scores[power_[i] - 1] = scratch_out_[i] + origin;
    }

private:
    std::uint64_t n_;
    CbcPath path_;
    std::vector<double> omega_;
    double omega_max_ = 0.0;
    std::vector<std::uint32_t> power_;
    std::unique_ptr<CyclicConvolver> convolver_;
    std::vector<double> scratch_in_;
    std::vector<double> scratch_out_;
};

/// Smallest z whose score is within `tol` of the minimum.
std::uint32_t pick_candidate(const std::vector<double>& scores, double tol) {
    const double best = *std::min_element(scores.begin(), scores.end());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] <= best + tol) return static_cast<std::uint32_t>(i + 1);
    }
    return 1;
}

constexpr double kTieTolerance = 1e-12;

// Elementary symmetric sums e_0..e_d of x_1..x_d, folded into
// sum_{l>=1} Gamma_l e_l.
double pod_point_value(std::span<const double> x, const WeightSpec::PodTerm& term,
                       std::vector<double>& e) {
    const std::size_t d = x.size();
    e.assign(d + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t l = j + 1; l >= 1; --l) e[l] += x[j] * e[l - 1];
    }
    double s = 0.0;
    for (std::size_t l = 1; l <= d; ++l) s += term.order[l] * e[l];
    return s;
}

void require_finite_terms(const std::vector<WeightSpec::PodTerm>& terms) {
    for (const auto& t : terms) {
        for (double g : t.order) {
            if (!std::isfinite(g)) {
                throw DomainError("POD order weights overflow double precision; reduce d or raise c2");
            }
        }
    }
}

LatticeRule cbc_product(int d, std::uint64_t n, const WeightSpec& weights, CbcPath path,
                        const LatticeKernel& kernel) {
    const auto& gamma = weights.product_factors();
    CandidateScorer scorer(n, kernel, path);
    std::vector<double> omega_row(n);
    for (std::uint64_t k = 0; k < n; ++k) omega_row[k] = kernel(static_cast<double>(k) / n);
    const double omega_total = pairwise_sum(omega_row);

    // u[k] = prod_j (1 + gamma_j omega_j(k)) - 1, kept without the 1 so that
    // small criteria do not cancel.
    std::vector<double> u(n, 0.0);
    std::vector<double> scores;
    LatticeRule rule;
    rule.n = n;
    rule.weights = weights;
    rule.z.reserve(d);
    for (int s = 0; s < d; ++s) {
        scorer.score(u, scores);
        double scale = 0.0;
        for (double uk : u) scale += 1.0 + std::fabs(uk);
        scale *= scorer.omega_max();
        std::uint32_t zs = 1;
        if (gamma[s] > 0.0) {
            for (auto& sc : scores) sc += omega_total;
            zs = pick_candidate(scores, kTieTolerance * scale);
        }
        rule.z.push_back(zs);
        for (std::uint64_t k = 0; k < n; ++k) {
            u[k] += gamma[s] * scorer.omega_at(k, zs) * (1.0 + u[k]);
        }
    }
    rule.criterion_value = pairwise_mean(u);
    return rule;
}

LatticeRule cbc_pod(int d, std::uint64_t n, const WeightSpec& weights, CbcPath path,
                    const LatticeKernel& kernel) {
    const auto terms = weights.pod_terms();
    require_finite_terms(terms);
    CandidateScorer scorer(n, kernel, path);
    // e[t][l][k]: elementary symmetric sum of order l over the fixed prefix.
    std::vector<std::vector<std::vector<double>>> e(terms.size());
    for (auto& et : e) {
        et.assign(d + 1, std::vector<double>());
        et[0].assign(n, 1.0);
    }
    std::vector<double> v(n);
    std::vector<double> scores;
    LatticeRule rule;
    rule.n = n;
    rule.weights = weights;
    for (int s = 0; s < d; ++s) {
        std::fill(v.begin(), v.end(), 0.0);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const double beta = terms[t].dim[s];
            for (int l = 1; l <= s + 1; ++l) {
                const double g = terms[t].order[l] * beta;
                if (g == 0.0) continue;
                const auto& prev = e[t][l - 1];
                for (std::uint64_t k = 0; k < n; ++k) v[k] += g * prev[k];
            }
        }
        scorer.score(v, scores);
        double scale = 0.0;
        for (double vk : v) scale += std::fabs(vk);
        const std::uint32_t zs = pick_candidate(scores, kTieTolerance * scale * scorer.omega_max());
        rule.z.push_back(zs);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            const double beta = terms[t].dim[s];
            e[t][s + 1].assign(n, 0.0);
            for (int l = s + 1; l >= 1; --l) {
                auto& cur = e[t][l];
                const auto& prev = e[t][l - 1];
                for (std::uint64_t k = 0; k < n; ++k) cur[k] += beta * scorer.omega_at(k, zs) * prev[k];
            }
        }
    }
    std::vector<double> per_point(n, 0.0);
    for (std::uint64_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            for (int l = 1; l <= d; ++l) s += terms[t].order[l] * e[t][l][k];
        }
        per_point[k] = s;
    }
    rule.criterion_value = pairwise_mean(per_point);
    return rule;
}

}  // namespace

double bernoulli_kernel(double t) noexcept {
    return 2.0 * std::numbers::pi * std::numbers::pi * (t * t - t + 1.0 / 6.0);
}

LatticeRule LatticeRule::trivial(std::uint64_t n) {
    require_prime(n);
    LatticeRule r;
    r.n = n;
    return r;
}

double criterion(std::span<const std::uint32_t> z, std::uint64_t n, const WeightSpec& weights,
                 const LatticeKernel& kernel) {
    require_prime(n);
    require_generator_entries(z, n);
    if (weights.dim() < static_cast<int>(z.size())) {
        throw DomainError("criterion: weights cover fewer coordinates than z");
    }
    const std::size_t d = z.size();
    std::vector<double> per_point(n);
    if (weights.kind() == WeightKind::Product) {
        const auto& gamma = weights.product_factors();
        for (std::uint64_t k = 0; k < n; ++k) {
            double u = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                u += gamma[j] * kernel(lattice_coord(k, z[j], n)) * (1.0 + u);
            }
            per_point[k] = u;
        }
        return pairwise_mean(per_point);
    }
    const auto terms = weights.pod_terms();
    require_finite_terms(terms);
    std::vector<double> x(d);
    std::vector<double> e;
    for (std::uint64_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (const auto& t : terms) {
            for (std::size_t j = 0; j < d; ++j) x[j] = t.dim[j] * kernel(lattice_coord(k, z[j], n));
            WeightSpec::PodTerm head{std::vector<double>(t.order.begin(), t.order.begin() + d + 1), {}};
            s += pod_point_value(x, head, e);
        }
        per_point[k] = s;
    }
    return pairwise_mean(per_point);
}

double criterion(std::span<const std::uint32_t> z, std::uint64_t n, std::span<const double> gamma,
                 const LatticeKernel& kernel) {
    if (gamma.size() < z.size()) throw DomainError("criterion: fewer weights than coordinates");
    std::vector<double> g(gamma.begin(), gamma.begin() + static_cast<std::ptrdiff_t>(z.size()));
    for (double& x : g) {
        if (x < 0.0) throw DomainError("criterion: weights must be non-negative");
    }
    // Zero weights are allowed here; WeightSpec insists on positive factors.
    std::vector<double> per_point(n);
    require_prime(n);
    require_generator_entries(z, n);
    for (std::uint64_t k = 0; k < n; ++k) {
        double u = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            u += g[j] * kernel(lattice_coord(k, z[j], n)) * (1.0 + u);
        }
        per_point[k] = u;
    }
    return pairwise_mean(per_point);
}

LatticeRule cbc_construct(int d, std::uint64_t n, const WeightSpec& weights, CbcPath path,
                          const LatticeKernel& kernel) {
    if (d < 1) throw DomainError("cbc_construct: d must be >= 1");
    require_prime(n);
    if (n < 3) throw DomainError("cbc_construct: n must be a prime >= 3");
    if (weights.dim() < d) throw DomainError("cbc_construct: weights cover fewer than d coordinates");
    if (weights.kind() == WeightKind::Product) return cbc_product(d, n, weights, path, kernel);
    return cbc_pod(d, n, weights, path, kernel);
}

std::vector<double> cbc_candidate_criteria(std::span<const std::uint32_t> prefix,
                                           std::uint64_t n, const WeightSpec& weights,
                                           const LatticeKernel& kernel) {
    std::vector<std::uint32_t> z(prefix.begin(), prefix.end());
    z.push_back(1);
    std::vector<double> out(n - 1);
    for (std::uint64_t c = 1; c < n; ++c) {
        z.back() = static_cast<std::uint32_t>(c);
        out[c - 1] = criterion(z, n, weights, kernel);
    }
    return out;
}

void generate_point_block(const LatticeRule& rule, std::span<const double> shift,
                          std::uint64_t first, std::uint64_t count, RowMatrix& out) {
    const int d = rule.dim();
    if (static_cast<int>(shift.size()) != d) throw DomainError("generate_points: shift length != d");
    out.resize(static_cast<Eigen::Index>(count), d);
    for (std::uint64_t r = 0; r < count; ++r) {
        const std::uint64_t k = first + r;
        for (int j = 0; j < d; ++j) {
            double t = lattice_coord(k, rule.z[j], rule.n) + shift[j];
            if (t >= 1.0) t -= 1.0;
            out(static_cast<Eigen::Index>(r), j) = t;
        }
    }
}

RowMatrix generate_points(const LatticeRule& rule, std::span<const double> shift) {
    for (double s : shift) {
        if (!(s >= 0.0 && s < 1.0)) throw DomainError("generate_points: shift outside [0,1)");
    }
    RowMatrix out;
    generate_point_block(rule, shift, 0, rule.n, out);
    return out;
}

std::vector<std::vector<double>> sample_shifts(int l, int d, std::uint64_t seed) {
    if (l < 1) throw DomainError("sample_shifts: need l >= 1");
    if (d < 0) throw DomainError("sample_shifts: negative dimension");
    std::vector<std::vector<double>> shifts(l, std::vector<double>(d));
    for (int i = 0; i < l; ++i) {
        RandomStream stream(seed, StreamTag::Shift, static_cast<std::uint64_t>(i));
        for (int j = 0; j < d; ++j) shifts[i][j] = stream.uniform();
    }
    return shifts;
}

void write_rule(std::ostream& out, const LatticeRule& rule) {
    out << rule.n << ' ' << rule.dim() << '\n';
    for (int j = 0; j < rule.dim(); ++j) {
        if (j > 0) out << ' ';
        out << rule.z[j];
    }
    out << '\n';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", rule.criterion_value);
    out << buf << '\n';
}

LatticeRule read_rule(std::istream& in) {
    LatticeRule rule;
    long long n = 0;
    long long d = -1;
    if (!(in >> n >> d) || n < 2 || d < 0) throw DomainError("read_rule: bad header line");
    rule.n = static_cast<std::uint64_t>(n);
    require_prime(rule.n);
    rule.z.resize(static_cast<std::size_t>(d));
    for (auto& zj : rule.z) {
        long long v = 0;
        if (!(in >> v)) throw DomainError("read_rule: truncated generating vector");
        if (v < 1 || v >= n) throw DomainError("read_rule: entry outside [1, n-1]");
        zj = static_cast<std::uint32_t>(v);
    }
    std::string token;
    if (!(in >> token)) throw DomainError("read_rule: missing criterion value");
    try {
        rule.criterion_value = std::stod(token);
    } catch (const std::exception&) {
        throw DomainError("read_rule: unparsable criterion value '" + token + "'");
    }
    return rule;
}

std::string rule_cache_name(std::uint64_t n, int d, const WeightSpec& weights) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "gv_n%llu_d%d_w%016llx.txt", static_cast<unsigned long long>(n), d,
                  static_cast<unsigned long long>(weights.fingerprint()));
    return buf;
}

}  // namespace preint
