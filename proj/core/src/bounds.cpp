#include "grnbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace grnbounds {

GaussianFinalData::GaussianFinalData(std::vector<double> slope, std::vector<double> offset)
    : c_(std::move(slope)), b_(std::move(offset)) {
    if (c_.empty() || c_.size() != b_.size())
        throw std::invalid_argument("GaussianFinalData: c and b must be non-empty and equally long");
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (!(c_[i] > 0.0) || !std::isfinite(c_[i]))
            throw std::invalid_argument("GaussianFinalData: c_" + std::to_string(i + 1) + " must be > 0");
        if (!(b_[i] > 0.0) || !std::isfinite(b_[i]))
            throw std::invalid_argument("GaussianFinalData: b_" + std::to_string(i + 1) + " must be > 0");
    }
}

double GaussianFinalData::slope_norm() const noexcept {
    double s = 0.0;
    for (double v : c_) s += v * v;
    return std::sqrt(s);
}

DerivativeBounds::DerivativeBounds(Matrix lower, Matrix upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    const std::size_t n = lower_.rows();
    if (n == 0 || lower_.cols() != n || upper_.rows() != n || upper_.cols() != n)
        throw std::invalid_argument("DerivativeBounds: gamma and Gamma must be matching square matrices");
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double g = lower_(i, k);
            if (!(g >= 0.0) || !(g <= upper_(i, k)))
                throw std::invalid_argument("DerivativeBounds: need 0 <= gamma <= Gamma entrywise");
            row_max = std::max(row_max, g);
        }
        if (!(row_max > 0.0))
            throw std::invalid_argument("DerivativeBounds: row " + std::to_string(i + 1) +
                                        " of gamma is identically zero");
    }
}

DerivativeBounds DerivativeBounds::from_final_data(const GaussianFinalData& fd) {
    auto d = Matrix::diagonal(fd.slope());
    return DerivativeBounds(d, d);
}

DensityEnvelope make_envelope(double lower_variance, double upper_variance, double mean,
                              double abs_dev) {
    if (!(lower_variance > 0.0)) throw std::invalid_argument("envelope: lambda must be > 0");
    if (!(upper_variance >= lower_variance))
        throw std::invalid_argument("envelope: Lambda < lambda (inconsistent derivative bounds)");
    if (!std::isfinite(upper_variance) || !std::isfinite(mean))
        throw std::invalid_argument("envelope: non-finite input");
    if (!(abs_dev >= 0.0)) throw std::invalid_argument("envelope: abs_dev must be >= 0");
    return {lower_variance, upper_variance, mean, abs_dev};
}

bool off_diagonal_nonpositive(const GeneNetwork& net) {
    const auto& a = net.regulation();
    for (std::size_t i = 0; i < net.size(); ++i)
        for (std::size_t j = 0; j < net.size(); ++j)
            if (i != j && a(i, j) > 0.0) return false;
    return true;
}

std::vector<double> p_exponents(const GeneNetwork& net) {
    const std::size_t n = net.size();
    const auto& a = net.regulation();
    const auto nu = net.max_synthesis();
    const auto rho = net.degradation();
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != j) off += nu[i] * std::abs(a(i, j)) / 4.0;
        p[j] = off + std::max(rho[j], std::abs(a(j, j) * nu[j] / 4.0 - rho[j]));
    }
    return p;
}

double lower_variance_proxy(const GeneNetwork& net, const DerivativeBounds& db, std::size_t gene,
                            const TimeWindow& window) {
    if (db.size() != net.size()) throw std::invalid_argument("derivative bounds: dimension mismatch");
    if (gene >= net.size()) throw std::invalid_argument("lower_variance_proxy: gene out of range");
    double gamma_sq = 0.0;
    for (double g : db.lower().row(gene)) gamma_sq += g * g;

    const double a_ii = net.regulation()(gene, gene);
    double exponent = net.degradation()[gene];
    if (a_ii > 0.0) exponent -= a_ii * net.max_synthesis()[gene] / 4.0;
    return gamma_sq * window.time * std::exp(2.0 * window.remaining() * exponent);
}

double upper_variance_proxy(const GeneNetwork& net, const DerivativeBounds& db,
                            const TimeWindow& window) {
    const std::size_t n = net.size();
    if (db.size() != n) throw std::invalid_argument("derivative bounds: dimension mismatch");
    double column_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += db.upper()(i, k);
        column_sq += col * col;
    }
    const auto p = p_exponents(net);
    const double p_max = *std::max_element(p.begin(), p.end());
    return window.time * column_sq * std::exp(2.0 * window.remaining() * p_max);
}

DensityBand density_bounds(const DensityEnvelope& env, double x) {
    const auto& e = make_envelope(env.lower_variance, env.upper_variance, env.mean, env.abs_dev);
    const double d2 = (x - e.mean) * (x - e.mean);
    return {
        e.abs_dev / (2.0 * e.upper_variance) * std::exp(-d2 / (2.0 * e.lower_variance)),
        e.abs_dev / (2.0 * e.lower_variance) * std::exp(-d2 / (2.0 * e.upper_variance)),
    };
}

double tail_bound(const DensityEnvelope& env, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("tail_bound: x must be > 0");
    if (!(env.upper_variance > 0.0)) throw std::invalid_argument("tail_bound: Lambda must be > 0");
    return std::exp(-x * x / (2.0 * env.upper_variance));
}

double prediction_halfwidth(double upper_variance, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("prediction_halfwidth: alpha must lie in (0, 1)");
    if (!(upper_variance > 0.0))
        throw std::invalid_argument("prediction_halfwidth: Lambda must be > 0");
    return std::sqrt(2.0 * upper_variance * std::log(2.0 / (1.0 - alpha)));
}

double positivity_bound(const DensityEnvelope& env) {
    if (!(env.mean > 0.0))
        throw std::invalid_argument("positivity_bound: mean must be > 0 for the bound to be meaningful");
    if (!(env.upper_variance > 0.0)) throw std::invalid_argument("positivity_bound: Lambda must be > 0");
    return std::exp(-env.mean * env.mean / (2.0 * env.upper_variance));
}

bool has_suppressed_gene_shape(const GeneNetwork& net) {
    const auto& a = net.regulation();
    const std::size_t n = net.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a(i, i) > 0.0)) return false;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (i == 0) {
                if (!(a(0, j) <= 0.0)) return false;
            } else if (a(i, j) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

SuppressedGeneBounds suppressed_gene_bounds(const GeneNetwork& net, const GaussianFinalData& fd,
                                            const TimeWindow& window) {
    if (fd.size() != net.size()) throw std::invalid_argument("final data: dimension mismatch");
    if (!has_suppressed_gene_shape(net)) {
        throw std::invalid_argument(
            "suppressed-gene bounds need A_1k <= 0 (k >= 2), A_ii > 0 and A_ij = 0 otherwise");
    }
    const double tau = window.remaining();
    const auto& a = net.regulation();
    const auto nu = net.max_synthesis();
    const auto rho = net.degradation();
    const auto c = fd.slope();

    SuppressedGeneBounds out;
    out.lower_derivative = c[0] * std::exp((rho[0] - nu[0] * a(0, 0) / 4.0) * tau);

    double sum_sq = c[0] * c[0];
    for (std::size_t k = 1; k < net.size(); ++k) {
        const double kappa = nu[0] * std::abs(a(0, k)) * c[k] / 4.0 * std::exp(rho[k] * tau) * tau;
        out.cross_terms.push_back(kappa);
        sum_sq += kappa * kappa;
    }
    out.upper_derivative = std::exp(rho[0] * tau) * std::sqrt(sum_sq);
    out.lower_variance = window.time * out.lower_derivative * out.lower_derivative;
    out.upper_variance = window.time * out.upper_derivative * out.upper_derivative;
    return out;
}

}  // namespace grnbounds
