#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "grnbounds/matrix.hpp"
#include "grnbounds/model.hpp"

namespace grnbounds {

/// Final data eta_T = c * B_T + b, componentwise. All c_i, b_i > 0.
class GaussianFinalData {
public:
    GaussianFinalData(std::vector<double> slope, std::vector<double> offset);

    std::size_t size() const noexcept { return c_.size(); }
    std::span<const double> slope() const noexcept { return c_; }
    std::span<const double> offset() const noexcept { return b_; }

    /// Euclidean norm |c|.
    double slope_norm() const noexcept;

    friend bool operator==(const GaussianFinalData&, const GaussianFinalData&) = default;

private:
    std::vector<double> c_;
    std::vector<double> b_;
};

/// Constant bounds gamma_ik <= d h^i / d x_k <= Gamma_ik on the final-data map.
class DerivativeBounds {
public:
    /// Requires matching square shapes, 0 <= gamma <= Gamma entrywise and at
    /// least one strictly positive gamma in every row.
    DerivativeBounds(Matrix lower, Matrix upper);

    /// gamma = Gamma = diag(c).
    static DerivativeBounds from_final_data(const GaussianFinalData& fd);

    const Matrix& lower() const noexcept { return lower_; }
    const Matrix& upper() const noexcept { return upper_; }
    std::size_t size() const noexcept { return lower_.rows(); }

private:
    Matrix lower_;
    Matrix upper_;
};

/// Gaussian-type sandwich around the density of a scalar random variable F:
///
///   abs_dev/(2 Lambda) exp(-(x-mean)^2/(2 lambda)) <= rho_F(x)
///                               <= abs_dev/(2 lambda) exp(-(x-mean)^2/(2 Lambda))
///
/// lower_variance is lambda, upper_variance is Lambda, abs_dev is E|F - EF|.
struct DensityEnvelope {
    double lower_variance;
    double upper_variance;
    double mean;
    double abs_dev;
};

/// Validates 0 < lambda <= Lambda (equality allowed) and abs_dev >= 0.
DensityEnvelope make_envelope(double lower_variance, double upper_variance, double mean,
                              double abs_dev);

struct DensityBand {
    double lower;
    double upper;
};

/// True when every off-diagonal A_ij <= 0, the repression-only hypothesis
/// under which the gene-level bounds are certified.
bool off_diagonal_nonpositive(const GeneNetwork& net);

/// P_j = sum_{i != j} nu_i |A_ij| / 4 + max(rho_j, |A_jj nu_j / 4 - rho_j|).
std::vector<double> p_exponents(const GeneNetwork& net);

/// lambda_i(t) = |gamma_i|^2 t exp(2 (T-t) rho_i)                  if A_ii <= 0
///             = |gamma_i|^2 t exp(2 (T-t) (rho_i - A_ii nu_i / 4)) otherwise.
double lower_variance_proxy(const GeneNetwork& net, const DerivativeBounds& db, std::size_t gene,
                            const TimeWindow& window);

/// Lambda(t) = t sum_k (sum_i Gamma_ik)^2 exp(2 (T-t) max_j P_j). Gene independent.
double upper_variance_proxy(const GeneNetwork& net, const DerivativeBounds& db,
                            const TimeWindow& window);

DensityBand density_bounds(const DensityEnvelope& env, double x);

/// exp(-x^2 / (2 Lambda)); bounds both P(F >= EF + x) and P(F <= EF - x). x > 0.
double tail_bound(const DensityEnvelope& env, double x);

/// Half-width x_alpha = sqrt(2 Lambda ln(2 / (1 - alpha))) of a certified
/// alpha-level prediction interval around the mean.
double prediction_halfwidth(double upper_variance, double alpha);

/// exp(-mean^2 / (2 Lambda)) >= P(F <= 0). Requires mean > 0.
double positivity_bound(const DensityEnvelope& env);

/// Sharper bounds for gene 1 when every other gene represses it, all genes
/// self-activate and genes 2..n do not regulate each other.
struct SuppressedGeneBounds {
    double lower_derivative;               ///< m_t
    double upper_derivative;               ///< M_t
    std::vector<double> cross_terms;       ///< kappa^k_t for k = 2..n
    double lower_variance;                 ///< t m_t^2
    double upper_variance;                 ///< t M_t^2

    DensityEnvelope envelope(double mean, double abs_dev) const {
        return make_envelope(lower_variance, upper_variance, mean, abs_dev);
    }
};

/// Whether `net` has the suppressed-gene shape (gene 1 is index 0).
bool has_suppressed_gene_shape(const GeneNetwork& net);

/// Throws std::invalid_argument when the network shape does not match.
SuppressedGeneBounds suppressed_gene_bounds(const GeneNetwork& net, const GaussianFinalData& fd,
                                            const TimeWindow& window);

}  // namespace grnbounds
