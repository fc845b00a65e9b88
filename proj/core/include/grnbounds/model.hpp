#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "grnbounds/matrix.hpp"

namespace grnbounds {

/// Gene regulatory network with sigmoidal synthesis and linear degradation.
///
/// Gene i synthesises protein at rate nu_i / (1 + exp(-Theta_i)) where
/// Theta_i = sum_j A_ij eta^j is the regulatory input, and degrades it at rate
/// rho_i eta^i. A_ij < 0 is repression of gene i by gene j, A_ij > 0 activation.
class GeneNetwork {
public:
    /// Throws std::invalid_argument unless A is n x n, nu and rho have length n,
    /// n >= 1, every rho_i > 0 and every nu_i >= 0. nu_i = 0 (no synthesis)
    /// is admitted so pure death processes can be simulated.
    GeneNetwork(Matrix regulation, std::vector<double> max_synthesis,
                std::vector<double> degradation);

    std::size_t size() const noexcept { return nu_.size(); }
    const Matrix& regulation() const noexcept { return a_; }
    std::span<const double> max_synthesis() const noexcept { return nu_; }
    std::span<const double> degradation() const noexcept { return rho_; }

    friend bool operator==(const GeneNetwork&, const GeneNetwork&) = default;

private:
    Matrix a_;
    std::vector<double> nu_;
    std::vector<double> rho_;
};

/// Evaluation time t inside the horizon [0, T]; 0 < t <= T.
struct TimeWindow {
    double horizon;
    double time;

    TimeWindow(double horizon_, double time_);

    double remaining() const noexcept { return horizon - time; }

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Logistic function 1 / (1 + e^{-x}), evaluated without overflow.
double sigmoid(double x) noexcept;

/// Derivative of the logistic function, 1 / (2 (cosh x + 1)). Returns 0 once
/// |x| > 700, where the true value is below double precision.
double sigmoid_derivative(double x) noexcept;

/// Theta = A eta.
std::vector<double> regulatory_input(const GeneNetwork& net, std::span<const double> eta);

/// f^i(eta) = nu_i sigmoid(Theta_i) - rho_i eta^i.
std::vector<double> rate(const GeneNetwork& net, std::span<const double> eta);

/// Unchecked kernel behind rate(): `eta` and `out` must both have net.size()
/// entries. Used in the PDE reaction step, which evaluates it per grid node.
inline void rate_into(const GeneNetwork& net, const double* eta, double* out) noexcept {
    const std::size_t n = net.size();
    const auto& a = net.regulation();
    const auto nu = net.max_synthesis();
    const auto rho = net.degradation();
    for (std::size_t i = 0; i < n; ++i) {
        double theta = 0.0;
        for (std::size_t j = 0; j < n; ++j) theta += a(i, j) * eta[j];
        out[i] = nu[i] * sigmoid(theta) - rho[i] * eta[i];
    }
}

/// Jacobian entries d f^i / d eta^j = psi(Theta_i) nu_i A_ij - rho_i delta_ij.
Matrix jacobian(const GeneNetwork& net, std::span<const double> eta);

/// Global Lipschitz constant of f: sqrt(sum_i 2 m_i^2) with
/// m_i = max(rho_i, nu_i |A_i| / 4) and |A_i| the Euclidean norm of row i.
double lipschitz_bound(const GeneNetwork& net);

}  // namespace grnbounds
