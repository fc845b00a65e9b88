#include "grnbounds/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace grnbounds {

namespace {

void require_state(const GeneNetwork& net, std::span<const double> eta) {
    if (eta.size() != net.size()) {
        throw std::invalid_argument("dimension mismatch: state has " + std::to_string(eta.size()) +
                                    " entries, network has " + std::to_string(net.size()) +
                                    " genes");
    }
}

}  // namespace

GeneNetwork::GeneNetwork(Matrix regulation, std::vector<double> max_synthesis,
                         std::vector<double> degradation)
    : a_(std::move(regulation)), nu_(std::move(max_synthesis)), rho_(std::move(degradation)) {
    const std::size_t n = nu_.size();
    if (n == 0) throw std::invalid_argument("GeneNetwork: at least one gene is required");
    if (rho_.size() != n) throw std::invalid_argument("GeneNetwork: rho length differs from nu");
    if (a_.rows() != n || a_.cols() != n) {
        throw std::invalid_argument("GeneNetwork: A must be " + std::to_string(n) + "x" +
                                    std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(nu_[i] >= 0.0) || !std::isfinite(nu_[i]))
            throw std::invalid_argument("GeneNetwork: nu_" + std::to_string(i + 1) + " must be >= 0");
        if (!(rho_[i] > 0.0) || !std::isfinite(rho_[i]))
            throw std::invalid_argument("GeneNetwork: rho_" + std::to_string(i + 1) + " must be > 0");
    }
    for (double v : a_.data()) {
        if (!std::isfinite(v)) throw std::invalid_argument("GeneNetwork: A has non-finite entries");
    }
}

TimeWindow::TimeWindow(double horizon_, double time_) : horizon(horizon_), time(time_) {
    if (!(time > 0.0) || !(time <= horizon) || !std::isfinite(horizon)) {
        throw std::invalid_argument("TimeWindow: need 0 < t <= T");
    }
}

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double sigmoid_derivative(double x) noexcept {
    const double ax = std::abs(x);
    if (ax > 700.0) return 0.0;
    return 1.0 / (2.0 * (std::cosh(ax) + 1.0));
}

std::vector<double> regulatory_input(const GeneNetwork& net, std::span<const double> eta) {
    require_state(net, eta);
    const std::size_t n = net.size();
    std::vector<double> theta(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) theta[i] += net.regulation()(i, j) * eta[j];
    return theta;
}

std::vector<double> rate(const GeneNetwork& net, std::span<const double> eta) {
    require_state(net, eta);
    std::vector<double> out(net.size());
    rate_into(net, eta.data(), out.data());
    return out;
}

Matrix jacobian(const GeneNetwork& net, std::span<const double> eta) {
    const auto theta = regulatory_input(net, eta);
    const std::size_t n = net.size();
    Matrix jac(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double slope = sigmoid_derivative(theta[i]) * net.max_synthesis()[i];
        for (std::size_t j = 0; j < n; ++j) jac(i, j) = slope * net.regulation()(i, j);
        jac(i, i) -= net.degradation()[i];
    }
    return jac;
}

double lipschitz_bound(const GeneNetwork& net) {
    double sum = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        double row_sq = 0.0;
        for (double v : net.regulation().row(i)) row_sq += v * v;
        const double m = std::max(net.degradation()[i], net.max_synthesis()[i] * std::sqrt(row_sq) / 4.0);
        sum += 2.0 * m * m;
    }
    return std::sqrt(sum);
}

}  // namespace grnbounds
