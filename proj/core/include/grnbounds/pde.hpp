#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "grnbounds/bounds.hpp"
#include "grnbounds/model.hpp"

namespace grnbounds {

/// Tensor grid over the solve cube Q_{a+N} = [-(a+N), a+N]^n. Expectations are
/// later taken over the inner cube Q_a; the margin N keeps the artificial
/// Neumann boundary away from it.
struct PdeGrid {
    double inner_half_width = 0.0;  ///< a
    double margin = 0.0;            ///< N
    std::size_t points_per_axis = 65;
    double dt = 0.0;

    /// a > 0, N > 0, odd points_per_axis >= 3 (so x = 0 is a node), 0 < dt <= T.
    void validate(const TimeWindow& window) const;

    double half_width() const noexcept { return inner_half_width + margin; }
    double spacing() const noexcept {
        return 2.0 * half_width() / static_cast<double>(points_per_axis - 1);
    }
    double coordinate(std::size_t k) const noexcept {
        return -half_width() + static_cast<double>(k) * spacing();
    }

    friend bool operator==(const PdeGrid&, const PdeGrid&) = default;
};

/// 65 points per axis and dt = (T - t) / 200 (or T / 200 when t = T).
PdeGrid default_grid(double inner_half_width, double margin, const TimeWindow& window);

/// Largest network the dense tensor-grid solver accepts.
inline constexpr std::size_t kMaxSolverDimension = 4;

struct SolverOptions {
    bool reaction = true;  ///< false drops f entirely (pure heat flow)
    unsigned threads = 1;
};

/// Samples of theta_N(t, .) on the tensor grid. Immutable once built. Node
/// ordering is row-major with the last axis varying fastest.
class ThetaField {
public:
    ThetaField(PdeGrid grid, double time, std::size_t genes, std::vector<std::vector<double>> values);

    const PdeGrid& grid() const noexcept { return grid_; }
    double time() const noexcept { return time_; }
    std::size_t genes() const noexcept { return values_.size(); }
    std::size_t node_count() const noexcept { return values_.front().size(); }

    std::span<const double> component(std::size_t gene) const { return values_.at(gene); }

    /// Multi-index of a node, one entry per axis.
    std::vector<std::size_t> node_index(std::size_t node) const;
    std::size_t node_at(std::span<const std::size_t> index) const;

    /// theta^gene at the grid centre x = 0.
    double center_value(std::size_t gene) const;

private:
    PdeGrid grid_;
    double time_;
    std::vector<std::vector<double>> values_;
};

/// h_N^i(x) = c_i clamp(x_i, -(a+N), a+N) + b_i.
std::vector<double> extend_final_condition(const GaussianFinalData& fd, const PdeGrid& grid,
                                           std::span<const double> x);

/// Solves d_t theta + 1/2 Laplacian theta - f(theta) = 0 on Q_{a+N}, with
/// theta(T) = h_N and homogeneous Neumann boundaries, and returns theta_N(t, .).
///
/// The problem is reversed to s = T - t and marched forward with Strang
/// splitting: half a step of the reaction ODE (Heun), one Crank-Nicolson line
/// solve per axis, another reaction half step. Lines are independent and may
/// be solved on several threads without changing the result.
///
/// Throws std::invalid_argument for n > kMaxSolverDimension or a bad grid and
/// NumericalError if the solution stops being finite.
ThetaField solve_final_value(const GeneNetwork& net, const GaussianFinalData& fd, const PdeGrid& grid,
                             const TimeWindow& window, const SolverOptions& options = {});

/// e^{rho_i (T-t)} (c_i |x_i| + b_i + nu_i (T-t)) >= |theta^i(t, x)|.
std::vector<double> theta_amplitude_bound(const GeneNetwork& net, const GaussianFinalData& fd,
                                          const TimeWindow& window, std::span<const double> x);

/// |c| (T-t)^{3/4} N^{-1/2} exp(M (T-t) - N^2 / (4 (T-t))), with M the
/// Lipschitz bound of f: bounds sup_{Q_a} |theta - theta_N|. Zero when t = T.
double boundary_extension_error(const GeneNetwork& net, const GaussianFinalData& fd,
                                const TimeWindow& window, double margin);

/// Smallest N in {0.5, 1.0, 1.5, ...} with boundary_extension_error <= tol.
double choose_margin(const GeneNetwork& net, const GaussianFinalData& fd, const TimeWindow& window,
                     double tol);

}  // namespace grnbounds
