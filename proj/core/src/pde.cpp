#include "grnbounds/pde.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "grnbounds/errors.hpp"
#include "grnbounds/parallel.hpp"

namespace grnbounds {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < exp; ++k) r *= base;
    return r;
}

// Constant-coefficient tridiagonal system (1 + 2r) u_j - r (u_{j-1} + u_{j+1})
// with the Neumann ghost u_{-1} = u_1 folded into the first and last rows.
// The forward-elimination factors are shared by every line and every step.
class NeumannCrankNicolson {
public:
    NeumannCrankNicolson(std::size_t points, double r) : r_(r), upper_(points), inv_denom_(points) {
        const double diag = 1.0 + 2.0 * r;
        const std::size_t last = points - 1;
        double prev = 0.0;
        for (std::size_t j = 0; j < points; ++j) {
            const double lower = j == 0 ? 0.0 : (j == last ? -2.0 * r : -r);
            const double upper = j == 0 ? -2.0 * r : (j == last ? 0.0 : -r);
            const double denom = diag - lower * prev;
            inv_denom_[j] = 1.0 / denom;
            upper_[j] = upper * inv_denom_[j];
            prev = upper_[j];
        }
    }

    // Advances one line in place; `scratch` must hold as many entries as `u`.
    void advance(std::span<double> u, std::span<double> scratch) const {
        const std::size_t last = u.size() - 1;
        const double r = r_;
        const double keep = 1.0 - 2.0 * r;

        // Explicit half with the mirrored ghost, fused into the forward sweep.
        double rhs = keep * u[0] + 2.0 * r * u[1];
        scratch[0] = rhs * inv_denom_[0];
        for (std::size_t j = 1; j < last; ++j) {
            rhs = keep * u[j] + r * (u[j - 1] + u[j + 1]);
            scratch[j] = (rhs + r * scratch[j - 1]) * inv_denom_[j];
        }
        rhs = keep * u[last] + 2.0 * r * u[last - 1];
        scratch[last] = (rhs + 2.0 * r * scratch[last - 1]) * inv_denom_[last];

        u[last] = scratch[last];
        for (std::size_t j = last; j-- > 0;) u[j] = scratch[j] - upper_[j] * u[j + 1];
    }

private:
    double r_;
    std::vector<double> upper_;
    std::vector<double> inv_denom_;
};

class SplitStepper {
public:
    SplitStepper(const GeneNetwork& net, const PdeGrid& grid, double step, const SolverOptions& options,
                 std::vector<std::vector<double>>& values)
        : net_(net),
          points_(grid.points_per_axis),
          dims_(net.size()),
          nodes_(values.front().size()),
          step_(step),
          options_(options),
          line_solver_(points_, step / (4.0 * grid.spacing() * grid.spacing())),
          values_(values) {}

    void advance() {
        if (options_.reaction) react(0.5 * step_);
        for (std::size_t axis = 0; axis < dims_; ++axis) diffuse(axis);
        if (options_.reaction) react(0.5 * step_);
    }

    bool finite() const {
        std::atomic<bool> ok{true};
        parallel_for(nodes_, options_.threads, [&](std::size_t begin, std::size_t end) {
            for (const auto& comp : values_) {
                for (std::size_t k = begin; k < end; ++k) {
                    if (!std::isfinite(comp[k])) {
                        ok = false;
                        return;
                    }
                }
            }
        });
        return ok;
    }

private:
    // Heun's method on du/ds = -f(u) at every node.
    void react(double h) {
        parallel_for(nodes_, options_.threads, [&](std::size_t begin, std::size_t end) {
            std::array<double, kMaxSolverDimension> u{}, k1{}, stage{}, k2{};
            for (std::size_t node = begin; node < end; ++node) {
                for (std::size_t i = 0; i < dims_; ++i) u[i] = values_[i][node];
                rate_into(net_, u.data(), k1.data());
                for (std::size_t i = 0; i < dims_; ++i) stage[i] = u[i] - h * k1[i];
                rate_into(net_, stage.data(), k2.data());
                for (std::size_t i = 0; i < dims_; ++i)
                    values_[i][node] = u[i] - 0.5 * h * (k1[i] + k2[i]);
            }
        });
    }

    void diffuse(std::size_t axis) {
        const std::size_t stride = ipow(points_, dims_ - 1 - axis);
        const std::size_t lines = nodes_ / points_;
        parallel_for(lines, options_.threads, [&](std::size_t begin, std::size_t end) {
            std::vector<double> line(points_), scratch(points_);
            for (std::size_t l = begin; l < end; ++l) {
                const std::size_t base = (l / stride) * stride * points_ + (l % stride);
                for (auto& comp : values_) {
                    for (std::size_t j = 0; j < points_; ++j) line[j] = comp[base + j * stride];
                    line_solver_.advance(line, scratch);
                    for (std::size_t j = 0; j < points_; ++j) comp[base + j * stride] = line[j];
                }
            }
        });
    }

    const GeneNetwork& net_;
    std::size_t points_;
    std::size_t dims_;
    std::size_t nodes_;
    double step_;
    SolverOptions options_;
    NeumannCrankNicolson line_solver_;
    std::vector<std::vector<double>>& values_;
};

}  // namespace

void PdeGrid::validate(const TimeWindow& window) const {
    if (!(inner_half_width > 0.0)) throw std::invalid_argument("PdeGrid: a must be > 0");
    if (!(margin > 0.0)) throw std::invalid_argument("PdeGrid: N must be > 0");
    if (points_per_axis < 3 || points_per_axis % 2 == 0)
        throw std::invalid_argument("PdeGrid: points_per_axis must be odd and >= 3");
    if (!(dt > 0.0) || !(dt <= window.horizon))
        throw std::invalid_argument("PdeGrid: need 0 < dt <= T");
}

PdeGrid default_grid(double inner_half_width, double margin, const TimeWindow& window) {
    const double span = window.remaining() > 0.0 ? window.remaining() : window.horizon;
    return PdeGrid{inner_half_width, margin, 65, span / 200.0};
}

ThetaField::ThetaField(PdeGrid grid, double time, std::size_t genes,
                       std::vector<std::vector<double>> values)
    : grid_(grid), time_(time), values_(std::move(values)) {
    const std::size_t nodes = ipow(grid_.points_per_axis, genes);
    if (values_.size() != genes || genes == 0)
        throw std::invalid_argument("ThetaField: one component per gene is required");
    for (const auto& comp : values_)
        if (comp.size() != nodes) throw std::invalid_argument("ThetaField: component size mismatch");
}

std::vector<std::size_t> ThetaField::node_index(std::size_t node) const {
    const std::size_t p = grid_.points_per_axis;
    std::vector<std::size_t> idx(genes());
    for (std::size_t axis = genes(); axis-- > 0;) {
        idx[axis] = node % p;
        node /= p;
    }
    return idx;
}

std::size_t ThetaField::node_at(std::span<const std::size_t> index) const {
    if (index.size() != genes()) throw std::invalid_argument("ThetaField: index rank mismatch");
    std::size_t node = 0;
    for (std::size_t k : index) {
        if (k >= grid_.points_per_axis) throw std::out_of_range("ThetaField: index out of range");
        node = node * grid_.points_per_axis + k;
    }
    return node;
}

double ThetaField::center_value(std::size_t gene) const {
    const std::vector<std::size_t> mid(genes(), grid_.points_per_axis / 2);
    return values_.at(gene)[node_at(mid)];
}

std::vector<double> extend_final_condition(const GaussianFinalData& fd, const PdeGrid& grid,
                                           std::span<const double> x) {
    if (x.size() != fd.size()) throw std::invalid_argument("extend_final_condition: dimension mismatch");
    const double edge = grid.half_width();
    std::vector<double> h(fd.size());
    for (std::size_t i = 0; i < fd.size(); ++i)
        h[i] = fd.slope()[i] * std::clamp(x[i], -edge, edge) + fd.offset()[i];
    return h;
}

ThetaField solve_final_value(const GeneNetwork& net, const GaussianFinalData& fd, const PdeGrid& grid,
                             const TimeWindow& window, const SolverOptions& options) {
    const std::size_t n = net.size();
    if (fd.size() != n) throw std::invalid_argument("solve_final_value: final data dimension mismatch");
    if (n > kMaxSolverDimension) {
        throw std::invalid_argument("solve_final_value: " + std::to_string(n) +
                                    " genes exceeds the dense-grid limit of " +
                                    std::to_string(kMaxSolverDimension));
    }
    grid.validate(window);

    const std::size_t p = grid.points_per_axis;
    const std::size_t nodes = ipow(p, n);
    std::vector<std::vector<double>> values(n, std::vector<double>(nodes));

    // theta(T, x) = h_N(x); on the grid the clamp is inactive.
    for (std::size_t node = 0; node < nodes; ++node) {
        std::size_t rest = node;
        for (std::size_t axis = n; axis-- > 0;) {
            const double x = grid.coordinate(rest % p);
            rest /= p;
            values[axis][node] = fd.slope()[axis] * x + fd.offset()[axis];
        }
    }

    const double span = window.remaining();
    if (span > 0.0) {
        const auto steps = static_cast<std::size_t>(std::ceil(span / grid.dt - 1e-9));
        const double step = span / static_cast<double>(steps);
        SplitStepper stepper(net, grid, step, options, values);
        for (std::size_t k = 0; k < steps; ++k) {
            stepper.advance();
            if (!stepper.finite()) {
                throw NumericalError("solve_final_value: non-finite solution after step " +
                                     std::to_string(k + 1) + " of " + std::to_string(steps) +
                                     " (reversed time s = " + std::to_string((k + 1) * step) + ")");
            }
        }
    }
    return ThetaField(grid, window.time, n, std::move(values));
}

std::vector<double> theta_amplitude_bound(const GeneNetwork& net, const GaussianFinalData& fd,
                                          const TimeWindow& window, std::span<const double> x) {
    if (x.size() != net.size() || fd.size() != net.size())
        throw std::invalid_argument("theta_amplitude_bound: dimension mismatch");
    const double tau = window.remaining();
    std::vector<double> out(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        out[i] = std::exp(net.degradation()[i] * tau) *
                 (fd.slope()[i] * std::abs(x[i]) + fd.offset()[i] + net.max_synthesis()[i] * tau);
    }
    return out;
}

double boundary_extension_error(const GeneNetwork& net, const GaussianFinalData& fd,
                                const TimeWindow& window, double margin) {
    if (!(margin > 0.0)) throw std::invalid_argument("boundary_extension_error: N must be > 0");
    const double tau = window.remaining();
    if (tau <= 0.0) return 0.0;
    const double m = lipschitz_bound(net);
    return fd.slope_norm() * std::pow(tau, 0.75) / std::sqrt(margin) *
           std::exp(m * tau - margin * margin / (4.0 * tau));
}

double choose_margin(const GeneNetwork& net, const GaussianFinalData& fd, const TimeWindow& window,
                     double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("choose_margin: tol must be > 0");
    // Past its maximum the bound decays like exp(-N^2/(4 tau)); scanning up
    // from 0.5 therefore always terminates.
    double margin = 0.5;
    while (boundary_extension_error(net, fd, window, margin) > tol) margin += 0.5;
    return margin;
}

}  // namespace grnbounds
