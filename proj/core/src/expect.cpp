#include "grnbounds/expect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "grnbounds/parallel.hpp"

namespace grnbounds {

namespace {

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            carry_ += (sum_ - t) + v;
        else
            carry_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// Trapezoid weights of the 1D N(0, t) density restricted to [-a, a].
std::vector<double> axis_weights(const PdeGrid& grid, double a, double time) {
    const std::size_t p = grid.points_per_axis;
    const double h = grid.spacing();
    const double tol = 1e-9 * h;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * time);
    std::vector<double> w(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        const double x = grid.coordinate(k);
        if (std::abs(x) > a + tol) continue;
        double weight = h * norm * std::exp(-x * x / (2.0 * time));
        if (std::abs(std::abs(x) - a) <= tol) weight *= 0.5;
        w[k] = weight;
    }
    return w;
}

// Sums g(value, weight) over all nodes, one compensated partial per grid line
// along the last axis, then the partials in line order.
template <class Term>
double weighted_sum(const ThetaField& field, std::size_t gene, const std::vector<double>& w,
                    unsigned threads, Term term) {
    const std::size_t p = field.grid().points_per_axis;
    const std::size_t dims = field.genes();
    const std::size_t lines = field.node_count() / p;
    const auto values = field.component(gene);
    std::vector<double> partial(lines, 0.0);

    parallel_for(lines, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t l = begin; l < end; ++l) {
            double prefix = 1.0;
            std::size_t rest = l;
            for (std::size_t axis = 0; axis + 1 < dims; ++axis) {
                prefix *= w[rest % p];
                rest /= p;
            }
            if (prefix == 0.0) continue;
            CompensatedSum s;
            for (std::size_t k = 0; k < p; ++k) {
                if (w[k] == 0.0) continue;
                s.add(term(values[l * p + k]) * w[k]);
            }
            partial[l] = prefix * s.value();
        }
    });

    CompensatedSum total;
    for (double v : partial) total.add(v);
    return total.value();
}

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < exp; ++k) r *= base;
    return r;
}

// int_{-a}^{a} |x - x0| p_t(x) dx for the N(0, t) density p_t.
double gaussian_kink_integral(double x0, double a, double time) {
    const double sd = std::sqrt(time);
    auto pdf = [&](double x) { return std::exp(-x * x / (2.0 * time)) / (sd * std::sqrt(2.0 * std::numbers::pi)); };
    auto cdf = [&](double x) { return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2)); };
    // int_p^q (x - x0) p_t = t (p_t(p) - p_t(q)) - x0 (P(q) - P(p))
    auto piece = [&](double p, double q) { return time * (pdf(p) - pdf(q)) - x0 * (cdf(q) - cdf(p)); };
    const double c = std::clamp(x0, -a, a);
    return piece(c, a) - piece(-a, c);
}

// The axis along which a component varies most, measured by the summed
// absolute differences between neighbouring nodes.
std::size_t steepest_axis(const ThetaField& field, std::size_t gene) {
    const std::size_t p = field.grid().points_per_axis;
    const std::size_t dims = field.genes();
    const auto values = field.component(gene);
    std::size_t best = dims - 1;
    double best_variation = -1.0;
    for (std::size_t axis = 0; axis < dims; ++axis) {
        const std::size_t stride = ipow(p, dims - 1 - axis);
        double variation = 0.0;
        for (std::size_t node = 0; node < values.size(); ++node) {
            if ((node / stride) % p == p - 1) continue;
            variation += std::abs(values[node + stride] - values[node]);
        }
        if (variation > best_variation) {
            best_variation = variation;
            best = axis;
        }
    }
    return best;
}

// E|theta - m| over Q_a. Lines run along the steepest axis; on each line the
// kinks of |theta - m| are removed by subtracting |s (x - x*)| p_t(x) at every
// sign change, which is integrated in closed form instead.
double absolute_deviation(const ThetaField& field, std::size_t gene, double mean,
                          const std::vector<double>& w, double a, unsigned threads) {
    const auto& grid = field.grid();
    const std::size_t p = grid.points_per_axis;
    const std::size_t dims = field.genes();
    const std::size_t axis = steepest_axis(field, gene);
    const std::size_t stride = ipow(p, dims - 1 - axis);
    const std::size_t lines = field.node_count() / p;
    const double h = grid.spacing();
    const auto values = field.component(gene);
    std::vector<double> partial(lines, 0.0);

    parallel_for(lines, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> g(p);
        std::vector<std::pair<double, double>> kinks;  // (x*, |slope|)
        for (std::size_t l = begin; l < end; ++l) {
            const std::size_t base = (l / stride) * stride * p + (l % stride);
            double prefix = 1.0;
            std::size_t rest = base;
            for (std::size_t ax = dims; ax-- > 0;) {
                if (ax != axis) prefix *= w[rest % p];
                rest /= p;
            }
            if (prefix == 0.0) continue;

            for (std::size_t j = 0; j < p; ++j) g[j] = values[base + j * stride] - mean;
            kinks.clear();
            for (std::size_t j = 0; j + 1 < p; ++j) {
                if (w[j] == 0.0 || w[j + 1] == 0.0) continue;
                if ((g[j] >= 0.0) == (g[j + 1] >= 0.0)) continue;
                const double x = grid.coordinate(j) + h * g[j] / (g[j] - g[j + 1]);
                kinks.emplace_back(x, std::abs(g[j + 1] - g[j]) / h);
            }

            CompensatedSum s;
            for (std::size_t j = 0; j < p; ++j) {
                if (w[j] == 0.0) continue;
                double v = std::abs(g[j]);
                for (const auto& [x0, slope] : kinks) v -= slope * std::abs(grid.coordinate(j) - x0);
                s.add(v * w[j]);
            }
            for (const auto& [x0, slope] : kinks) s.add(slope * gaussian_kink_integral(x0, a, field.time()));
            partial[l] = prefix * s.value();
        }
    });

    CompensatedSum total;
    for (double v : partial) total.add(v);
    return total.value();
}


}  // namespace

double gaussian_mass_deficit(double inner_half_width, double time, std::size_t dims) {
    const double inside = std::erf(inner_half_width / std::sqrt(2.0 * time));
    return 1.0 - std::pow(inside, static_cast<double>(dims));
}

MomentReport gaussian_weight_integral(const ThetaField& field, double inner_half_width,
                                      unsigned threads) {
    const auto& grid = field.grid();
    if (!(inner_half_width > 0.0))
        throw std::invalid_argument("gaussian_weight_integral: a must be > 0");
    if (inner_half_width > grid.half_width() * (1.0 + 1e-12)) {
        throw std::invalid_argument("gaussian_weight_integral: a exceeds the field's domain (a + N = " +
                                    std::to_string(grid.half_width()) + ")");
    }
    const std::size_t n = field.genes();
    const auto w = axis_weights(grid, inner_half_width, field.time());

    MomentReport report;
    report.mean.resize(n);
    report.abs_dev.resize(n);
    report.trunc_err_mean.assign(n, 0.0);
    report.trunc_err_absdev.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        report.mean[i] = weighted_sum(field, i, w, threads, [](double v) { return v; });
        report.abs_dev[i] = absolute_deviation(field, i, report.mean[i], w, inner_half_width, threads);
    }
    report.mass_deficit = gaussian_mass_deficit(inner_half_width, field.time(), n);
    return report;
}

double truncation_error_mean(const GeneNetwork& net, const GaussianFinalData& fd,
                             const TimeWindow& window, double inner_half_width, std::size_t gene) {
    if (!(inner_half_width > 0.0)) throw std::invalid_argument("truncation_error_mean: a must be > 0");
    if (gene >= net.size() || fd.size() != net.size())
        throw std::invalid_argument("truncation_error_mean: gene or dimension mismatch");
    const double t = window.time;
    const double a = inner_half_width;
    const double tau = window.remaining();
    const auto n = static_cast<double>(net.size());
    const double c = fd.slope()[gene];
    const double b = fd.offset()[gene];
    const double nu = net.max_synthesis()[gene];

    const double j = std::sqrt(2.0 * t / (std::numbers::pi * a * a)) * std::exp(-a * a / (2.0 * t));
    const double body = a * c + c * (n - 1.0) * std::sqrt(2.0 * t / std::numbers::pi) + b * n + nu * n * tau;
    return std::exp(net.degradation()[gene] * tau) * j * body;
}

double choose_inner_cube(const GeneNetwork& net, const GaussianFinalData& fd, const TimeWindow& window,
                         double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("choose_inner_cube: tol must be > 0");
    auto worst = [&](double a) {
        double e = 0.0;
        for (std::size_t i = 0; i < net.size(); ++i)
            e = std::max(e, truncation_error_mean(net, fd, window, a, i));
        return e;
    };
    // The bound is strictly decreasing in a.
    double a = 1.0;
    while (worst(a) > tol) a += 0.5;
    return a;
}

MomentReport compute_moments(const GeneNetwork& net, const GaussianFinalData& fd,
                             const TimeWindow& window, const ThetaField& field,
                             double inner_half_width, unsigned threads) {
    if (field.genes() != net.size()) throw std::invalid_argument("compute_moments: dimension mismatch");
    if (std::abs(field.time() - window.time) > 1e-12 * std::max(1.0, window.time))
        throw std::invalid_argument("compute_moments: field time differs from the window");
    auto report = gaussian_weight_integral(field, inner_half_width, threads);
    for (std::size_t i = 0; i < net.size(); ++i) {
        report.trunc_err_mean[i] = truncation_error_mean(net, fd, window, inner_half_width, i);
        report.trunc_err_absdev[i] = 2.0 * report.trunc_err_mean[i];
    }
    return report;
}

}  // namespace grnbounds
