#include "grnbounds/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "grnbounds/errors.hpp"
#include "grnbounds/parallel.hpp"
#include "grnbounds/philox.hpp"

namespace grnbounds {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSingularTol = 1e-12;

double integrate(const ScalarFunction& f, double from, double to) {
    if (from == to) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, from, to, 8, 1e-10);
}

// delta - sin(delta), with a series near zero where the difference cancels.
double cubic_gap(double delta) {
    if (std::abs(delta) >= 0.5) return delta - std::sin(delta);
    const double d2 = delta * delta;
    double term = delta * d2 / 6.0;
    double sum = 0.0;
    for (int k = 1; k < 12; ++k) {
        sum += term;
        term *= -d2 / static_cast<double>((2 * k + 2) * (2 * k + 3));
    }
    return sum;
}

double one_minus_cos(double delta) {
    const double s = std::sin(0.5 * delta);
    return 2.0 * s * s;
}

// x = 2 pi n + delta with |delta| <= pi.
struct Reduced {
    long n;
    double delta;
};

Reduced reduce(double x) {
    const long n = std::lround(x / kTwoPi);
    return {n, x - kTwoPi * static_cast<double>(n)};
}

// Solves delta - sin(delta) = gap for |gap| <= pi (so |delta| <= pi).
double solve_cubic_gap(double gap) {
    if (gap == 0.0) return 0.0;
    const double guess = std::clamp(std::cbrt(6.0 * gap), -std::numbers::pi, std::numbers::pi);
    std::uintmax_t iterations = 200;
    auto fn = [gap](double d) { return std::make_pair(cubic_gap(d) - gap, one_minus_cos(d)); };
    const double root = boost::math::tools::newton_raphson_iterate(
        fn, guess, -std::numbers::pi - 1e-12, std::numbers::pi + 1e-12,
        std::numeric_limits<double>::digits - 2, iterations);
    if (iterations >= 200 || !std::isfinite(root))
        throw NumericalError("counterexample_inverse: root finder did not converge");
    return root;
}

double gaussian_pdf(double x, double variance) {
    return std::exp(-x * x / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

// Density at the point with s = (y - alpha) / beta = 2 pi n + gap.
DensityValue density_from_gap(const CounterexampleParams& p, long n, double gap) {
    const double delta = solve_cubic_gap(gap);
    const double x = kTwoPi * static_cast<double>(n) + delta;
    const double denom = one_minus_cos(delta);
    const bool singular = denom < kSingularTol;
    const double num = gaussian_pdf(x, p.tau);
    if (denom == 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {num / (p.beta * denom), singular};
}

DensityValue density_from_y(const CounterexampleParams& p, double y) {
    const double s = (y - p.alpha) / p.beta;
    const long n = std::lround(s / kTwoPi);
    return density_from_gap(p, n, s - kTwoPi * static_cast<double>(n));
}

// Integral over [from, to] containing no singular point in its interior.
// Endpoints that are singular points are handled through the complement
// argument so the gap to the pole is exact.
double integrate_piece(const CounterexampleParams& p, double from, double to, std::optional<long> left_pole,
                       std::optional<long> right_pole) {
    if (!(to > from)) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double y, double yc) {
        // yc is the distance to the nearer endpoint: a - y or b - y.
        const bool near_left = y - from < to - y;
        const auto pole = near_left ? left_pole : right_pole;
        if (pole) return density_from_gap(p, *pole, -yc / p.beta).value;
        return density_from_y(p, y).value;
    };
    return ts.integrate(f, from, to, 1e-12);
}

}  // namespace

double wazewski_lower_bound(const ScalarFunction& a_ii, double u0, double t) {
    if (!(u0 >= 0.0)) throw std::invalid_argument("wazewski_lower_bound: u0 must be >= 0");
    if (!(t >= 0.0)) throw std::invalid_argument("wazewski_lower_bound: t must be >= 0");
    return u0 * std::exp(integrate(a_ii, 0.0, t));
}

std::vector<double> integrate_linear_ode(const MatrixFunction& a, const VectorFunction& forcing,
                                         std::vector<double> y0, double from, double to,
                                         std::size_t steps) {
    if (steps == 0) throw std::invalid_argument("integrate_linear_ode: steps must be >= 1");
    const std::size_t n = y0.size();
    const double h = (to - from) / static_cast<double>(steps);
    auto rhs = [&](double s, const std::vector<double>& y) {
        const Matrix m = a(s);
        if (m.rows() != n || m.cols() != n) throw std::invalid_argument("integrate_linear_ode: shape mismatch");
        std::vector<double> out(n, 0.0);
        if (forcing) {
            out = forcing(s);
            if (out.size() != n) throw std::invalid_argument("integrate_linear_ode: forcing shape mismatch");
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i] += m(i, j) * y[j];
        return out;
    };
    auto axpy = [n](const std::vector<double>& y, double c, const std::vector<double>& k) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + c * k[i];
        return out;
    };
    std::vector<double> y = std::move(y0);
    for (std::size_t step = 0; step < steps; ++step) {
        const double s = from + static_cast<double>(step) * h;
        const auto k1 = rhs(s, y);
        const auto k2 = rhs(s + 0.5 * h, axpy(y, 0.5 * h, k1));
        const auto k3 = rhs(s + 0.5 * h, axpy(y, 0.5 * h, k2));
        const auto k4 = rhs(s + h, axpy(y, h, k3));
        for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

std::vector<double> linear_bsde_lower_bound_deterministic(const MatrixFunction& f, const VectorFunction& k,
                                                          const std::vector<double>& xi, double t,
                                                          double horizon, std::size_t checks) {
    const std::size_t n = xi.size();
    if (n == 0) throw std::invalid_argument("linear_bsde_lower_bound: empty terminal value");
    if (!(t <= horizon)) throw std::invalid_argument("linear_bsde_lower_bound: need t <= T");
    for (double v : xi)
        if (!(v >= 0.0)) throw std::invalid_argument("linear_bsde_lower_bound: xi must be >= 0");
    for (std::size_t c = 0; c < std::max<std::size_t>(checks, 2); ++c) {
        const double s = t + (horizon - t) * static_cast<double>(c) / static_cast<double>(std::max<std::size_t>(checks, 2) - 1);
        const Matrix m = f(s);
        if (m.rows() != n || m.cols() != n) throw std::invalid_argument("linear_bsde_lower_bound: F shape mismatch");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && m(i, j) < 0.0)
                    throw std::invalid_argument("linear_bsde_lower_bound: F has a negative off-diagonal entry");
        if (k) {
            const auto kv = k(s);
            if (kv.size() != n) throw std::invalid_argument("linear_bsde_lower_bound: K shape mismatch");
            for (double v : kv)
                if (v < 0.0) throw std::invalid_argument("linear_bsde_lower_bound: K must be >= 0");
        }
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto fii = [&, i](double r) { return f(r)(i, i); };
        out[i] = xi[i] * std::exp(integrate(fii, t, horizon));
        if (k) {
            auto integrand = [&, i](double s) { return std::exp(integrate(fii, t, s)) * k(s)[i]; };
            out[i] += integrate(integrand, t, horizon);
        }
    }
    return out;
}

std::vector<double> linear_bsde_backward_solution(const MatrixFunction& f, const VectorFunction& k,
                                                  const std::vector<double>& xi, double t,
                                                  double horizon, std::size_t steps) {
    // -dY/ds = F Y + K, integrated from s = T down to s = t.
    auto neg_f = [&](double s) {
        Matrix m = f(s);
        m *= -1.0;
        return m;
    };
    VectorFunction neg_k;
    if (k) {
        neg_k = [&](double s) {
            auto v = k(s);
            for (auto& e : v) e = -e;
            return v;
        };
    }
    return integrate_linear_ode(neg_f, neg_k, xi, horizon, t, steps);
}

double CounterexampleParams::residual() const {
    return (horizon - tau) - std::exp(-(tau + horizon) / 2.0);
}

CounterexampleParams counterexample_tau(double horizon) {
    if (!(horizon >= 1.0) || !std::isfinite(horizon))
        throw std::invalid_argument("counterexample_tau: T must be >= 1");
    const double t = horizon;
    // g(tau) = (T - tau) - e^{-(tau+T)/2} falls from T - e^{-T/2} > 0 to -e^{-T} < 0.
    auto fn = [t](double tau) {
        const double e = std::exp(-(tau + t) / 2.0);
        return std::make_pair((t - tau) - e, -1.0 + 0.5 * e);
    };
    std::uintmax_t iterations = 200;
    const double tau = boost::math::tools::newton_raphson_iterate(
        fn, t - std::exp(-t), 0.0, t, std::numeric_limits<double>::digits - 2, iterations);
    CounterexampleParams p{t, tau, -2.0 * (t - tau), std::exp(-t)};
    if (!(tau > 0.0 && tau <= t) || std::abs(p.residual()) >= 1e-12)
        throw NumericalError("counterexample_tau: root finder did not converge");
    return p;
}

double malliavin_d1(double horizon, double t, double brownian_value) {
    if (!(t > 0.0 && t < horizon)) throw std::invalid_argument("malliavin_d1: need 0 < t < T");
    const double lead = std::exp(-horizon / 2.0);
    return lead * (lead - (horizon - t) * std::exp(t / 2.0) * std::cos(brownian_value));
}

double malliavin_d1_mean(double horizon, double t) {
    if (!(t > 0.0 && t < horizon)) throw std::invalid_argument("malliavin_d1_mean: need 0 < t < T");
    const double lead = std::exp(-horizon / 2.0);
    return lead * (lead - (horizon - t));
}

double counterexample_forward(const CounterexampleParams& p, double x) {
    const auto r = reduce(x);
    return p.alpha + p.beta * (kTwoPi * static_cast<double>(r.n) + cubic_gap(r.delta));
}

double counterexample_inverse(const CounterexampleParams& p, double y) {
    const double s = (y - p.alpha) / p.beta;
    const long n = std::lround(s / kTwoPi);
    return kTwoPi * static_cast<double>(n) + solve_cubic_gap(s - kTwoPi * static_cast<double>(n));
}

DensityValue counterexample_density(const CounterexampleParams& p, double y) {
    return density_from_y(p, y);
}

double counterexample_singular_point(const CounterexampleParams& p, long n) {
    return p.alpha + kTwoPi * static_cast<double>(n) * p.beta;
}

double counterexample_density_integral(const CounterexampleParams& p, double from, double to) {
    if (!(to >= from)) throw std::invalid_argument("counterexample_density_integral: need from <= to");
    const double period = kTwoPi * p.beta;
    const long first = static_cast<long>(std::ceil((from - p.alpha) / period));
    const long last = static_cast<long>(std::floor((to - p.alpha) / period));

    double total = 0.0;
    double left = from;
    std::optional<long> left_pole;
    if (first <= last && counterexample_singular_point(p, first) == from) left_pole = first;
    for (long n = first; n <= last; ++n) {
        const double pole = counterexample_singular_point(p, n);
        if (pole <= left) continue;
        total += integrate_piece(p, left, std::min(pole, to), left_pole, n);
        left = pole;
        left_pole = n;
    }
    if (left < to) total += integrate_piece(p, left, to, left_pole, std::nullopt);
    return total;
}

double counterexample_ks_distance(const CounterexampleParams& p, std::size_t samples, std::uint64_t seed,
                                  std::size_t grid, unsigned threads) {
    if (samples == 0 || grid < 2) throw std::invalid_argument("counterexample_ks_distance: empty sample or grid");
    const double sd = std::sqrt(p.tau);
    std::vector<double> draws(samples);
    parallel_for(samples, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            CounterStream rng(seed, k);
            draws[k] = counterexample_forward(p, sd * rng.normal());
        }
    });
    std::sort(draws.begin(), draws.end());

    const double reach = 8.0 * sd;
    std::vector<double> ys(grid);
    for (std::size_t k = 0; k < grid; ++k)
        ys[k] = counterexample_forward(p, -reach + 2.0 * reach * static_cast<double>(k) / static_cast<double>(grid - 1));

    std::vector<double> pieces(grid, 0.0);
    pieces[0] = counterexample_density_integral(p, counterexample_forward(p, -12.0 * sd), ys[0]);
    parallel_for(grid - 1, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) pieces[k + 1] = counterexample_density_integral(p, ys[k], ys[k + 1]);
    });

    double cdf = 0.0, worst = 0.0;
    const auto total = static_cast<double>(samples);
    for (std::size_t k = 0; k < grid; ++k) {
        cdf += pieces[k];
        const auto below = static_cast<double>(std::upper_bound(draws.begin(), draws.end(), ys[k]) - draws.begin());
        worst = std::max(worst, std::abs(below / total - cdf));
    }
    return worst;
}

std::optional<EnvelopeViolation> find_envelope_violation(const CounterexampleParams& p,
                                                         const GaussianSandwich& c, long lattice) {
    if (!(c.lower_sd > 0.0) || !(c.upper_sd > 0.0))
        throw std::invalid_argument("find_envelope_violation: standard deviations must be > 0");
    for (long n = -lattice; n <= lattice; ++n) {
        const double pole = counterexample_singular_point(p, n);
        for (int k = 1; k <= 15; ++k) {
            for (double side : {-1.0, 1.0}) {
                const double gap = side * std::pow(10.0, -k);
                const double y = pole + p.beta * gap;
                const auto d = density_from_gap(p, n, gap);
                const double z = (y - c.mean) * (y - c.mean);
                const double lo = c.lower * std::exp(-z / (2.0 * c.lower_sd * c.lower_sd));
                const double hi = c.upper * std::exp(-z / (2.0 * c.upper_sd * c.upper_sd));
                if (d.value > hi || d.value < lo) return EnvelopeViolation{y, d.value, lo, hi};
            }
        }
    }
    return std::nullopt;
}

namespace {

FixtureResult check(std::string name, double value, double target, double tol, std::string detail = {}) {
    const bool ok = std::abs(value - target) <= tol;
    return {std::move(name), ok, value, target, std::move(detail)};
}

FixtureResult flag(std::string name, bool ok, double value, double target, std::string detail) {
    return {std::move(name), ok, value, target, std::move(detail)};
}

struct RandomSystem {
    std::size_t n;
    std::vector<double> diag0, diag1, off0, off1, k0, xi;
    double omega;

    Matrix f(double s) const {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m(i, j) = i == j ? diag0[i] + diag1[i] * std::cos(omega * s)
                                 : off0[i * n + j] * (1.0 + 0.5 * std::sin(omega * s));
        return m;
    }
    std::vector<double> k(double s) const {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = k0[i] * (1.0 + 0.5 * std::cos(omega * s));
        return v;
    }
};

RandomSystem draw_system(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RandomSystem sys;
    sys.n = dim(rng);
    for (std::size_t i = 0; i < sys.n; ++i) {
        sys.diag0.push_back(-2.0 + 4.0 * unit(rng));
        sys.diag1.push_back(-1.0 + 2.0 * unit(rng));
        sys.k0.push_back(unit(rng));
        sys.xi.push_back(2.0 * unit(rng));
    }
    for (std::size_t e = 0; e < sys.n * sys.n; ++e) sys.off0.push_back(unit(rng));
    sys.omega = 0.5 + 3.0 * unit(rng);
    return sys;
}

}  // namespace

std::vector<FixtureResult> run_validation_suite(const ValidationOptions& options) {
    std::vector<FixtureResult> out;

    out.push_back(check("wazewski_zero_diagonal", wazewski_lower_bound([](double) { return 0.0; }, 1.7, 2.0),
                        1.7, 1e-14));
    {
        const Matrix a{{-1.0, 1.0}, {1.0, -1.0}};
        const auto u = integrate_linear_ode([&](double) { return a; }, {}, {1.0, 0.0}, 0.0, 1.0, 1000);
        const double bound = wazewski_lower_bound([](double) { return -1.0; }, 1.0, 1.0);
        out.push_back(check("wazewski_2x2_exact", u[0], (1.0 + std::exp(-2.0)) / 2.0, 1e-10));
        out.push_back(flag("wazewski_2x2_dominance", u[0] >= bound, u[0], bound, "u1(1) >= e^-1"));
    }
    {
        auto zero_f = [](double) { return Matrix(2, 2); };
        auto zero_k = [](double) { return std::vector<double>(2, 0.0); };
        const std::vector<double> xi{0.3, 1.2};
        const auto lb = linear_bsde_lower_bound_deterministic(zero_f, zero_k, xi, 0.0, 1.0);
        const auto ode = linear_bsde_backward_solution(zero_f, zero_k, xi, 0.0, 1.0);
        out.push_back(check("bsde_zero_coefficients", std::max(std::abs(lb[0] - xi[0]), std::abs(ode[1] - xi[1])),
                            0.0, 1e-15));
    }
    {
        auto f = [](double) { return Matrix{{-1.0}}; };
        auto k = [](double) { return std::vector<double>{1.0}; };
        const auto lb = linear_bsde_lower_bound_deterministic(f, k, {0.0}, 0.0, 1.0);
        const auto ode = linear_bsde_backward_solution(f, k, {0.0}, 0.0, 1.0);
        out.push_back(check("bsde_scalar_bound", lb[0], 1.0 - std::exp(-1.0), 1e-12));
        out.push_back(check("bsde_scalar_exact", ode[0], 1.0 - std::exp(-1.0), 1e-10));
    }
    {
        auto f = [](double) { return Matrix{{0.0, 1.0}, {1.0, 0.0}}; };
        const auto lb = linear_bsde_lower_bound_deterministic(f, {}, {1.0, 1.0}, 0.0, 1.0);
        const auto ode = linear_bsde_backward_solution(f, {}, {1.0, 1.0}, 0.0, 1.0);
        out.push_back(check("bsde_symmetric_bound", lb[0], 1.0, 1e-14));
        out.push_back(check("bsde_symmetric_exact", ode[0], std::numbers::e, 1e-10));
    }
    {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::size_t dominated = 0, waz_dominated = 0;
        double worst = 0.0;
        for (std::size_t s = 0; s < options.random_systems; ++s) {
            const auto sys = draw_system(rng);
            const double t = unit(rng);
            const double horizon = t + 0.1 + 1.9 * unit(rng);
            auto f = [&sys](double r) { return sys.f(r); };
            auto k = [&sys](double r) { return sys.k(r); };
            const auto lb = linear_bsde_lower_bound_deterministic(f, k, sys.xi, t, horizon);
            const auto ode = linear_bsde_backward_solution(f, k, sys.xi, t, horizon, 4000);
            bool ok = true;
            for (std::size_t i = 0; i < sys.n; ++i) {
                worst = std::min(worst, ode[i] - lb[i]);
                ok = ok && ode[i] >= lb[i] - 1e-9 * (1.0 + std::abs(lb[i]));
            }
            dominated += ok;

            // Forward system with the same coefficients and no forcing.
            const auto u = integrate_linear_ode(f, {}, sys.xi, 0.0, horizon, 4000);
            bool waz_ok = true;
            for (std::size_t i = 0; i < sys.n; ++i) {
                const double b = wazewski_lower_bound([&sys, i](double r) { return sys.f(r)(i, i); }, sys.xi[i],
                                                      horizon);
                waz_ok = waz_ok && u[i] >= b - 1e-9 * (1.0 + b);
            }
            waz_dominated += waz_ok;
        }
        const auto total = static_cast<double>(options.random_systems);
        out.push_back(flag("bsde_random_dominance", dominated == options.random_systems,
                           static_cast<double>(dominated), total,
                           "smallest ode - bound = " + std::to_string(worst)));
        out.push_back(flag("wazewski_random_dominance", waz_dominated == options.random_systems,
                           static_cast<double>(waz_dominated), total, "systems where RK4 dominates the bound"));
    }

    const auto p = counterexample_tau(1.0);
    out.push_back(check("tau_root_T1", p.tau, 0.536078094026931, 1e-12));
    out.push_back(check("tau_residual_T1", std::abs(p.residual()), 0.0, 1e-12));
    {
        const auto far = counterexample_tau(20.0);
        out.push_back(flag("tau_large_T", far.horizon - far.tau < 1e-8, far.horizon - far.tau, 0.0, "T - tau at T = 20"));
    }
    {
        const double x_star = std::acos(std::exp(-1.0) / (1.5 * std::exp(0.25)));
        const double below = malliavin_d1(2.0, 0.5, x_star - 0.1);
        const double above = malliavin_d1(2.0, 0.5, x_star + 0.1);
        out.push_back(flag("malliavin_sign_change", below < 0.0 && above > 0.0, below, above,
                           "values on both sides of the zero at B = " + std::to_string(x_star)));
        out.push_back(flag("malliavin_mean_negative", malliavin_d1_mean(2.0, 0.5) < 0.0, malliavin_d1_mean(2.0, 0.5),
                           0.0, "t < T - e^{-T/2}"));
        out.push_back(check("malliavin_cos_zero", malliavin_d1(2.0, 0.5, std::numbers::pi / 2.0), std::exp(-2.0),
                            1e-15));
    }
    {
        const double sd = std::sqrt(p.tau);
        const double mass =
            counterexample_density_integral(p, counterexample_forward(p, -12.0 * sd), counterexample_forward(p, 12.0 * sd));
        out.push_back(check("density_integrates_to_one", mass, 1.0, 1e-3));
        const auto at_pole = counterexample_density(p, p.alpha);
        out.push_back(flag("density_flags_singular_point", at_pole.singular, at_pole.value, 0.0, "y = alpha"));
    }
    out.push_back(check("counterexample_ks", counterexample_ks_distance(p, options.mc_samples, options.seed, 4001,
                                                                        options.threads),
                        0.0, 0.005, "KS distance, Monte Carlo vs integrated density"));
    {
        std::size_t violated = 0, candidates = 0;
        for (double upper : {1.0, 10.0, 1e3, 1e6}) {
            for (double lower : {1e-12, 1e-3, 0.1}) {
                for (double sd : {0.1, 1.0, 10.0}) {
                    ++candidates;
                    violated += find_envelope_violation(p, {lower, upper, sd, sd, p.alpha}).has_value();
                }
            }
        }
        out.push_back(flag("no_gaussian_envelope", violated == candidates, static_cast<double>(violated),
                           static_cast<double>(candidates), "candidate sandwiches broken near the singular lattice"));
    }
    {
        // Within 1e-2 of 2 pi n (n != 0) the forward map is flat to third order
        // and y cannot resolve x to 1e-10; there the backward error is checked.
        double worst_identity = 0.0, worst_residual = 0.0;
        for (int k = 0; k <= 4000; ++k) {
            const double x = -20.0 + 0.01 * k;
            const double y = counterexample_forward(p, x);
            const double back = counterexample_inverse(p, y);
            const auto r = reduce(x);
            if (r.n != 0 && std::abs(r.delta) < 1e-2) {
                const double ulp = std::nextafter(std::abs(y), INFINITY) - std::abs(y);
                worst_residual = std::max(worst_residual, std::abs(counterexample_forward(p, back) - y) / ulp);
            } else {
                worst_identity = std::max(worst_identity, std::abs(back - x));
            }
        }
        out.push_back(check("psi_inverse_identity", worst_identity, 0.0, 1e-10));
        out.push_back(check("psi_inverse_residual_near_lattice", worst_residual, 0.0, 2.0, "in units of ulp(y)"));
    }
    return out;
}

}  // namespace grnbounds
