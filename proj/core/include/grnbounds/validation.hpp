#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grnbounds/matrix.hpp"

namespace grnbounds {

using ScalarFunction = std::function<double(double)>;
using MatrixFunction = std::function<Matrix(double)>;
using VectorFunction = std::function<std::vector<double>(double)>;

/// u0_i exp(int_0^t a_ii(s) ds), the integral by adaptive Gauss-Kronrod.
double wazewski_lower_bound(const ScalarFunction& a_ii, double u0, double t);

/// Classical RK4 for dy/ds = A(s) y + k(s) from s = from to s = to (either
/// direction). `forcing` may be empty.
std::vector<double> integrate_linear_ode(const MatrixFunction& a, const VectorFunction& forcing,
                                         std::vector<double> y0, double from, double to,
                                         std::size_t steps);

/// Componentwise lower bound for the linear BSDE with deterministic
/// coefficients, -dY = (F Y + K) dt, Y_T = xi:
///   xi_i e^{int_t^T F_ii} + int_t^T e^{int_t^s F_ii dr} K_i(s) ds.
/// The sign hypotheses (xi >= 0, K >= 0, F_ij >= 0 off the diagonal) are
/// checked on a grid of `checks` points in [t, T].
std::vector<double> linear_bsde_lower_bound_deterministic(const MatrixFunction& f, const VectorFunction& k,
                                                          const std::vector<double>& xi, double t,
                                                          double horizon, std::size_t checks = 65);

/// Y_t of the same system by backward RK4 (the exact solution up to O(h^4)).
std::vector<double> linear_bsde_backward_solution(const MatrixFunction& f, const VectorFunction& k,
                                                  const std::vector<double>& xi, double t,
                                                  double horizon, std::size_t steps = 2000);

/// Parameters of the map Y = alpha + beta (B_tau - sin B_tau).
struct CounterexampleParams {
    double horizon;
    double tau;    ///< root of T - tau = e^{-(tau + T)/2}
    double alpha;  ///< -2 (T - tau)
    double beta;   ///< e^{-T}

    /// (T - tau) - e^{-(tau + T)/2}
    double residual() const;
};

/// Requires T >= 1. Beyond T ~ 37 the gap T - tau is below double resolution
/// and tau rounds to T.
CounterexampleParams counterexample_tau(double horizon);

/// D_r Y^1_t = e^{-T/2} (e^{-T/2} - (T - t) e^{t/2} cos B_t), 0 < t < T.
double malliavin_d1(double horizon, double t, double brownian_value);

/// Expectation of malliavin_d1 over B_t ~ N(0, t): e^{-T/2} (e^{-T/2} - (T - t)).
double malliavin_d1_mean(double horizon, double t);

/// alpha + beta (x - sin x).
double counterexample_forward(const CounterexampleParams& p, double x);

/// The unique x with counterexample_forward(p, x) = y.
double counterexample_inverse(const CounterexampleParams& p, double y);

struct DensityValue {
    double value;   ///< p_tau(x) / (beta (1 - cos x)); +inf when singular
    bool singular;  ///< |1 - cos x| < 1e-12
};

DensityValue counterexample_density(const CounterexampleParams& p, double y);

/// alpha + 2 pi n beta, where the density has a pole.
double counterexample_singular_point(const CounterexampleParams& p, long n);

/// Integral of the density over [from, to] by tanh-sinh quadrature, split at
/// every singular point inside.
double counterexample_density_integral(const CounterexampleParams& p, double from, double to);

/// Kolmogorov-Smirnov distance between `samples` draws of alpha + beta
/// (B_tau - sin B_tau) and the CDF obtained by integrating the density.
/// The supremum is taken over a grid of `grid` points evenly spaced in x over
/// +-8 sqrt(tau), mapped to y. Draw k uses CounterStream(seed, k).
double counterexample_ks_distance(const CounterexampleParams& p, std::size_t samples, std::uint64_t seed,
                                  std::size_t grid = 4001, unsigned threads = 1);

/// Candidate Gaussian sandwich
///   lower * e^{-(y-mean)^2 / (2 lower_sd^2)} <= density <= upper * e^{-(y-mean)^2 / (2 upper_sd^2)}.
struct GaussianSandwich {
    double lower;
    double upper;
    double lower_sd;
    double upper_sd;
    double mean;
};

struct EnvelopeViolation {
    double y;
    double density;
    double lower;
    double upper;
};

/// Scans y_n + s beta 10^{-k} for n in [-lattice, lattice], s = +-1 and
/// k = 1..15 and returns the first point where the density leaves the
/// sandwich, if any.
std::optional<EnvelopeViolation> find_envelope_violation(const CounterexampleParams& p,
                                                         const GaussianSandwich& candidate,
                                                         long lattice = 2);

struct FixtureResult {
    std::string name;
    bool passed;
    double value;
    double target;
    std::string detail;
};

struct ValidationOptions {
    std::size_t mc_samples = 1'000'000;
    std::uint64_t seed = 20240501;
    std::size_t random_systems = 100;
    unsigned threads = 1;
};

/// Every closed-form fixture, each reported pass/fail.
std::vector<FixtureResult> run_validation_suite(const ValidationOptions& options = {});

}  // namespace grnbounds
