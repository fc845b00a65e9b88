#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "grnbounds/validation.hpp"

using namespace grnbounds;

TEST(Wazewski, ZeroDiagonalKeepsInitialValue) {
    EXPECT_DOUBLE_EQ(wazewski_lower_bound([](double) { return 0.0; }, 2.5, 3.0), 2.5);
}

TEST(Wazewski, CooperativeSystemDominates) {
    const auto a = [](double) { return Matrix{{-1.0, 1.0}, {1.0, -1.0}}; };
    const auto u = integrate_linear_ode(a, {}, {1.0, 0.0}, 0.0, 1.0, 1000);
    EXPECT_NEAR(u[0], 0.5 * (1 + std::exp(-2.0)), 1e-10);
    EXPECT_NEAR(wazewski_lower_bound([](double) { return -1.0; }, 1.0, 1.0), std::exp(-1.0), 1e-12);
    EXPECT_GE(u[0], std::exp(-1.0));
}

TEST(LinearBsde, ZeroCoefficients) {
    const auto zero = [](double) { return Matrix(2, 2); };
    const auto none = [](double) { return std::vector<double>(2, 0.0); };
    const std::vector<double> xi{1.5, 2.0};
    EXPECT_EQ(linear_bsde_lower_bound_deterministic(zero, none, xi, 0.0, 1.0), xi);
    const auto y = linear_bsde_backward_solution(zero, none, xi, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(y[0], 1.5);
    EXPECT_DOUBLE_EQ(y[1], 2.0);
}

TEST(LinearBsde, ScalarBoundIsExact) {
    const auto f = [](double) { return Matrix{{-1.0}}; };
    const auto k = [](double) { return std::vector<double>{1.0}; };
    const auto lb = linear_bsde_lower_bound_deterministic(f, k, {0.0}, 0.0, 1.0);
    const auto y = linear_bsde_backward_solution(f, k, {0.0}, 0.0, 1.0);
    EXPECT_NEAR(lb[0], 1 - std::exp(-1.0), 1e-10);
    EXPECT_NEAR(y[0], 1 - std::exp(-1.0), 1e-10);
}

TEST(LinearBsde, SymmetricSystem) {
    const auto f = [](double) { return Matrix{{0.0, 1.0}, {1.0, 0.0}}; };
    const auto k = [](double) { return std::vector<double>(2, 0.0); };
    const auto lb = linear_bsde_lower_bound_deterministic(f, k, {1.0, 1.0}, 0.0, 1.0);
    const auto y = linear_bsde_backward_solution(f, k, {1.0, 1.0}, 0.0, 1.0);
    EXPECT_NEAR(lb[0], 1.0, 1e-12);
    EXPECT_NEAR(y[0], std::numbers::e, 1e-10);
    EXPECT_GE(y[1], lb[1]);
}

TEST(LinearBsde, NegativeOffDiagonalIsRejected) {
    const auto f = [](double) { return Matrix{{0.0, -1.0}, {1.0, 0.0}}; };
    const auto k = [](double) { return std::vector<double>(2, 0.0); };
    EXPECT_THROW(linear_bsde_lower_bound_deterministic(f, k, {1.0, 1.0}, 0.0, 1.0), std::invalid_argument);
}

TEST(Counterexample, TauRoot) {
    const auto p = counterexample_tau(1.0);
    EXPECT_NEAR(p.tau, 0.536078094026931, 1e-12);
    EXPECT_LT(std::abs(p.residual()), 1e-12);
    EXPECT_DOUBLE_EQ(p.alpha, -2.0 * (1.0 - p.tau));
    EXPECT_DOUBLE_EQ(p.beta, std::exp(-1.0));
}

TEST(Counterexample, TauApproachesHorizon) {
    double prev = 1.0;
    for (double horizon : {2.0, 5.0, 10.0, 20.0}) {
        const auto p = counterexample_tau(horizon);
        const double gap = horizon - p.tau;
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 1e-8);
}

TEST(Counterexample, MalliavinSigns) {
    EXPECT_DOUBLE_EQ(malliavin_d1(2.0, 0.5, std::numbers::pi / 2), std::exp(-2.0));
    const double x = std::acos(std::exp(-1.0) / (1.5 * std::exp(0.25)));
    EXPECT_LT(malliavin_d1(2.0, 0.5, x - 0.1), 0.0);
    EXPECT_GT(malliavin_d1(2.0, 0.5, x + 0.1), 0.0);
    EXPECT_NEAR(malliavin_d1(2.0, 0.5, x), 0.0, 1e-15);
    EXPECT_LT(malliavin_d1(2.0, 0.5, 0.0), 0.0);
    EXPECT_GT(malliavin_d1(2.0, 0.5, std::numbers::pi), 0.0);
    EXPECT_LT(malliavin_d1_mean(2.0, 0.5), 0.0);
}

TEST(Counterexample, InverseRoundTrip) {
    const auto p = counterexample_tau(1.0);
    for (double x : {-7.0, -1.0, 0.0, 0.3, 2.0, 6.0, 13.0}) {
        const double y = counterexample_forward(p, x);
        EXPECT_NEAR(counterexample_inverse(p, y), x, 1e-10 * std::max(1.0, std::abs(x)));
    }
}

TEST(Counterexample, InverseResidualNearFlatPoints) {
    // x - sin x is flat at the lattice, so only the backward error is small there.
    const auto p = counterexample_tau(1.0);
    for (double x : {-1e-4, 3e-6, 2 * std::numbers::pi + 1e-5}) {
        const double y = counterexample_forward(p, x);
        EXPECT_NEAR(counterexample_forward(p, counterexample_inverse(p, y)), y, 4e-16 * std::max(1.0, std::abs(y)));
    }
}

TEST(Counterexample, DensityIsSingularAtLattice) {
    const auto p = counterexample_tau(1.0);
    const auto at_alpha = counterexample_density(p, p.alpha);
    EXPECT_TRUE(at_alpha.singular);
    const auto at_pole = counterexample_density(p, counterexample_singular_point(p, 1));
    EXPECT_TRUE(at_pole.singular);
    const auto regular = counterexample_density(p, p.alpha + 0.5 * p.beta);
    EXPECT_FALSE(regular.singular);
    EXPECT_GT(regular.value, 0.0);
}

TEST(Counterexample, DensityIntegratesToOne) {
    const auto p = counterexample_tau(1.0);
    const double half = 12.0 * std::sqrt(p.tau) * p.beta + 2.0 * std::numbers::pi * p.beta;
    EXPECT_NEAR(counterexample_density_integral(p, p.alpha - half, p.alpha + half), 1.0, 1e-3);
}

TEST(Counterexample, NoGaussianEnvelope) {
    const auto p = counterexample_tau(1.0);
    const GaussianSandwich wide{1e-6, 1e6, 0.01, 100.0, p.alpha};
    EXPECT_TRUE(find_envelope_violation(p, wide).has_value());
}

TEST(ValidationSuite, AllFixturesPass) {
    for (const auto& r : run_validation_suite()) EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
}
