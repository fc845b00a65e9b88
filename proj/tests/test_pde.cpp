#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "grnbounds/pde.hpp"

using namespace grnbounds;

TEST(PdeGrid, Validation) {
    const TimeWindow w(6.0, 3.0);
    PdeGrid g{9.0, 12.0, 64, 0.015};
    EXPECT_THROW(g.validate(w), std::invalid_argument);
    g.points_per_axis = 65;
    EXPECT_NO_THROW(g.validate(w));
    g.dt = 0.0;
    EXPECT_THROW(g.validate(w), std::invalid_argument);
}

TEST(PdeGrid, DefaultStep) {
    const auto g = default_grid(9.0, 12.0, TimeWindow(6.0, 3.0));
    EXPECT_EQ(g.points_per_axis, 65u);
    EXPECT_DOUBLE_EQ(g.dt, 3.0 / 200);
    EXPECT_DOUBLE_EQ(g.coordinate(32), 0.0);
}

TEST(ExtendFinalCondition, ClampsOutsideTheCube) {
    const auto fd = sample::mixed_final_data();
    const PdeGrid g{9.0, 12.0, 65, 0.015};
    auto h = extend_final_condition(fd, g, std::vector<double>{1.0, -2.0, 0.0});
    EXPECT_DOUBLE_EQ(h[0], 155.0);
    EXPECT_DOUBLE_EQ(h[1], 69.0);
    EXPECT_DOUBLE_EQ(h[2], 80.0);
    h = extend_final_condition(fd, g, std::vector<double>{42.0, -42.0, 0.0});
    EXPECT_DOUBLE_EQ(h[0], 5.0 * 21 + 150);
    EXPECT_DOUBLE_EQ(h[1], -0.5 * 21 + 70);
}

TEST(SolveFinalValue, HeatFlowKeepsAffineData) {
    const GeneNetwork net(Matrix(2, 2), {1.0, 1.0}, {1.0, 1.0});
    const GaussianFinalData fd({2.0, 0.5}, {10.0, 3.0});
    const TimeWindow w(2.0, 1.0);
    const PdeGrid g{4.0, 10.0, 57, 0.02};
    const auto field = solve_final_value(net, fd, g, w, SolverOptions{false, 1});
    for (std::size_t node = 0; node < field.node_count(); ++node) {
        const auto idx = field.node_index(node);
        const double x0 = g.coordinate(idx[0]);
        const double x1 = g.coordinate(idx[1]);
        if (std::abs(x0) > 4.0 || std::abs(x1) > 4.0) continue;
        EXPECT_NEAR(field.component(0)[node], 2.0 * x0 + 10.0, 1e-6);
        EXPECT_NEAR(field.component(1)[node], 0.5 * x1 + 3.0, 1e-6);
    }
}

TEST(SolveFinalValue, DecoupledClosedForm) {
    const auto net = sample::decoupled_network();
    const auto fd = sample::mixed_final_data();
    const auto w = sample::mixed_window();
    auto g = default_grid(9.0, 12.0, w);
    g.points_per_axis = 33;
    const auto field = solve_final_value(net, fd, g, w);
    for (std::size_t node = 0; node < field.node_count(); node += 7) {
        const auto idx = field.node_index(node);
        bool inside = true;
        for (auto k : idx) inside = inside && std::abs(g.coordinate(k)) <= 9.0;
        if (!inside) continue;
        for (std::size_t i = 0; i < 3; ++i) {
            const double e = std::exp(net.degradation()[i] * 3.0);
            const double exact = e * (fd.slope()[i] * g.coordinate(idx[i]) + fd.offset()[i]) -
                                 net.max_synthesis()[i] / (2 * net.degradation()[i]) * (e - 1);
            EXPECT_NEAR(field.component(i)[node], exact, 1e-3 * std::abs(exact));
        }
    }
}

TEST(SolveFinalValue, NeumannConservesMass) {
    const GeneNetwork net(Matrix(1, 1), {1.0}, {1.0});
    const GaussianFinalData fd({3.0}, {1.0});
    const TimeWindow w(1.0, 0.5);
    const PdeGrid g{1.0, 1.0, 41, 0.01};
    auto mass = [&](auto values) {
        double s = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k)
            s += (k == 0 || k + 1 == values.size() ? 0.5 : 1.0) * values[k];
        return s;
    };
    std::vector<double> initial;
    for (std::size_t k = 0; k < g.points_per_axis; ++k)
        initial.push_back(extend_final_condition(fd, g, std::vector<double>{g.coordinate(k)})[0]);
    const auto field = solve_final_value(net, fd, g, w, SolverOptions{false, 1});
    EXPECT_NEAR(mass(field.component(0)), mass(initial), 1e-10);
}

TEST(SolveFinalValue, ThreadCountDoesNotChangeBits) {
    const auto net = sample::mixed_network();
    const auto fd = sample::mixed_final_data();
    const auto w = sample::mixed_window();
    auto g = default_grid(9.0, 12.0, w);
    g.points_per_axis = 17;
    const auto one = solve_final_value(net, fd, g, w, SolverOptions{true, 1});
    const auto four = solve_final_value(net, fd, g, w, SolverOptions{true, 4});
    for (std::size_t i = 0; i < 3; ++i) {
        const auto a = one.component(i);
        const auto b = four.component(i);
        ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    }
}

TEST(SolveFinalValue, RejectsLargeNetworks) {
    const GeneNetwork net(Matrix(5, 5), std::vector<double>(5, 1.0), std::vector<double>(5, 1.0));
    const GaussianFinalData fd(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0));
    const TimeWindow w(1.0, 0.5);
    EXPECT_THROW(solve_final_value(net, fd, default_grid(1.0, 1.0, w), w), std::invalid_argument);
}

TEST(AmplitudeBound, Values) {
    const auto net = sample::mixed_network();
    const auto fd = sample::mixed_final_data();
    const auto at_horizon = theta_amplitude_bound(net, fd, TimeWindow(6.0, 6.0), std::vector<double>{-2.0, 0.0, 1.0});
    EXPECT_DOUBLE_EQ(at_horizon[0], 160.0);
    EXPECT_DOUBLE_EQ(at_horizon[2], 80.3);
    const auto mid = theta_amplitude_bound(net, fd, sample::mixed_window(), std::vector<double>(3, 0.0));
    EXPECT_NEAR(mid[0], std::exp(0.6) * 151.5, 1e-10);
    EXPECT_NEAR(mid[0], 276.1, 0.05);
}

TEST(AmplitudeBound, DominatesSolver) {
    const auto net = sample::mixed_network();
    const auto fd = sample::mixed_final_data();
    const auto w = sample::mixed_window();
    auto g = default_grid(9.0, 12.0, w);
    g.points_per_axis = 17;
    const auto field = solve_final_value(net, fd, g, w);
    for (std::size_t node = 0; node < field.node_count(); ++node) {
        const auto idx = field.node_index(node);
        std::vector<double> x;
        for (auto k : idx) x.push_back(g.coordinate(k));
        const auto bound = theta_amplitude_bound(net, fd, w, x);
        for (std::size_t i = 0; i < 3; ++i) ASSERT_LE(std::abs(field.component(i)[node]), bound[i]);
    }
}

TEST(BoundaryError, Values) {
    const auto net = sample::mixed_network();
    const auto fd = sample::mixed_final_data();
    const auto w = sample::mixed_window();
    EXPECT_NEAR(boundary_extension_error(net, fd, w, 6.0), 9.860438, 1e-5);
    EXPECT_NEAR(boundary_extension_error(net, fd, w, 12.0), 8.6046e-4, 1e-7);
    EXPECT_LT(boundary_extension_error(net, fd, w, 60.0), 1e-100);
}

TEST(ChooseMargin, Values) {
    const auto net = sample::mixed_network();
    const auto fd = sample::mixed_final_data();
    const auto w = sample::mixed_window();
    EXPECT_DOUBLE_EQ(choose_margin(net, fd, w, 1e-3), 12.0);
    EXPECT_DOUBLE_EQ(choose_margin(net, fd, w, 1e6), 0.5);
    double prev = 0.0;
    for (double tol = 1.0; tol > 1e-12; tol /= 2) {
        const double n = choose_margin(net, fd, w, tol);
        EXPECT_GE(n, prev);
        prev = n;
    }
}
