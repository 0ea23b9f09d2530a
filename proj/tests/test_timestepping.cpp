#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "hmc/timestepping.hpp"

using namespace hmc;

namespace {

HistoryRing<double> ring(std::initializer_list<double> newest_first) {
    HistoryRing<double> h(5);
    std::vector<double> v(newest_first);
    for (auto it = v.rbegin(); it != v.rend(); ++it) h.push(*it);
    return h;
}

} // namespace

TEST(Bdf, FirstOrder) {
    EXPECT_DOUBLE_EQ(bdf_derivative(1, ring({2.0, 1.0}), 1.0), 1.0);
}

TEST(Bdf, ConstantsAnnihilated) {
    for (int m = 1; m <= 4; ++m) EXPECT_NEAR(bdf_derivative(m, ring({3, 3, 3, 3, 3}), 0.1), 0.0, 1e-13);
}

TEST(Bdf, FourthOrderOnLinearFunction) {
    EXPECT_DOUBLE_EQ(bdf_derivative(4, ring({4, 3, 2, 1, 0}), 1.0), 1.0);
}

TEST(Bdf, WeightsSumToZero) {
    for (int m = 1; m <= 4; ++m) {
        const auto w = bdf_coefficients(m);
        EXPECT_NEAR(w[0] + w[1] + w[2] + w[3] + w[4], 0.0, 1e-15);
    }
    EXPECT_THROW(bdf_coefficients(5), InvalidArgument);
}

TEST(Bdf, InsufficientHistoryIsStateError) {
    EXPECT_THROW(bdf_derivative(3, ring({1, 2}), 1.0), StateError);
}

TEST(Bdf, VectorHistory) {
    HistoryRing<Eigen::VectorXd> h(3);
    h.push(Eigen::Vector2d(0, 1));
    h.push(Eigen::Vector2d(1, 1));
    h.push(Eigen::Vector2d(2, 1));
    const Eigen::VectorXd d = bdf_derivative(2, h, 0.5);
    EXPECT_NEAR(d(0), 2.0, 1e-14);
    EXPECT_NEAR(d(1), 0.0, 1e-14);
}

TEST(HistoryRingTest, CapacityDropsOldest) {
    HistoryRing<int> h(2);
    h.push(1);
    h.push(2);
    h.push(3);
    EXPECT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0], 3);
    EXPECT_EQ(h[1], 2);
}

TEST(RungeKutta, ZeroRateKeepsValue) {
    std::function<double(double, const double&)> f = [](double, const double&) { return 0.0; };
    EXPECT_EQ(rk_integrate(4, f, 2.5, 0.0, 0.1), 2.5);
    EXPECT_EQ(rk_integrate(1, f, 2.5, 0.0, 0.1), 2.5);
}

TEST(RungeKutta, ExponentialStep) {
    std::function<double(double, const double&)> f = [](double, const double& y) { return y; };
    const double y = rk_integrate(4, f, 1.0, 0.0, 0.1);
    EXPECT_NEAR(y, 1.1051708, 1e-7);
    EXPECT_LT(std::abs(y - std::exp(0.1)), 1e-7);
    EXPECT_DOUBLE_EQ(rk_integrate(1, f, 1.0, 0.0, 0.1), 1.1);
}

TEST(RungeKutta, NonFiniteStageRejected) {
    std::function<double(double, const double&)> f = [](double, const double&) { return std::nan(""); };
    EXPECT_THROW(rk_integrate(4, f, 1.0, 0.0, 0.1), DomainError);
    EXPECT_THROW(rk_integrate(2, f, 1.0, 0.0, 0.1), InvalidArgument);
}

TEST(Extrapolation, LinearStep) {
    EXPECT_DOUBLE_EQ(extrapolate(3.0, 1.0, 1.0, 1.0, 5), 5.0);
    EXPECT_DOUBLE_EQ(extrapolate(3.0, 1.0, 1.0, 1.0, 0), 3.0);
}

TEST(Extrapolation, ExactForLinearFunctionsAtAnyRatio) {
    for (double r : {0.25, 1.0, 3.0}) {
        const double dt_prev = 0.4, dt_now = r * dt_prev, t = 2.0;
        auto phi = [](double s) { return 1.5 * s - 0.7; };
        EXPECT_NEAR(extrapolate(phi(t), phi(t - dt_prev), dt_now, dt_prev, 1), phi(t + dt_now), 1e-14);
    }
}

TEST(Extrapolation, InvalidArguments) {
    EXPECT_THROW(extrapolate(1.0, 0.0, 1.0, 0.0, 1), InvalidArgument);
    EXPECT_THROW(extrapolate(1.0, 0.0, 1.0, 1.0, -1), InvalidArgument);
}

TEST(StepControllerTest, CflLimit) {
    const StepController sc(0.1, 1e4, 0.5);
    EXPECT_DOUBLE_EQ(sc.next(1e-4), 500.0);
    EXPECT_DOUBLE_EQ(StepController(0.1, 100.0, 0.5).next(1e-4), 100.0);
}

TEST(StepControllerTest, ZeroVelocityGivesMaximum) {
    const StepController sc(0.1, 2000.0, 0.5);
    EXPECT_DOUBLE_EQ(sc.next(0.0), 2000.0);
    EXPECT_DOUBLE_EQ(sc.next(1e-300), 2000.0);
    EXPECT_THROW(StepController(0.0, 1.0, 1.0), InvalidArgument);
}
