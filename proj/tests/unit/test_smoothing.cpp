#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mesodrop/smoothing.hpp"

using namespace mesodrop;

namespace {

constexpr double kappa = 0.87520185;

struct Quadratic {
    double operator()(double r) const { return r * r; }
};

struct Constant {
    double operator()(double) const { return 2.5; }
};

struct Zero {
    double operator()(double) const { return 0.0; }
};

} // namespace

TEST(Kernel, Widths)
{
    const SmoothingKernel k(0.5, 2.0);
    EXPECT_DOUBLE_EQ(k.sigma(), 1.0);
    EXPECT_NEAR(k.pair_width(), std::sqrt(2.0), 1e-15);
    EXPECT_TRUE(SmoothingKernel(0.0, 1.0).degenerate());
    EXPECT_THROW(SmoothingKernel(-0.1, 1.0), ConfigError);
    EXPECT_THROW(SmoothingKernel(0.1, 0.0), ConfigError);
}

TEST(Smoothing, DegenerateKernelReturnsBarePotential)
{
    const PairPotential p;
    const SmoothingKernel k(0.0, kappa);
    for (double R : {2.0, 2.97, 4.0, 9.0}) EXPECT_EQ(smoothed_value(p, k, R), p(R));
    const auto mc = mc_oracle(p, k, 3.0, 10000, 1);
    EXPECT_EQ(mc.estimate, p(3.0));
    EXPECT_EQ(mc.std_error, 0.0);
}

TEST(Smoothing, ConstantIsPreservedAndKernelIsNormalised)
{
    const SmoothingKernel k(0.6, kappa);
    for (double R : {0.3, 1.0, 5.0}) EXPECT_NEAR(smoothed_value(Constant{}, k, R), 2.5, 1e-9);
}

TEST(Smoothing, QuadraticGainsThreePairVariances)
{
    // E|R + X|^2 = R^2 + 3 w^2 for an isotropic Gaussian X of per-component width w.
    const SmoothingKernel k(0.9, kappa);
    const double w = k.pair_width();
    for (double R : {0.5, 2.0, 7.0}) {
        SmoothingTolerance tol;
        tol.cutoff_widths = 14.0;
        EXPECT_NEAR(smoothed_value(Quadratic{}, k, R, tol), R * R + 3 * w * w, 1e-8 * (R * R + 3 * w * w)) << R;
    }
}

TEST(Smoothing, TableMatchesDirectQuadratureBetweenNodes)
{
    const PairPotential p;
    const SmoothingKernel k(0.35, kappa);
    const auto sv = smooth_pair_potential(p, k, default_smoothing_grid());
    EXPECT_EQ(sv.grid().size(), 600u);
    for (double R : {2.2, 3.3, 3.52, 4.77, 8.1, 15.3}) {
        const double direct = smoothed_value(p, k, R);
        EXPECT_NEAR(sv(R), direct, 1e-5 * std::abs(direct) + 1e-28) << R;
    }
    EXPECT_EQ(sv(40.0), 0.0);
    EXPECT_TRUE(sv.covers(30.0));
    EXPECT_FALSE(sv.covers(30.1));
}

TEST(Smoothing, SmoothingRaisesTheWell)
{
    const PairPotential p;
    const auto bare = analyze_well(p, Constants{});
    double previous = bare.depth;
    for (double xi : {0.35, 0.60, 0.90}) {
        const auto w = smoothed_minimum(p, SmoothingKernel(xi, kappa));
        EXPECT_GT(w.depth, previous) << xi;
        EXPECT_GT(w.r_min, bare.r_min) << xi;
        previous = w.depth;
    }
}

TEST(Smoothing, CalibrationHitsItsTarget)
{
    const PairPotential p;
    const auto cal = calibrate_kappa(p, 0.35, 3.52);
    EXPECT_NEAR(cal.r_achieved, 3.52, 1e-6);
    EXPECT_NEAR(cal.kappa, kappa, 1e-5);
    EXPECT_THROW(calibrate_kappa(p, 0.0, 3.52), ConfigError);
}

TEST(Smoothing, RescaledFrameScalesPositionsOnly)
{
    const PairPotential p;
    const SmoothingKernel k(0.6, kappa);
    const auto base = smoothed_minimum(p, k);
    const auto f = rescaled_frame(p, k, 0.1);
    const auto scaled = smoothed_minimum(f.potential, f.kernel, smoothed_well_bracket(0.1));
    EXPECT_NEAR(scaled.r_min / base.r_min, 0.1, 1e-6);
    EXPECT_NEAR(scaled.depth, base.depth, 1e-9 * std::abs(base.depth));
}

TEST(MonteCarlo, AgreesWithQuadratureAcrossRegimes)
{
    const PairPotential p;
    int seed = 11;
    for (double xi : {0.35, 0.9}) {
        const SmoothingKernel k(xi, kappa);
        for (double R : {1.5, 3.52, 8.0}) {
            const double q = smoothed_value(p, k, R);
            const auto mc = mc_oracle(p, k, R, 200000, seed++);
            EXPECT_LE(std::abs(q - mc.estimate), 4.0 * mc.std_error) << xi << " " << R;
        }
    }
}

TEST(MonteCarlo, DeterministicAndIsotropic)
{
    const PairPotential p;
    const SmoothingKernel k(0.6, kappa);
    const auto a = mc_oracle(p, k, 4.0, 50000, 99);
    const auto b = mc_oracle(p, k, 4.0, 50000, 99);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.std_error, b.std_error);
    const auto c = mc_oracle(p, k, 4.0, 50000, 100, {1.0, 1.0, -0.5});
    EXPECT_LE(std::abs(a.estimate - c.estimate), 3.0 * std::hypot(a.std_error, c.std_error));
}

TEST(MonteCarlo, ZeroPotentialGivesZero)
{
    const auto mc = mc_oracle(Zero{}, SmoothingKernel(0.5, kappa), 3.0, 10000, 5);
    EXPECT_EQ(mc.estimate, 0.0);
    EXPECT_EQ(mc.std_error, 0.0);
    EXPECT_THROW(mc_oracle(Zero{}, SmoothingKernel(0.5, kappa), 3.0, 9999, 5), ConfigError);
}

TEST(Smoothing, StrongScalingDividesByEpsilon)
{
    const auto sv = SmoothedPotential::from_function([](double r) { return -1.0 / (1.0 + r * r); },
                                                     default_smoothing_grid(50));
    const auto s = sv.strong_scaled(0.1);
    ASSERT_TRUE(s.strong_epsilon().has_value());
    for (double R : {0.7, 3.0, 12.0}) EXPECT_NEAR(s(R), sv(R) / 0.1, 1e-12);
    EXPECT_THROW(sv.strong_scaled(1.0), ConfigError);
}

TEST(Smoothing, TotalPotentialSumsPairs)
{
    const auto sv = SmoothedPotential::from_function([](double r) { return std::exp(-r); }, default_smoothing_grid(200));
    const TotalSmoothedPotential total(sv);
    const std::vector<Vec3> pts{{0, 0, 0}, {3, 0, 0}, {0, 4, 0}};
    const auto sum = total.evaluate(pts);
    EXPECT_NEAR(sum.value, sv(3.0) + sv(4.0) + sv(5.0), 1e-14);
    EXPECT_EQ(sum.out_of_range, 0u);
}
