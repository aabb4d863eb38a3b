#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mesodrop/numerics/quadrature.hpp"
#include "mesodrop/numerics/spline.hpp"
#include "mesodrop/numerics/tridiagonal.hpp"

using namespace mesodrop::numerics;

TEST(Quadrature, ExactForPolynomialsAndSmoothFunctions)
{
    const auto p = integrate([](double x) { return 3 * x * x - 2 * x + 1; }, -1.0, 2.0);
    EXPECT_NEAR(p.value, 9.0 - 3.0 + 3.0, 1e-13);
    const auto e = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    EXPECT_NEAR(e.value, std::sqrt(std::numbers::pi), 1e-13);
    EXPECT_TRUE(e.converged);
}

TEST(Quadrature, BreakpointsHandleKinks)
{
    QuadratureTolerance tol;
    tol.relative = 1e-12;
    const auto r = integrate_pieces([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {0.3}, tol);
    EXPECT_NEAR(r.value, 0.5 * 0.09 + 0.5 * 0.49, 1e-14);
}

TEST(Quadrature, EmptyIntervalIsZero)
{
    EXPECT_EQ(integrate([](double) { return 1.0; }, 1.0, 1.0).value, 0.0);
}

TEST(Spline, InterpolatesNodesAndCubicsExactlyInside)
{
    std::vector<double> x, y;
    for (int i = 0; i <= 40; ++i) {
        x.push_back(0.1 * i);
        y.push_back(std::sin(0.1 * i));
    }
    const CubicSpline s(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(s(x[i]), y[i], 1e-14);
    for (double t = 0.55; t < 3.5; t += 0.37) {
        EXPECT_NEAR(s(t), std::sin(t), 2e-6);
        EXPECT_NEAR(s.derivative(t), std::cos(t), 2e-4);
    }
}

TEST(Tridiagonal, LowestEigenpairOfDiscreteLaplacian)
{
    const std::size_t n = 50;
    SymTridiagonal t;
    t.diag.assign(n, 2.0);
    t.off.assign(n - 1, -1.0);
    const auto e = lowest_eigenpair(t);
    const double exact = 2.0 - 2.0 * std::cos(std::numbers::pi / (n + 1));
    EXPECT_NEAR(e.value, exact, 1e-13);
    EXPECT_EQ(sturm_count(t, exact - 1e-9), 0u);
    EXPECT_EQ(sturm_count(t, exact + 1e-9), 1u);
    // Residual of the returned vector.
    double res = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double Av = 2.0 * e.vector[i];
        if (i > 0) Av -= e.vector[i - 1];
        if (i + 1 < n) Av -= e.vector[i + 1];
        res = std::max(res, std::abs(Av - e.value * e.vector[i]));
        norm += e.vector[i] * e.vector[i];
    }
    EXPECT_LT(res, 1e-10);
    EXPECT_NEAR(norm, 1.0, 1e-12);
}
