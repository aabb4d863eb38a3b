#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mesodrop/mesoscopic.hpp"
#include "mesodrop/shortscale.hpp"

using namespace mesodrop;

namespace {

const Constants c;
const double Eu = c.pair_energy_unit();
constexpr double kappa = 0.87520185;

struct Fixture {
    PairPotential p;
    SmoothingKernel k{0.35, kappa};
    SmoothedPotential sv = smooth_pair_potential(p, k, default_smoothing_grid());
};

const Fixture& he()
{
    static const Fixture f;
    return f;
}

struct Quadratic {
    double scale;
    double operator()(double s) const { return scale * s * s; }
};

} // namespace

TEST(PairPoisson, ConstantSourceHasClosedForm)
{
    // b'' + (2/s) b' = 2 q with q constant: b = q (s^2 - S^2) / 3.
    const double V0 = 0.7 * Eu;
    const auto sv = SmoothedPotential::zero(default_smoothing_grid(50));
    PairSolveOptions opt;
    opt.n_points = 201;
    const auto r = solve_pair_response([&](double) { return V0; }, sv, 3.0, 5.0, c, opt);
    const double q = V0 / Eu;
    for (std::size_t i = 0; i < r.s_grid.size(); ++i) {
        const double s = r.s_grid[i];
        EXPECT_NEAR(r.b[i], q * (s * s - 25.0) / 3.0, 1e-12) << s;
        EXPECT_NEAR(r.db_ds[i], 2.0 * q * s / 3.0, 1e-12) << s;
    }
}

TEST(PairPoisson, QuadraticSourceHasClosedForm)
{
    // q = a s^2: b' = 2 a s^3 / 5, b = a (s^4 - S^4) / 10.
    const auto sv = SmoothedPotential::zero(default_smoothing_grid(50));
    PairSolveOptions opt;
    opt.n_points = 101;
    const double a = 0.3;
    const auto r = solve_pair_response(Quadratic{a * Eu}, sv, 2.0, 4.0, c, opt);
    for (std::size_t i = 0; i < r.s_grid.size(); ++i) {
        const double s = r.s_grid[i];
        EXPECT_NEAR(r.db_ds[i], 0.4 * a * s * s * s, 1e-11) << s;
        EXPECT_NEAR(r.b[i], a * (std::pow(s, 4) - 256.0) / 10.0, 1e-10) << s;
    }
}

TEST(PairPoisson, HeliumResidualAndAnchoring)
{
    const auto& f = he();
    const double s_max = 0.5 * 0.35 * 36.0;
    const auto r = solve_pair_response(f.p, f.sv, 3.52, s_max, c);
    EXPECT_LE(r.residual_max, 1e-8 * r.potential_max);
    EXPECT_EQ(r.b.back(), 0.0);
    EXPECT_NEAR(r.subtracted, f.sv(3.52), 0.0);
    const double C = compute_pair_C(r, f.k);
    EXPECT_GE(C, 0.0);
    EXPECT_TRUE(std::isfinite(C));
}

TEST(PairPoisson, SmaxInsideCoreIsRejected)
{
    const auto& f = he();
    const double core = core_radius(f.p);
    EXPECT_GT(core, 2.5);
    EXPECT_LT(core, 2.7);
    EXPECT_NEAR(f.p(core), 0.0, 1e-30);
    EXPECT_THROW(solve_pair_response(f.p, f.sv, 3.52, 0.9 * core, c), ConfigError);
}

TEST(PairPoisson, WeakAndStrongEquationsCoincide)
{
    const auto& f = he();
    PairSolveOptions opt;
    opt.n_points = 401;
    const auto strong = solve_pair_response(f.p, f.sv, 3.52, 6.3, c, opt);
    const auto weak = weak_case_psi2(f.p, f.sv, 3.52, 6.3, c, opt);
    ASSERT_EQ(strong.b.size(), weak.b.size());
    for (std::size_t i = 0; i < weak.b.size(); ++i) EXPECT_EQ(strong.b[i], weak.b[i]);
    EXPECT_EQ(weak.kind, ResponseKind::weak);
}

TEST(PairC, DegenerateKernelAndGenericWeight)
{
    const auto sv = SmoothedPotential::zero(default_smoothing_grid(50));
    PairSolveOptions opt;
    opt.n_points = 401;
    const double V0 = Eu;
    const auto r = solve_pair_response([&](double) { return V0; }, sv, 3.0, 5.0, c, opt);
    // b' = 2 s / 3 so C at a delta kernel on s = 3 is 4.
    EXPECT_NEAR(compute_pair_C(r, SmoothingKernel(0.0, 1.0)), 4.0, 1e-10);
    // Uniform weight: mean of (2s/3)^2 over [0, 5] = 4/9 * 25/3.
    EXPECT_NEAR(compute_pair_C(r, [](double) { return 1.0; }), 4.0 / 9.0 * 25.0 / 3.0, 1e-10);
    EXPECT_THROW(compute_pair_C(r, [](double) { return -1.0; }), ConfigError);
}

TEST(Scaling, ExponentsAreTwoAndOne)
{
    const auto& f = he();
    const std::vector<double> eps{0.1, 0.05, 0.025};
    PairSolveOptions opt;
    opt.n_points = 801;
    const auto weak = amplitude_scaling_study(f.p, f.sv, eps, ResponseKind::weak, 3.52, 6.3, c, opt);
    const auto strong = amplitude_scaling_study(f.p, f.sv, eps, ResponseKind::strong, 3.52, 6.3, c, opt);
    EXPECT_NEAR(weak.fitted_exponent, 2.0, 1e-6);
    EXPECT_NEAR(strong.fitted_exponent, 1.0, 1e-6);
    EXPECT_LT(weak.fit_residual, 1e-8);
    EXPECT_THROW(amplitude_scaling_study(f.p, f.sv, std::vector<double>{0.1, 0.05}, ResponseKind::weak, 3.52, 6.3, c, opt),
                 ConfigError);
    EXPECT_THROW(amplitude_scaling_study(f.p, f.sv, std::vector<double>{0.1, 0.1, 0.05}, ResponseKind::weak, 3.52, 6.3, c,
                                         opt),
                 ConfigError);
}

TEST(Scaling, LogLogFitRecoversPowerLaw)
{
    const std::vector<double> x{1, 2, 4, 8};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
    const auto f = fit_log_log(x, y);
    EXPECT_NEAR(f.slope, 1.7, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
}

TEST(CorrectedPotential, AddingCNeverLowersTheGroundState)
{
    const auto& f = he();
    PairSolveOptions opt;
    opt.n_points = 401;
    const auto R = uniform_grid(0.5, 20.0, 30);
    const auto C = pair_C_profile(f.p, f.sv, f.k, R, 6.3, c, opt);
    for (double x : C) EXPECT_GE(x, 0.0);
    EigenOptions eo;
    eo.mass_scale = 0.5;
    const RadialGrid g(20.0, 400);
    for (double eps : {0.1, 0.05}) {
        const auto star = f.sv.strong_scaled(eps);
        const auto corrected = corrected_mesoscopic_potential(R, C, star, c);
        const double e0 = solve_radial_eigen([&](double r) { return star(r); }, g, c, eo).energy;
        const double e1 = solve_radial_eigen([&](double r) { return corrected(r); }, g, c, eo).energy;
        EXPECT_GE(e1, e0) << eps;
    }
    EXPECT_THROW(corrected_mesoscopic_potential(R, C, f.sv, c), ConfigError);
}
