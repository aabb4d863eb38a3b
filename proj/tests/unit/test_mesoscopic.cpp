#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mesodrop/mesoscopic.hpp"
#include "support/hartree_oracles.hpp"
#include "support/square_well.hpp"

using namespace mesodrop;

namespace {

const Constants c;
const double Eu = c.pair_energy_unit();

SmoothedPotential gaussian_well(double V0, double a = 1.0)
{
    std::vector<double> grid;
    for (int i = 0; i <= 6000; ++i) grid.push_back(0.005 + i * (40.0 - 0.005) / 6000);
    return SmoothedPotential::from_function([=](double s) { return -V0 * std::exp(-s * s / (2 * a * a)); }, grid);
}

double box_ground(double R) { return std::numbers::pi * std::numbers::pi * 0.5 * c.hbar2_over_m() / (R * R); }

} // namespace

TEST(RadialGrid, Geometry)
{
    const RadialGrid g(10.0, 399);
    EXPECT_DOUBLE_EQ(g.spacing(), 10.0 / 400);
    EXPECT_DOUBLE_EQ(g.node(0), g.spacing());
    EXPECT_NEAR(g.node(398), 10.0 - g.spacing(), 1e-12);
    EXPECT_EQ(g.refined().size(), 799u);
    EXPECT_DOUBLE_EQ(g.refined().spacing(), 0.5 * g.spacing());
    EXPECT_THROW(RadialGrid(10.0, 199), ConfigError);
    EXPECT_NO_THROW(RadialGrid::coarse(10.0, 20));
}

TEST(RadialEigen, ParticleInSphere)
{
    const RadialGrid g(12.0, 400);
    const auto e = solve_radial_eigen([](double) { return 0.0; }, g, c);
    EXPECT_NEAR(e.energy, box_ground(12.0), 1e-4 * box_ground(12.0));
    EXPECT_NEAR(e.state.norm_check, 1.0, 1e-12);
    EXPECT_NEAR(e.kinetic, e.energy, 1e-10 * e.energy);
}

TEST(RadialEigen, SecondOrderConvergence)
{
    const double exact = box_ground(8.0);
    const RadialGrid g(8.0, 200);
    const auto coarse = solve_radial_eigen([](double) { return 0.0; }, g, c);
    const auto fine = solve_radial_eigen([](double) { return 0.0; }, g.refined(), c);
    const double ratio = (coarse.energy - exact) / (fine.energy - exact);
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
}

TEST(RadialEigen, HarmonicOscillator)
{
    // Oscillator length 1 angstrom: m omega = hbar / b^2.
    const double omega = c.hbar / (c.m * angstrom * angstrom);
    const double k = c.m * omega * omega * angstrom * angstrom;  // J per angstrom^2
    const RadialGrid g(10.0, 4000);
    const auto e = solve_radial_eigen([&](double r) { return 0.5 * k * r * r; }, g, c);
    EXPECT_NEAR(e.energy, 1.5 * c.hbar * omega, 1e-4 * 1.5 * c.hbar * omega);
}

TEST(RadialEigen, SquareWellWithRichardson)
{
    const double a = 3.0, V0 = Eu;
    const double exact = oracle::square_well_ground(V0, a, 0.5 * c.hbar2_over_m());
    auto well = [&](double r) {
        if (std::abs(r - a) < 1e-9 * a) return -0.5 * V0;  // node on the discontinuity takes the mean
        return r < a ? -V0 : 0.0;
    };
    const RadialGrid g(15.0, 1199);
    const double Eh = solve_radial_eigen(well, g, c).energy;
    const double Eh2 = solve_radial_eigen(well, g.refined(), c).energy;
    EXPECT_GT((Eh - exact) / (Eh2 - exact), 3.5);
    EXPECT_NEAR((4 * Eh2 - Eh) / 3, exact, 1e-6 * std::abs(exact));
}

TEST(RadialEigen, RefinementGuardRejectsCoarseGrids)
{
    const RadialGrid g(15.0, 200);
    EigenOptions opt;
    opt.refinement_tolerance = 1e-8;
    auto well = [&](double r) { return r < 3.0 ? -Eu : 0.0; };
    EXPECT_THROW(solve_radial_eigen(well, g, c, opt), NumericError);
    opt.refinement_tolerance = 1e-1;
    const auto e = solve_radial_eigen(well, g, c, opt);
    ASSERT_TRUE(e.refinement_shift.has_value());
    EXPECT_LT(*e.refinement_shift, 1e-1);
}

TEST(Hartree, MatchesBruteForceFunctionalDerivative)
{
    const PairPotential p;
    const auto sv = smooth_pair_potential(p, SmoothingKernel(0.6, 0.87520185), default_smoothing_grid());
    const auto grid = RadialGrid::coarse(12.0, 20);
    std::vector<double> phi(20);
    for (std::size_t i = 0; i < 20; ++i) {
        const double r = grid.node(i);
        phi[i] = std::exp(-r * r / 18.0) * (1 + 0.1 * r);
    }
    const auto op = make_order_parameter(grid, phi);
    const auto v = build_v_eff(op, sv, 3);
    const oracle::FunctionalDerivativeOracle fd({12.0, 20}, [&](double s) { return sv(s); }, 3);
    const auto expected = fd.v_eff(op.phi);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(v[i], expected[i], 1e-6 * std::abs(expected[i])) << i;
}

TEST(Hartree, TwoBodyScfMatchesGradientFlow)
{
    const double V0 = 20 * Eu;
    const RadialGrid g(15.0, 200);
    ScfOptions opt;
    opt.tol = 1e-12;
    opt.max_iter = 2000;
    const auto st = scf_solve(gaussian_well(V0), 2, g, c, opt);
    ASSERT_TRUE(st.converged);
    EXPECT_TRUE(st.bound);
    const oracle::GaussianGradientFlow flow({15.0, 200}, c.hbar2_over_m(), V0, 1.0, 2);
    const auto ref = flow.run(0.01 / Eu);
    EXPECT_NEAR(st.E_star, ref.mu, 1e-6 * std::abs(ref.mu));
    EXPECT_NEAR(st.E2_tilde, ref.energy, 1e-6 * std::abs(ref.energy));
    for (double n : st.norm_history) EXPECT_NEAR(n, 1.0, 1e-10);
}

TEST(Hartree, EnergyIdentity)
{
    // E2 = N <T> + N (N - 1) / 2 <rho|v|rho> and E* = <T> + (N - 1) <rho|v|rho> at self-consistency.
    const RadialGrid g(15.0, 200);
    ScfOptions opt;
    opt.tol = 1e-12;
    opt.max_iter = 2000;
    const auto st = scf_solve(gaussian_well(5 * Eu), 3, g, c, opt);
    ASSERT_TRUE(st.converged);
    EXPECT_NEAR(st.E2_tilde, 3 * st.kinetic + 3 * st.pair_energy, 1e-10 * std::abs(st.E2_tilde));
    EXPECT_NEAR(st.E_star, st.kinetic + 2 * st.pair_energy, 1e-8 * std::abs(st.E_star) + 1e-8 * st.kinetic);
}

TEST(Hartree, RepulsiveSmoothedPotentialIsUnbound)
{
    const PairPotential hard = PairPotential{}.without_tail();
    const auto sv = smooth_pair_potential(hard, SmoothingKernel(0.9, 0.87520185), default_smoothing_grid());
    for (double x : sv.values()) ASSERT_GT(x, 0.0);
    const auto st = scf_solve(sv, 10, RadialGrid(40.0, 300), c, ScfOptions{});
    EXPECT_FALSE(st.bound);
    EXPECT_GT(st.E_star, 0.0);
}

TEST(Hartree, NormalisationHeldEveryIteration)
{
    const PairPotential p;
    const auto sv = smooth_pair_potential(p, SmoothingKernel(0.6, 0.87520185), default_smoothing_grid());
    ScfOptions opt;
    opt.max_iter = 60;
    const auto st = scf_solve(sv, 100, RadialGrid(40.0, 300), c, opt);
    ASSERT_FALSE(st.norm_history.empty());
    for (double n : st.norm_history) EXPECT_NEAR(n, 1.0, 1e-10);
}

TEST(ChemicalPotential, ConstantWithoutInteraction)
{
    const auto zero = SmoothedPotential::zero(default_smoothing_grid());
    const RadialGrid g(20.0, 300);
    const auto rows = chemical_potential_probe(zero, std::vector<long long>{2, 10, 100, 1000}, g, c, ScfOptions{});
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.mu, rows.front().mu, 1e-12 * std::abs(rows.front().mu));
    }
    EXPECT_NEAR(rows.front().mu, box_ground(20.0), 1e-3 * box_ground(20.0));
}

TEST(XiScan, PicksLowestBoundEnergy)
{
    SmoothedFactory factory = [](double xi) { return gaussian_well((10.0 + 20.0 * std::sin(3.0 * xi)) * Eu); };
    XiScanOptions opt;
    opt.scf.tol = 1e-10;
    opt.scf.max_iter = 2000;
    const std::vector<double> xis{0.2, 0.5, 0.8};
    const auto res = xi_scan(factory, xis, 2, RadialGrid(15.0, 200), c, opt);
    ASSERT_EQ(res.rows.size(), 3u);
    EXPECT_TRUE(res.argmin_bound);
    // Deepest well at xi = pi / 6 lies between 0.2 and 0.8.
    EXPECT_NEAR(res.argmin_xi, std::numbers::pi / 6, 0.05);
}
