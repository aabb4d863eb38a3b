#include <cmath>

#include <gtest/gtest.h>

#include "mesodrop/units.hpp"

using namespace mesodrop;

TEST(Units, KelvinJouleRoundTrip)
{
    const Constants c;
    for (double K : {-10.8, -0.03, 0.0, 1.0, 5.57e3}) {
        EXPECT_NEAR(joule_to_kelvin(kelvin_to_joule(K, c), c), K, 1e-12 * std::max(1.0, std::abs(K)));
    }
    EXPECT_DOUBLE_EQ(kelvin_to_joule(1.0, c), 1.380649e-23);
}

TEST(Units, DropletScales)
{
    const auto d = make_droplet(1000);
    EXPECT_NEAR(d.epsilon, 0.1, 1e-15);
    EXPECT_NEAR(d.L, 36.0, 1e-12);
    EXPECT_NEAR(d.n * d.l * d.l * d.l, 1.0, 1e-15);
    EXPECT_NEAR(make_droplet(1000000).epsilon, 0.01, 1e-15);
}

TEST(Units, EpsilonRatio)
{
    EXPECT_NEAR(epsilon_ratio(1000000, 1000), 0.1, 1e-15);
    EXPECT_NEAR(epsilon_ratio(1000, 1000), 1.0, 0.0);
    EXPECT_NEAR(epsilon_ratio(8000, 1000) * epsilon_ratio(1000, 8000), 1.0, 1e-15);
}

TEST(Units, RejectsInvalidDroplets)
{
    EXPECT_THROW(make_droplet(1), ConfigError);
    EXPECT_THROW(make_droplet(100, 0.0), ConfigError);
    EXPECT_THROW(make_droplet(100, -3.6), ConfigError);
}

TEST(Units, EnergyUnitIsHbarSquaredOverMassAngstromSquared)
{
    const Constants c;
    const double expected = c.hbar * c.hbar / (c.m * angstrom * angstrom);
    EXPECT_NEAR(c.pair_energy_unit(), expected, 1e-12 * expected);
}
