#pragma once

// Physical constants and the droplet scale hierarchy.
//
// Lengths are carried in angstrom and energies in joule everywhere inside the
// library. Kelvin only appears at I/O boundaries.

#include <cmath>

#include "mesodrop/error.hpp"

namespace mesodrop {

inline constexpr double angstrom = 1e-10; // m

struct Constants {
    double hbar = 1.054571817e-34;  // J s
    double k_B = 1.380649e-23;      // J/K
    double m = 6.6464731e-27;       // kg, He-4 atom

    /// hbar^2 / m expressed in J * angstrom^2.
    [[nodiscard]] double hbar2_over_m() const { return hbar * hbar / m / (angstrom * angstrom); }
    /// Characteristic kinetic energy hbar^2 / (m * 1 angstrom^2), in J.
    [[nodiscard]] double pair_energy_unit() const { return hbar2_over_m(); }
};

inline constexpr double kelvin_to_joule(double kelvin, const Constants& c = {}) { return kelvin * c.k_B; }
inline constexpr double joule_to_kelvin(double joule, const Constants& c = {}) { return joule / c.k_B; }

struct DropletSpec {
    long long N = 1000;
    double l = 3.6;        // nearest-neighbour distance, angstrom
    double epsilon = 0.1;  // l / L
    double L = 36.0;       // droplet size, angstrom
    double n = 1.0 / (3.6 * 3.6 * 3.6); // number density, angstrom^-3
};

inline constexpr double default_spacing = 3.6;

/// Canonical droplet: epsilon = N^(-1/3), L = l N^(1/3), n = l^-3.
inline DropletSpec make_droplet(long long N, double l = default_spacing)
{
    if (N < 2) throw ConfigError("droplet needs N >= 2");
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("nearest-neighbour distance l must be positive");
    DropletSpec d;
    d.N = N;
    d.l = l;
    const double cube_root = std::cbrt(static_cast<double>(N));
    d.epsilon = 1.0 / cube_root;
    d.L = l * cube_root;
    d.n = 1.0 / (l * l * l);
    return d;
}

/// Ratio epsilon(N) / epsilon(N_ref); positions in the N-frame are this factor times the reference ones.
inline double epsilon_ratio(long long N, long long N_ref)
{
    return std::cbrt(static_cast<double>(N_ref) / static_cast<double>(N));
}

} // namespace mesodrop
