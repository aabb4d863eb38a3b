#pragma once

// Bare He-4 pair interaction (Aziz HFDHE2) and analysis of its well.

#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "mesodrop/error.hpp"
#include "mesodrop/units.hpp"

namespace mesodrop {

/// Anything callable as v(r) with r in angstrom, returning joule.
template <class P>
concept RadialPotential = requires(const P& p, double r) {
    { p(r) } -> std::convertible_to<double>;
};

template <class P>
concept HasDerivative = requires(const P& p, double r) {
    { p.derivative(r) } -> std::convertible_to<double>;
};

/// Radii where the potential is only C^1; finite-difference stencils avoid straddling them.
template <class P>
concept HasKinks = requires(const P& p) {
    { p.kink_points() } -> std::convertible_to<std::vector<double>>;
};

struct PairPotential {
    double eps_over_kB = 10.8;   // K
    double r_m = 2.9673;         // angstrom
    double A = 0.5448504e6;
    double alpha = 13.353384;
    double C6 = 1.3732412;
    double C8 = 0.4253785;
    double C10 = 0.178100;
    double D = 1.241314;
    double k_B = Constants{}.k_B;

    static PairPotential aziz_hfdhe2(const Constants& c = {})
    {
        PairPotential p;
        p.k_B = c.k_B;
        return p;
    }

    [[nodiscard]] double energy_scale() const { return eps_over_kB * k_B; }

    /// v(r) in joule.
    [[nodiscard]] double operator()(double r) const
    {
        if (!(r > 0.0)) throw ConfigError("pair potential needs r > 0, got " + std::to_string(r));
        const double x = r / r_m;
        return energy_scale() * (A * std::exp(-alpha * x) - dispersion(x) * damping(x));
    }

    /// dv/dr in J / angstrom.
    [[nodiscard]] double derivative(double r) const
    {
        if (!(r > 0.0)) throw ConfigError("pair potential needs r > 0");
        const double x = r / r_m;
        const auto [S, dS, d2S] = dispersion_terms(x);
        const auto [F, dF, d2F] = damping_terms(x);
        (void)d2S;
        (void)d2F;
        const double tail = F > 0.0 ? dS * F + S * dF : 0.0;
        return energy_scale() / r_m * (-alpha * A * std::exp(-alpha * x) - tail);
    }

    /// d^2v/dr^2 in J / angstrom^2.
    [[nodiscard]] double second_derivative(double r) const
    {
        if (!(r > 0.0)) throw ConfigError("pair potential needs r > 0");
        const double x = r / r_m;
        const auto [S, dS, d2S] = dispersion_terms(x);
        const auto [F, dF, d2F] = damping_terms(x);
        const double tail = F > 0.0 ? d2S * F + 2.0 * dS * dF + S * d2F : 0.0;
        return energy_scale() / (r_m * r_m) * (alpha * alpha * A * std::exp(-alpha * x) - tail);
    }

    [[nodiscard]] std::vector<double> kink_points() const { return {D * r_m}; }

    /// Same shape with every length multiplied by `factor`.
    [[nodiscard]] PairPotential with_length_scale(double factor) const
    {
        PairPotential p = *this;
        p.r_m *= factor;
        return p;
    }

    [[nodiscard]] PairPotential with_energy_scale(double factor) const
    {
        PairPotential p = *this;
        p.eps_over_kB *= factor;
        return p;
    }

    /// Purely repulsive variant: the dispersion tail switched off.
    [[nodiscard]] PairPotential without_tail() const
    {
        PairPotential p = *this;
        p.C6 = p.C8 = p.C10 = 0.0;
        return p;
    }

private:
    [[nodiscard]] double dispersion(double x) const
    {
        const double x2 = 1.0 / (x * x);
        const double x6 = x2 * x2 * x2;
        return x6 * (C6 + x2 * (C8 + x2 * C10));
    }

    [[nodiscard]] double damping(double x) const
    {
        if (x >= D) return 1.0;
        const double t = D / x - 1.0;
        return std::exp(-t * t);
    }

    [[nodiscard]] std::array<double, 3> dispersion_terms(double x) const
    {
        const double S = dispersion(x);
        const double dS = -6.0 * C6 * std::pow(x, -7) - 8.0 * C8 * std::pow(x, -9) - 10.0 * C10 * std::pow(x, -11);
        const double d2S = 42.0 * C6 * std::pow(x, -8) + 72.0 * C8 * std::pow(x, -10) + 110.0 * C10 * std::pow(x, -12);
        return {S, dS, d2S};
    }

    [[nodiscard]] std::array<double, 3> damping_terms(double x) const
    {
        if (x >= D) return {1.0, 0.0, 0.0};
        const double F = damping(x);
        const double t = D / x - 1.0;
        const double g1 = 2.0 * t * D / (x * x);
        const double g2 = -2.0 * D * D / (x * x * x * x) - 4.0 * D * t / (x * x * x);
        return {F, g1 * F, (g2 + g1 * g1) * F};
    }
};

/// Convenience wrapper matching the functional interface.
inline double evaluate(const PairPotential& p, double r) { return p(r); }

struct WellAnalysis {
    double r_min = 0.0;        // angstrom
    double depth = 0.0;        // J
    double k = 0.0;            // J / angstrom^2
    double omega = 0.0;        // rad/s
    double rest_energy = 0.0;  // J, hbar omega / 2
    double curvature_step = 0.0;         // angstrom, final finite-difference step
    double curvature_convergence = 0.0;  // relative change between the last two Richardson estimates

    [[nodiscard]] double k_newton_per_metre() const { return k / (angstrom * angstrom); }
};

struct WellOptions {
    double r_lo = 2.0;
    double r_hi = 4.5;
    double step = 1e-3;
    double curvature_rtol = 1e-6;
    int scan_points = 400;
};

namespace detail {

template <RadialPotential P>
double second_difference(const P& v, double r, double h)
{
    return (v(r + h) - 2.0 * v(r) + v(r - h)) / (h * h);
}

template <RadialPotential P>
double richardson_curvature(const P& v, double r, double h)
{
    return (4.0 * second_difference(v, r, 0.5 * h) - second_difference(v, r, h)) / 3.0;
}

} // namespace detail

/// Locates the single interior minimum of v on [r_lo, r_hi] by a scan followed by
/// root-finding on v' (analytic derivative when available, Brent otherwise).
template <RadialPotential P>
double locate_minimum(const P& v, const WellOptions& opt = {})
{
    if (!(opt.r_hi > opt.r_lo) || !(opt.r_lo > 0.0)) throw ConfigError("invalid minimisation bracket");
    const int n = std::max(opt.scan_points, 8);
    const double dr = (opt.r_hi - opt.r_lo) / n;
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double value = v(opt.r_lo + i * dr);
        if (value < best_v) {
            best_v = value;
            best = i;
        }
    }
    if (best == 0 || best == n) {
        throw NoMinimumError("no minimum found: potential is monotone on [" + std::to_string(opt.r_lo) + ", " +
                             std::to_string(opt.r_hi) + "] angstrom");
    }
    const double a = opt.r_lo + (best - 1) * dr;
    const double b = opt.r_lo + (best + 1) * dr;

    if constexpr (HasDerivative<P>) {
        auto dv = [&](double r) { return v.derivative(r); };
        if (dv(a) < 0.0 && dv(b) > 0.0) {
            boost::uintmax_t iters = 200;
            auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lo); };
            const auto [lo, hi] = boost::math::tools::toms748_solve(dv, a, b, tol, iters);
            // Pick the endpoint with the smaller |v'|.
            return std::abs(dv(lo)) <= std::abs(dv(hi)) ? lo : hi;
        }
    }
    boost::uintmax_t iters = 500;
    const auto res = boost::math::tools::brent_find_minima([&](double r) { return v(r); }, a, b,
                                                           std::numeric_limits<double>::digits, iters);
    return res.first;
}

/// Minimum position, depth, curvature and the harmonic rest energy hbar*omega/2.
template <RadialPotential P>
WellAnalysis analyze_well(const P& v, const Constants& constants, const WellOptions& opt = {})
{
    WellAnalysis w;
    w.r_min = locate_minimum(v, opt);
    w.depth = v(w.r_min);

    double h = opt.step;
    if constexpr (HasKinks<P>) {
        for (double kink : v.kink_points()) {
            const double gap = std::abs(kink - w.r_min);
            if (gap < h) h = 0.5 * gap;
        }
    }
    if (!(h > 0.0)) throw NumericError("minimum sits on a kink of the potential");

    double estimate = detail::richardson_curvature(v, w.r_min, h);
    double change = std::numeric_limits<double>::infinity();
    for (int refine = 0; refine < 8; ++refine) {
        const double finer = detail::richardson_curvature(v, w.r_min, 0.5 * h);
        change = std::abs(finer - estimate) / std::max(std::abs(finer), std::numeric_limits<double>::min());
        estimate = finer;
        h *= 0.5;
        if (change <= opt.curvature_rtol) break;
    }
    w.k = estimate;
    w.curvature_step = h;
    w.curvature_convergence = change;
    if (!(w.k > 0.0)) throw NumericError("stationary point is not a minimum (curvature <= 0)");
    if (change > opt.curvature_rtol) throw NumericError("curvature did not converge under step refinement");

    w.omega = std::sqrt(w.k_newton_per_metre() / constants.m);
    w.rest_energy = 0.5 * constants.hbar * w.omega;
    return w;
}

} // namespace mesodrop
