#pragma once

// Short-scale response in pair-reduced form.
//
// With B = sum over pairs of b(|r_i - r_j|), each pair obeys the radial Poisson problem
//
//   (1/s^2) (s^2 b')' = 2 q(s),   q(s) = (v(s) - v~(R)) / E_u,   E_u = hbar^2 / (m * 1 angstrom^2),
//
// with b'(0) = 0 and b(s_max) = 0. Writing I(s) = Int_0^s 2 t^2 q dt gives b' = I / s^2 and,
// after integrating by parts,
//
//   b(s) = I(S) / S - I(s) / s - Int_s^S 2 t q dt,   S = s_max.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mesodrop/error.hpp"
#include "mesodrop/numerics/parallel.hpp"
#include "mesodrop/numerics/quadrature.hpp"
#include "mesodrop/potential.hpp"
#include "mesodrop/smoothing.hpp"
#include "mesodrop/units.hpp"

namespace mesodrop {

enum class ResponseKind { strong, weak };

inline const char* to_string(ResponseKind k) { return k == ResponseKind::strong ? "strong" : "weak"; }

struct PairResponse {
    ResponseKind kind = ResponseKind::strong;
    std::vector<double> s_grid;  // angstrom
    std::vector<double> b;       // dimensionless
    std::vector<double> db_ds;   // 1 / angstrom
    double R_context = 0.0;      // angstrom
    double s_max = 0.0;          // angstrom
    double subtracted = 0.0;     // v~(R_context), J
    double energy_unit = 0.0;    // E_u, J
    double source_max = 0.0;     // max |source| on the grid, E_u
    double potential_max = 0.0;  // max |lambda v| on the grid, E_u
    double residual_max = 0.0;   // max interior Poisson residual, E_u
    std::vector<double> residual;  // per-node Poisson residual, E_u (zero at the ends)
};

struct PairSolveOptions {
    std::size_t n_points = 2001;
    double lambda = 1.0;           // coupling multiplying the whole source
    double quadrature_rtol = 1e-12;
    double residual_step = 1e-3;   // angstrom, finite-difference step for the residual check
};

/// First radius where v turns from repulsive to attractive; 0 when it never does.
template <RadialPotential P>
double core_radius(const P& v, double lo = 1e-3, double hi = 1e3)
{
    constexpr int n = 800;
    const double ratio = std::log(hi / lo) / n;
    double prev_r = lo;
    double prev_v = v(lo);
    for (int i = 1; i <= n; ++i) {
        const double r = lo * std::exp(ratio * i);
        const double value = v(r);
        if (prev_v > 0.0 && value <= 0.0) {
            auto f = [&](double x) { return v(x); };
            boost::uintmax_t iters = 100;
            auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::abs(a); };
            const auto [a, b] = boost::math::tools::toms748_solve(f, prev_r, r, tol, iters);
            return 0.5 * (a + b);
        }
        prev_r = r;
        prev_v = value;
    }
    return 0.0;
}

namespace detail {

template <RadialPotential P>
PairResponse solve_pair_poisson(const P& v, double subtracted, double R_context, double s_max, const Constants& c,
                                const PairSolveOptions& opt, ResponseKind kind)
{
    if (!(s_max > 0.0) || !std::isfinite(s_max)) throw ConfigError("pair response needs s_max > 0");
    if (opt.n_points < 5) throw ConfigError("pair response grid needs at least 5 points");
    if (!std::isfinite(subtracted)) throw ConfigError("subtracted smoothed value is not finite");
    const double core = core_radius(v);
    if (core > 0.0 && s_max <= core) {
        throw ConfigError("s_max = " + std::to_string(s_max) + " angstrom lies inside the repulsive core (" +
                          std::to_string(core) + " angstrom)");
    }

    PairResponse out;
    out.kind = kind;
    out.R_context = R_context;
    out.s_max = s_max;
    out.subtracted = subtracted;
    out.energy_unit = c.pair_energy_unit();

    const double inv_unit = opt.lambda / out.energy_unit;
    auto q = [&](double t) { return (v(t) - subtracted) * inv_unit; };
    const auto kinks = kinks_of(v);
    numerics::QuadratureTolerance tol;
    tol.relative = opt.quadrature_rtol;
    tol.absolute = 0.0;
    auto integral = [&](auto&& f, double a, double b) {
        if (a == b) return 0.0;
        const double lo = std::min(a, b);
        const double hi = std::max(a, b);
        const auto r = numerics::integrate_pieces(f, lo, hi, kinks, tol);
        if (!std::isfinite(r.value)) throw NumericError("pair response quadrature failed");
        return a < b ? r.value : -r.value;
    };
    auto moment2 = [&](double t) { return 2.0 * t * t * q(t); };
    auto moment1 = [&](double t) { return 2.0 * t * q(t); };

    const std::size_t n = opt.n_points;
    out.s_grid = uniform_grid(0.0, s_max, n);
    std::vector<double> I(n, 0.0), J(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        I[k] = I[k - 1] + integral(moment2, out.s_grid[k - 1], out.s_grid[k]);
        J[k] = J[k - 1] + integral(moment1, out.s_grid[k - 1], out.s_grid[k]);
    }
    out.b.resize(n);
    out.db_ds.resize(n);
    const double S = s_max;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = out.s_grid[k];
        const double I_over_s = k == 0 ? 0.0 : I[k] / s;
        out.b[k] = I[n - 1] / S - I_over_s - (J[n - 1] - J[k]);
        out.db_ds[k] = k == 0 ? 0.0 : I[k] / (s * s);
    }
    out.b[n - 1] = 0.0;

    // Residual of the Poisson equation at interior nodes: (1/s^2) I'(s) - 2 q(s), with I'
    // from a sixth-order central difference of quadrature increments.
    std::vector<double> residual(n, 0.0);
    std::vector<double> qmax(n, 0.0), vmax(n, 0.0);
    numerics::parallel_for(n, [&](std::size_t k) {
        const double s = out.s_grid[k];
        if (s > 0.0) {
            qmax[k] = std::abs(q(s));
            vmax[k] = std::abs(v(s) * inv_unit);
        }
        if (k == 0 || k + 1 == n) return;
        const double d = std::min(opt.residual_step, s / 8.0);
        // Seven-point central difference, I(s + j d) - I(s - j d) for j = 1..3.
        double span[4] = {0.0, 0.0, 0.0, 0.0};
        for (int j = 1; j <= 3; ++j) {
            span[j] = span[j - 1] + integral(moment2, s + (j - 1) * d, s + j * d) +
                      integral(moment2, s - j * d, s - (j - 1) * d);
        }
        const double dI = (45.0 * span[1] - 9.0 * span[2] + span[3]) / (60.0 * d);
        residual[k] = std::abs(dI / (s * s) - 2.0 * q(s));
    });
    out.residual_max = *std::max_element(residual.begin(), residual.end());
    out.residual = std::move(residual);
    out.source_max = *std::max_element(qmax.begin(), qmax.end());
    out.potential_max = *std::max_element(vmax.begin(), vmax.end());
    return out;
}

/// Composite Simpson over uniformly spaced samples (trapezoid on a trailing odd interval).
inline double simpson(std::span<const double> x, std::span<const double> f)
{
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
    const std::size_t last = (n - 1) % 2 == 0 ? n - 1 : n - 2;
    double s = 0.0;
    for (std::size_t i = 0; i + 2 <= last; i += 2) s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    if (last != n - 1) s += 0.5 * h * (f[n - 2] + f[n - 1]);
    return s;
}

} // namespace detail

/// Strong-coupling pair response b for the envelope separation R_context.
template <RadialPotential P>
PairResponse solve_pair_response(const P& v, const SmoothedPotential& sv, double R_context, double s_max,
                                 const Constants& c = {}, const PairSolveOptions& opt = {})
{
    if (!(R_context > 0.0) || !sv.covers(R_context)) throw ConfigError("R_context lies outside the smoothed table");
    return detail::solve_pair_poisson(v, sv(R_context), R_context, s_max, c, opt, ResponseKind::strong);
}

/// Weak-coupling residual W (Psi_2 = epsilon^2 W Phi_0). The equation coincides with the
/// strong-case pair equation once the envelope is factored out.
template <RadialPotential P>
PairResponse weak_case_psi2(const P& v, const SmoothedPotential& sv, double R_context, double s_max,
                            const Constants& c = {}, const PairSolveOptions& opt = {})
{
    if (!(R_context > 0.0) || !sv.covers(R_context)) throw ConfigError("R_context lies outside the smoothed table");
    return detail::solve_pair_poisson(v, sv(R_context), R_context, s_max, c, opt, ResponseKind::weak);
}

/// Weighted average of |b'|^2 over [0, s_max] for an arbitrary non-negative weight.
inline double compute_pair_C(const PairResponse& resp, const std::function<double(double)>& weight)
{
    const std::size_t n = resp.s_grid.size();
    if (n < 2 || resp.db_ds.size() != n) throw ConfigError("pair response is empty or malformed");
    std::vector<double> w(n), wg(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = weight(resp.s_grid[i]);
        if (!(w[i] >= 0.0)) throw ConfigError("pair weight must be non-negative");
        wg[i] = w[i] * resp.db_ds[i] * resp.db_ds[i];
    }
    const double mass = detail::simpson(resp.s_grid, w);
    if (!(mass > 0.0)) throw NumericError("pair weight has no mass on the response domain");
    return std::max(0.0, detail::simpson(resp.s_grid, wg) / mass);
}

/// C_pair: |b'|^2 averaged with the radial density of the pair separation under the
/// smoothing kernel centred on R_context. Dimensionless (angstrom^-2 in E_u * angstrom^2).
inline double compute_pair_C(const PairResponse& resp, const SmoothingKernel& kernel)
{
    if (kernel.degenerate()) {
        // The kernel collapses onto s = R_context.
        const auto& s = resp.s_grid;
        if (resp.R_context >= s.back()) return 0.0;
        const auto it = std::upper_bound(s.begin(), s.end(), resp.R_context);
        const std::size_t k = static_cast<std::size_t>(it - s.begin());
        const double t = (resp.R_context - s[k - 1]) / (s[k] - s[k - 1]);
        const double g = (1.0 - t) * resp.db_ds[k - 1] + t * resp.db_ds[k];
        return g * g;
    }
    const double w = kernel.pair_width();
    const double R = resp.R_context;
    return compute_pair_C(resp, [&](double s) { return s > 0.0 ? detail::pair_kernel_density(R, w, s) : 0.0; });
}

/// C in joule for a response: E_u * C_pair.
inline double pair_C_joule(const PairResponse& resp, double C_pair) { return resp.energy_unit * C_pair; }

// ---------------------------------------------------------------------------
// Amplitude scaling
// ---------------------------------------------------------------------------

struct ScalingRecord {
    ResponseKind coupling = ResponseKind::strong;
    std::vector<double> epsilon_values;
    std::vector<double> relative_amplitudes;
    std::vector<double> response_max;  // max |b| or max |W| before the epsilon factor
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;         // RMS of the log-log residuals
    double lambda = 1.0;
    double R_context = 0.0;
    double s_max = 0.0;
};

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

inline LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ConfigError("log-log fit needs matching samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw NumericError("log-log fit needs positive samples");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    const double den = dn * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) throw ConfigError("log-log fit needs distinct abscissae");
    LogLogFit f;
    f.slope = (dn * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / dn;
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::log(y[i]) - (f.intercept + f.slope * std::log(x[i]));
        r2 += e * e;
    }
    f.rms = std::sqrt(r2 / dn);
    return f;
}

/// Short-scale relative amplitude versus epsilon. Strong coupling works with the rescaled
/// potentials V / epsilon and reports max |epsilon b|; weak coupling reports max |epsilon^2 W|.
template <RadialPotential P>
ScalingRecord amplitude_scaling_study(const P& v, const SmoothedPotential& sv, std::span<const double> epsilons,
                                      ResponseKind coupling, double R_context, double s_max,
                                      const Constants& c = {}, PairSolveOptions opt = {})
{
    if (epsilons.size() < 3) throw ConfigError("scaling study needs at least 3 epsilon values");
    std::vector<double> sorted(epsilons.begin(), epsilons.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError("scaling study needs distinct epsilon values");
    }
    for (double e : epsilons) {
        if (!(e > 0.0 && e < 1.0)) throw ConfigError("epsilon values must lie in (0, 1)");
    }

    ScalingRecord rec;
    rec.coupling = coupling;
    rec.epsilon_values.assign(epsilons.begin(), epsilons.end());
    rec.relative_amplitudes.resize(epsilons.size());
    rec.response_max.resize(epsilons.size());
    rec.lambda = opt.lambda;
    rec.R_context = R_context;
    rec.s_max = s_max;

    // Epsilon points are independent; each solve runs its own residual loop serially.
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        const double eps = epsilons[i];
        PairResponse r;
        double factor = 0.0;
        if (coupling == ResponseKind::strong) {
            // Strong scaling: the potential is V / eps; the O(1) pair equation carries eps * (V* - V~*).
            const auto sv_star = sv.strong_scaled(eps);
            auto v_star = [&](double s) { return v(s) / eps; };
            PairSolveOptions scaled = opt;
            scaled.lambda = opt.lambda * eps;
            r = detail::solve_pair_poisson(v_star, sv_star(R_context), R_context, s_max, c, scaled,
                                           ResponseKind::strong);
            factor = eps;
        } else {
            r = weak_case_psi2(v, sv, R_context, s_max, c, opt);
            factor = eps * eps;
        }
        double peak = 0.0;
        for (double x : r.b) peak = std::max(peak, std::abs(x));
        rec.response_max[i] = peak;
        rec.relative_amplitudes[i] = factor * peak;
    }
    const auto fit = fit_log_log(rec.epsilon_values, rec.relative_amplitudes);
    rec.fitted_exponent = fit.slope;
    rec.fit_residual = fit.rms;
    return rec;
}

/// Same study with epsilon taken from a list of droplets.
template <RadialPotential P>
ScalingRecord amplitude_scaling_study(const P& v, const SmoothedPotential& sv, std::span<const DropletSpec> droplets,
                                      ResponseKind coupling, double R_context, double s_max,
                                      const Constants& c = {}, const PairSolveOptions& opt = {})
{
    std::vector<double> eps;
    eps.reserve(droplets.size());
    for (const auto& d : droplets) eps.push_back(d.epsilon);
    return amplitude_scaling_study(v, sv, std::span<const double>(eps), coupling, R_context, s_max, c, opt);
}

// ---------------------------------------------------------------------------
// Strong-case effective potential
// ---------------------------------------------------------------------------

/// C_pair at each envelope separation (parallel across R).
template <RadialPotential P>
std::vector<double> pair_C_profile(const P& v, const SmoothedPotential& sv, const SmoothingKernel& kernel,
                                   std::span<const double> R_values, double s_max, const Constants& c = {},
                                   PairSolveOptions opt = {})
{
    std::vector<double> out(R_values.size());
    numerics::parallel_for(R_values.size(), [&](std::size_t i) {
        const auto r = solve_pair_response(v, sv, R_values[i], s_max, c, opt);
        out[i] = compute_pair_C(r, kernel);
    });
    return out;
}

struct CorrectedPotential {
    std::vector<double> R;       // angstrom
    std::vector<double> C;       // J
    std::vector<double> v_star;  // J
    SmoothedPotential total;     // C + V~*, J

    [[nodiscard]] double operator()(double r) const { return total(r); }
};

/// C(R) + V~*(R) tabulated on the R grid of the C_pair profile.
inline CorrectedPotential corrected_mesoscopic_potential(std::span<const double> R_values,
                                                         std::span<const double> C_pair, const SmoothedPotential& sv_star,
                                                         const Constants& c = {})
{
    if (R_values.size() != C_pair.size()) throw ConfigError("C_pair profile and R grid differ in length");
    if (R_values.size() < 3) throw ConfigError("corrected potential needs at least 3 R values");
    if (!sv_star.strong_epsilon()) throw ConfigError("corrected potential expects a strong-scaled smoothed potential");
    CorrectedPotential out;
    out.R.assign(R_values.begin(), R_values.end());
    out.C.resize(R_values.size());
    out.v_star.resize(R_values.size());
    std::vector<double> total(R_values.size());
    for (std::size_t i = 0; i < R_values.size(); ++i) {
        if (!(C_pair[i] >= 0.0)) throw ConfigError("C_pair must be non-negative");
        out.C[i] = c.pair_energy_unit() * C_pair[i];
        out.v_star[i] = sv_star(R_values[i]);
        total[i] = out.C[i] + out.v_star[i];
    }
    out.total = SmoothedPotential(sv_star.xi(), sv_star.kappa(), out.R, std::move(total));
    return out;
}

} // namespace mesodrop
