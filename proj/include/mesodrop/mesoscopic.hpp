#pragma once

// Order-parameter (Hartree) eigenproblem for the mesoscopic wave equation under the
// product ansatz Phi_0 = phi(R_1) ... phi(R_N), restricted to spherically symmetric
// ground states.
//
// With the pairwise smoothed potential the functional derivative of the N-fold
// potential energy gives
//
//   v_eff(R) = (N - 1) Int v~(|R - R'|) |phi(R')|^2 d^3R',
//
// and the Hartree total energy is E2 = N <T> + N (N - 1) / 2 <phi phi| v~ |phi phi>.
//
// Radial grid: uniform nodes r_i = (i + 1) h, i = 0..n-1, h = r_max / (n + 1), with
// Dirichlet walls u(0) = u(r_max) = 0 on u = r phi.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "mesodrop/error.hpp"
#include "mesodrop/numerics/parallel.hpp"
#include "mesodrop/numerics/quadrature.hpp"
#include "mesodrop/numerics/tridiagonal.hpp"
#include "mesodrop/smoothing.hpp"
#include "mesodrop/units.hpp"

namespace mesodrop {

class RadialGrid {
public:
    static constexpr std::size_t min_points = 200;

    RadialGrid() = default;

    /// Production grid; needs at least `min_points` interior nodes.
    RadialGrid(double r_max, std::size_t n_points) : RadialGrid(r_max, n_points, min_points) {}

    /// Small grids for brute-force oracles only.
    static RadialGrid coarse(double r_max, std::size_t n_points) { return RadialGrid(r_max, n_points, 3); }

    [[nodiscard]] double r_max() const { return r_max_; }
    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] double spacing() const { return h_; }
    [[nodiscard]] double node(std::size_t i) const { return static_cast<double>(i + 1) * h_; }

    /// Quadrature weight 4 pi r^2 h of node i for integrals over R^3.
    [[nodiscard]] double volume_weight(std::size_t i) const
    {
        const double r = node(i);
        return 4.0 * std::numbers::pi * r * r * h_;
    }

    [[nodiscard]] std::vector<double> nodes() const
    {
        std::vector<double> r(n_);
        for (std::size_t i = 0; i < n_; ++i) r[i] = node(i);
        return r;
    }

    /// Same box with twice the resolution.
    [[nodiscard]] RadialGrid refined() const { return RadialGrid(r_max_, 2 * n_ + 1, 3); }

    /// Integral over R^3 of a radial function sampled on the nodes.
    [[nodiscard]] double integrate(std::span<const double> f) const
    {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += volume_weight(i) * f[i];
        return s;
    }

private:
    RadialGrid(double r_max, std::size_t n_points, std::size_t minimum) : r_max_(r_max), n_(n_points)
    {
        if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ConfigError("radial grid needs r_max > 0");
        if (n_points < minimum) {
            throw ConfigError("radial grid needs at least " + std::to_string(minimum) + " points");
        }
        h_ = r_max_ / static_cast<double>(n_ + 1);
    }

    double r_max_ = 1.0;
    std::size_t n_ = 0;
    double h_ = 0.0;
};

struct OrderParameter {
    RadialGrid grid;
    std::vector<double> phi;   // angstrom^-3/2
    double norm_check = 0.0;   // Int |phi|^2 d^3R

    [[nodiscard]] std::vector<double> density() const
    {
        std::vector<double> rho(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i) rho[i] = phi[i] * phi[i];
        return rho;
    }
};

/// Normalises phi so that Int |phi|^2 d^3R = 1 on the grid.
inline OrderParameter make_order_parameter(const RadialGrid& grid, std::vector<double> phi)
{
    if (phi.size() != grid.size()) throw ConfigError("order parameter does not match grid");
    double norm = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) norm += grid.volume_weight(i) * phi[i] * phi[i];
    if (!(norm > 0.0)) throw ConfigError("order parameter is identically zero");
    const double scale = 1.0 / std::sqrt(norm);
    for (double& p : phi) p *= scale;
    OrderParameter op{grid, std::move(phi), 0.0};
    op.norm_check = grid.integrate(op.density());
    return op;
}

/// Amplitude of the product state phi(R_a) phi(R_b) ... for particles sitting on the given nodes.
inline double product_amplitude(const OrderParameter& op, std::span<const std::size_t> nodes)
{
    double amp = 1.0;
    for (std::size_t n : nodes) amp *= op.phi.at(n);
    return amp;
}

// ---------------------------------------------------------------------------
// Radial eigenproblem
// ---------------------------------------------------------------------------

struct RadialEigen {
    double energy = 0.0;        // J
    OrderParameter state;
    double kinetic = 0.0;       // <T>, J
    std::optional<double> refinement_shift;  // |E(h) - E(h/2)| / |E(h/2)| when checked
};

struct EigenOptions {
    double mass_scale = 1.0;                 // effective mass in units of Constants::m
    std::optional<double> refinement_tolerance;  // when set, re-solve on h/2 and reject coarse grids
};

namespace detail {

inline double kinetic_coupling(const RadialGrid& grid, const Constants& c, double mass_scale)
{
    if (!(mass_scale > 0.0)) throw ConfigError("mass scale must be positive");
    const double h = grid.spacing();
    return 0.5 * c.hbar2_over_m() / mass_scale / (h * h);
}

/// <T> for u = r phi on the grid (three-point Laplacian, Dirichlet walls).
inline double kinetic_expectation(const OrderParameter& op, const Constants& c, double mass_scale)
{
    const auto& g = op.grid;
    const double t = kinetic_coupling(g, c, mass_scale);
    const std::size_t n = g.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = g.node(i) * op.phi[i];
        const double um = i > 0 ? g.node(i - 1) * op.phi[i - 1] : 0.0;
        const double up = i + 1 < n ? g.node(i + 1) * op.phi[i + 1] : 0.0;
        s += u * t * (2.0 * u - um - up);
    }
    return 4.0 * std::numbers::pi * g.spacing() * s;
}

inline RadialEigen solve_on_grid(std::span<const double> v, const RadialGrid& grid, const Constants& c,
                                 double mass_scale)
{
    const std::size_t n = grid.size();
    if (v.size() != n) throw ConfigError("potential does not match radial grid");
    const double t = kinetic_coupling(grid, c, mass_scale);
    numerics::SymTridiagonal m;
    m.diag.resize(n);
    m.off.assign(n - 1, -t);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(v[i])) throw ConfigError("potential is not finite on the grid");
        m.diag[i] = 2.0 * t + v[i];
    }
    auto eig = numerics::lowest_eigenpair(m);
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = eig.vector[i] / grid.node(i);
    RadialEigen out;
    out.energy = eig.value;
    out.state = make_order_parameter(grid, std::move(phi));
    out.kinetic = kinetic_expectation(out.state, c, mass_scale);
    return out;
}

} // namespace detail

/// Lowest s-wave eigenpair of -(hbar^2 / 2m) u'' + v u = E u with u(0) = u(r_max) = 0.
/// `v` holds joule values on the grid nodes.
inline RadialEigen solve_radial_eigen(std::span<const double> v, const RadialGrid& grid, const Constants& c,
                                      double mass_scale = 1.0)
{
    return detail::solve_on_grid(v, grid, c, mass_scale);
}

/// Callable-potential variant; with a refinement tolerance the problem is also solved on
/// the h/2 grid and a NumericError is raised when the eigenvalue moves by more than that.
template <class F>
    requires std::invocable<const F&, double>
RadialEigen solve_radial_eigen(const F& v, const RadialGrid& grid, const Constants& c, const EigenOptions& opt = {})
{
    auto sample = [&](const RadialGrid& g) {
        std::vector<double> values(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) values[i] = v(g.node(i));
        return values;
    };
    RadialEigen out = detail::solve_on_grid(sample(grid), grid, c, opt.mass_scale);
    if (opt.refinement_tolerance) {
        const RadialGrid fine = grid.refined();
        const RadialEigen ref = detail::solve_on_grid(sample(fine), fine, c, opt.mass_scale);
        const double shift = std::abs(out.energy - ref.energy) / std::max(std::abs(ref.energy), std::numeric_limits<double>::min());
        out.refinement_shift = shift;
        if (shift > *opt.refinement_tolerance) {
            throw NumericError("radial grid too coarse: eigenvalue shifts by " + std::to_string(shift) +
                               " (relative) under 2x refinement");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hartree potential
// ---------------------------------------------------------------------------

/// Pair kernel on a fixed grid. For radial densities the angular integral is exact:
///
///   Int v~(|R - R'|) d Omega' = (2 pi / (R R')) [G(R + R') - G(|R - R'|)],  G(x) = Int_0^x v~(s) s ds,
///
/// and R +- R' always fall on multiples of h, so G is tabulated once per grid.
class HartreeKernel {
public:
    HartreeKernel(const SmoothedPotential& sv, const RadialGrid& grid) : grid_(grid)
    {
        const std::size_t n = grid.size();
        const double h = grid.spacing();
        G_.assign(2 * n + 3, 0.0);
        // Between spline knots s * v~(s) is a quintic at most, so three-point Gauss-Legendre
        // on every knot-to-knot piece integrates the tabulated potential exactly.
        const auto& knots = sv.grid();
        auto piece = [&](double a, double b) {
            if (!(b > a)) return 0.0;
            static constexpr double node = 0.77459666924148337704;  // sqrt(3/5)
            const double mid = 0.5 * (a + b);
            const double half = 0.5 * (b - a);
            auto f = [&](double s) { return sv(s) * s; };
            return half * (5.0 * f(mid - half * node) + 8.0 * f(mid) + 5.0 * f(mid + half * node)) / 9.0;
        };
        const double end = knots.back();
        for (std::size_t k = 1; k < G_.size(); ++k) {
            const double a = static_cast<double>(k - 1) * h;
            const double b = std::min(static_cast<double>(k) * h, end);
            double sum = 0.0;
            double left = a;
            for (auto it = std::upper_bound(knots.begin(), knots.end(), a); it != knots.end() && *it < b; ++it) {
                sum += piece(left, *it);
                left = *it;
            }
            if (a < b) sum += piece(left, b);
            G_[k] = G_[k - 1] + sum;
        }
    }

    [[nodiscard]] const RadialGrid& grid() const { return grid_; }

    /// U(R_i) = Int v~(|R_i - R'|) rho(R') d^3R' for a density sampled on the nodes.
    [[nodiscard]] std::vector<double> apply(std::span<const double> rho) const
    {
        const std::size_t n = grid_.size();
        const double h = grid_.spacing();
        std::vector<double> U(n, 0.0);
        // weight_j = 2 pi r_j h rho_j; U_i = (1 / R_i) sum_j weight_j [G(i + j + 2) - G(|i - j|)]
        std::vector<double> weight(n);
        for (std::size_t j = 0; j < n; ++j) weight[j] = 2.0 * std::numbers::pi * grid_.node(j) * h * rho[j];
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t diff = i > j ? i - j : j - i;
                s += weight[j] * (G_[i + j + 2] - G_[diff]);
            }
            U[i] = s / grid_.node(i);
        }
        return U;
    }

    /// <rho| v~ |rho> = Int Int rho(R) v~(|R - R'|) rho(R') d^3R d^3R'.
    [[nodiscard]] double pair_energy(std::span<const double> rho) const
    {
        const auto U = apply(rho);
        double s = 0.0;
        for (std::size_t i = 0; i < grid_.size(); ++i) s += grid_.volume_weight(i) * rho[i] * U[i];
        return s;
    }

private:
    RadialGrid grid_;
    std::vector<double> G_;
};

/// v_eff(R) = (N - 1) Int v~(|R - R'|) |phi(R')|^2 d^3R'.
inline std::vector<double> build_v_eff(const OrderParameter& phi, const SmoothedPotential& sv, long long N)
{
    if (N < 1) throw ConfigError("particle count must be positive");
    const HartreeKernel kernel(sv, phi.grid);
    auto U = kernel.apply(phi.density());
    for (double& u : U) u *= static_cast<double>(N - 1);
    return U;
}

struct HartreeEnergy {
    double kinetic = 0.0;      // <T> per particle, J
    double pair = 0.0;         // <phi phi| v~ |phi phi>, J
    double total = 0.0;        // N <T> + N (N - 1) / 2 * pair, J
};

inline HartreeEnergy hartree_energy(const OrderParameter& phi, const HartreeKernel& kernel, long long N,
                                    const Constants& c, double mass_scale = 1.0)
{
    HartreeEnergy e;
    e.kinetic = detail::kinetic_expectation(phi, c, mass_scale);
    e.pair = kernel.pair_energy(phi.density());
    const double n = static_cast<double>(N);
    e.total = n * e.kinetic + 0.5 * n * (n - 1.0) * e.pair;
    return e;
}

// ---------------------------------------------------------------------------
// Self-consistent field
// ---------------------------------------------------------------------------

struct ScfOptions {
    double mixing = 0.3;
    double tol = 1e-10;
    int max_iter = 500;
    double min_mixing = 1e-6;
    int recovery_streak = 3;   // consecutive residual decreases before the mixing is doubled back
    double mass_scale = 1.0;
};

struct HartreeState {
    OrderParameter phi;
    std::vector<double> v_eff;   // J
    double E_star = 0.0;         // J
    double E2_tilde = 0.0;       // J
    double kinetic = 0.0;        // <T> per particle, J
    double pair_energy = 0.0;    // J
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool bound = false;
    double final_mixing = 0.0;
    std::vector<double> residual_history;
    std::vector<double> norm_history;  // Int rho d^3R of every accepted density
    std::vector<std::string> log;
};

namespace detail {

inline double relative_l2(const RadialGrid& g, std::span<const double> a, std::span<const double> b)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = g.volume_weight(i);
        num += w * (a[i] - b[i]) * (a[i] - b[i]);
        den += w * b[i] * b[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double weighted_dot(const RadialGrid& g, std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.volume_weight(i) * a[i] * b[i];
    return s;
}

inline bool is_bound(const HartreeState& s)
{
    if (!(s.E_star < 0.0)) return false;
    double peak = 0.0;
    for (double p : s.phi.phi) peak = std::max(peak, p * p);
    const double edge = s.phi.phi.back() * s.phi.phi.back();
    return edge < 1e-12 * peak;
}

} // namespace detail

inline HartreeState scf_solve(const SmoothedPotential& sv, long long N, const RadialGrid& grid, const Constants& c,
                              const ScfOptions& opt = {}, std::optional<std::vector<double>> initial_density = {})
{
    if (!(opt.mixing > 0.0 && opt.mixing <= 1.0)) throw ConfigError("SCF mixing must lie in (0, 1]");
    if (!(opt.tol > 0.0)) throw ConfigError("SCF tolerance must be positive");
    if (opt.max_iter < 1) throw ConfigError("SCF needs max_iter >= 1");
    if (N < 1) throw ConfigError("particle count must be positive");

    const HartreeKernel kernel(sv, grid);
    const double pairs = static_cast<double>(N - 1);

    std::vector<double> rho;
    if (initial_density) {
        if (initial_density->size() != grid.size()) throw ConfigError("initial density does not match grid");
        rho = *initial_density;
        const double norm = grid.integrate(rho);
        if (!(norm > 0.0)) throw ConfigError("initial density must have positive norm");
        for (double& r : rho) r /= norm;
    } else {
        const std::vector<double> zero(grid.size(), 0.0);
        rho = detail::solve_on_grid(zero, grid, c, opt.mass_scale).state.density();
    }

    HartreeState state;
    double alpha = opt.mixing;
    double previous = std::numeric_limits<double>::infinity();
    int falling = 0;
    int drift_rises = 0;
    std::vector<double> last_step(grid.size(), 0.0);
    RadialEigen eig;
    for (int it = 1; it <= opt.max_iter; ++it) {
        auto v = kernel.apply(rho);
        for (double& x : v) x *= pairs;
        eig = detail::solve_on_grid(v, grid, c, opt.mass_scale);
        const auto candidate = eig.state.density();
        const double residual = detail::relative_l2(grid, candidate, rho);
        state.iterations = it;
        state.residual = residual;
        state.residual_history.push_back(residual);
        state.v_eff = std::move(v);
        if (residual <= opt.tol) {
            state.converged = true;
            break;
        }
        std::vector<double> step(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) step[i] = candidate[i] - rho[i];
        if (residual > previous) {
            falling = 0;
            // A rise with a reversed update direction is an oscillation; a rise along the
            // previous direction is drift (e.g. a density still localising) and keeps the step.
            const bool reversed = detail::weighted_dot(grid, step, last_step) < 0.0;
            if (reversed && alpha > opt.min_mixing) {
                alpha = std::max(0.5 * alpha, opt.min_mixing);
                state.log.push_back("iteration " + std::to_string(it) + ": residual rose to " +
                                    std::to_string(residual) + ", mixing halved to " + std::to_string(alpha));
            } else if (!reversed) {
                ++drift_rises;
            }
        } else if (++falling >= opt.recovery_streak && alpha < opt.mixing) {
            alpha = std::min(2.0 * alpha, opt.mixing);
            falling = 0;
        }
        last_step = std::move(step);
        previous = residual;
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = (1.0 - alpha) * rho[i] + alpha * candidate[i];
        state.norm_history.push_back(grid.integrate(rho));
    }
    if (drift_rises > 0) {
        state.log.push_back(std::to_string(drift_rises) + " residual rises along an unchanged update direction (mixing kept)");
    }
    if (!state.converged) {
        state.log.push_back("no convergence after " + std::to_string(opt.max_iter) + " iterations (residual " +
                            std::to_string(state.residual) + ")");
    }
    state.final_mixing = alpha;
    state.phi = eig.state;
    state.E_star = eig.energy;
    const auto e = hartree_energy(state.phi, kernel, N, c, opt.mass_scale);
    state.kinetic = e.kinetic;
    state.pair_energy = e.pair;
    state.E2_tilde = e.total;
    state.bound = detail::is_bound(state);
    return state;
}

struct Density {
    RadialGrid grid;
    std::vector<double> rho;  // angstrom^-3

    [[nodiscard]] double total() const { return grid.integrate(rho); }
};

/// rho = N |phi|^2.
inline Density density(const HartreeState& state, long long N)
{
    Density d{state.phi.grid, state.phi.density()};
    for (double& r : d.rho) r *= static_cast<double>(N);
    return d;
}

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

/// Builds the smoothed potential for a given xi; lets scans run on He-4 or on model potentials.
using SmoothedFactory = std::function<SmoothedPotential(double xi)>;

struct XiScanRow {
    double xi = 0.0;
    double r_min = std::numeric_limits<double>::quiet_NaN();  // smoothed-well minimum, angstrom
    double E2_tilde = 0.0;
    double E_star = 0.0;
    bool bound = false;
    bool converged = false;
    int iterations = 0;
    std::string error;
};

struct XiScanResult {
    std::vector<XiScanRow> rows;
    double argmin_xi = 0.0;
    double min_E2 = 0.0;
    bool argmin_bound = false;
    bool refined = false;
    std::vector<std::string> warnings;
};

struct XiScanOptions {
    ScfOptions scf;
    bool refine = true;
    int refine_evaluations = 12;
};

inline XiScanRow xi_scan_point(const SmoothedFactory& factory, double xi, long long N, const RadialGrid& grid,
                               const Constants& c, const ScfOptions& scf)
{
    XiScanRow row;
    row.xi = xi;
    try {
        const auto sv = factory(xi);
        try {
            WellOptions span;
            span.r_lo = sv.r_front();
            span.r_hi = sv.r_back();
            span.scan_points = 4000;
            row.r_min = locate_minimum(sv, span);
        } catch (const NoMinimumError&) {
            // purely repulsive table: no well position
        }
        const auto s = scf_solve(sv, N, grid, c, scf);
        row.E2_tilde = s.E2_tilde;
        row.E_star = s.E_star;
        row.bound = s.bound;
        row.converged = s.converged;
        row.iterations = s.iterations;
        if (!s.converged) row.error = "SCF did not converge";
    } catch (const std::exception& e) {
        row.error = e.what();
        row.E2_tilde = std::numeric_limits<double>::quiet_NaN();
        row.E_star = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

/// Runs smoothing + SCF per xi and reports the minimising xi, refined by golden section
/// around an interior grid minimum.
inline XiScanResult xi_scan(const SmoothedFactory& factory, std::span<const double> xi_values, long long N,
                            const RadialGrid& grid, const Constants& c, const XiScanOptions& opt = {})
{
    if (xi_values.empty()) throw ConfigError("xi scan needs at least one value");
    for (double xi : xi_values) {
        if (!(xi >= 0.0)) throw ConfigError("xi values must be >= 0");
    }
    XiScanResult out;
    out.rows.resize(xi_values.size());
    numerics::parallel_for(xi_values.size(), [&](std::size_t i) {
        out.rows[i] = xi_scan_point(factory, xi_values[i], N, grid, c, opt.scf);
    });

    // Prefer bound states; fall back to all finite rows.
    std::optional<std::size_t> best;
    for (int pass = 0; pass < 2 && !best; ++pass) {
        for (std::size_t i = 0; i < out.rows.size(); ++i) {
            const auto& r = out.rows[i];
            if (!std::isfinite(r.E2_tilde) || (pass == 0 && !r.bound)) continue;
            if (!best || r.E2_tilde < out.rows[*best].E2_tilde) best = i;
        }
    }
    if (!best) {
        out.warnings.push_back("every xi failed; no argmin");
        out.argmin_xi = std::numeric_limits<double>::quiet_NaN();
        out.min_E2 = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    bool any_bound = false;
    for (const auto& r : out.rows) any_bound = any_bound || r.bound;
    if (!any_bound) out.warnings.push_back("no xi yields a bound state; argmin taken over unbound (box) states");

    out.argmin_xi = out.rows[*best].xi;
    out.min_E2 = out.rows[*best].E2_tilde;
    out.argmin_bound = out.rows[*best].bound;

    const std::size_t i = *best;
    if (opt.refine && out.rows.size() >= 3 && i > 0 && i + 1 < out.rows.size()) {
        const double lo = out.rows[i - 1].xi;
        const double hi = out.rows[i + 1].xi;
        if (lo < hi) {
            std::optional<XiScanRow> best_row;
            auto objective = [&](double xi) {
                auto row = xi_scan_point(factory, xi, N, grid, c, opt.scf);
                if (!std::isfinite(row.E2_tilde)) return std::numeric_limits<double>::max();
                if (!best_row || row.E2_tilde < best_row->E2_tilde) best_row = row;
                return row.E2_tilde;
            };
            boost::uintmax_t iters = static_cast<boost::uintmax_t>(std::max(opt.refine_evaluations, 1));
            const auto m = boost::math::tools::brent_find_minima(objective, lo, hi, 20, iters);
            (void)m;
            if (best_row && best_row->E2_tilde < out.min_E2) {
                out.argmin_xi = best_row->xi;
                out.min_E2 = best_row->E2_tilde;
                out.argmin_bound = best_row->bound;
            }
            out.refined = true;
        }
    }
    return out;
}

struct ChemicalPotentialRow {
    long long N = 0;
    double E2_N = 0.0;        // J
    double E2_N_plus_1 = 0.0; // J
    double mu = 0.0;          // E2(N + 1) - E2(N), J
    bool converged = false;
};

/// Finite-difference chemical potential across a range of particle counts in a fixed box.
inline std::vector<ChemicalPotentialRow> chemical_potential_probe(const SmoothedPotential& sv,
                                                                  std::span<const long long> Ns,
                                                                  const RadialGrid& grid, const Constants& c,
                                                                  const ScfOptions& scf = {})
{
    for (long long n : Ns) {
        if (n < 1) throw ConfigError("particle counts must be positive");
    }
    std::vector<ChemicalPotentialRow> rows(Ns.size());
    numerics::parallel_for(Ns.size(), [&](std::size_t i) {
        const auto a = scf_solve(sv, Ns[i], grid, c, scf);
        const auto b = scf_solve(sv, Ns[i] + 1, grid, c, scf);
        rows[i] = {Ns[i], a.E2_tilde, b.E2_tilde, b.E2_tilde - a.E2_tilde, a.converged && b.converged};
    });
    return rows;
}

} // namespace mesodrop
