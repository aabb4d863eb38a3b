#pragma once

// Kernel-smoothed pair potential.
//
// Both particles are smeared by an isotropic Gaussian of per-component standard
// deviation sigma = kappa * xi. The two smearings combine into one Gaussian of
// width w = sqrt(2) * sigma acting on the separation vector, and isotropy reduces
// the remaining 3-D convolution to
//
//   v~(R) = 1 / (R w sqrt(2 pi)) * Int_0^inf r v(r) [exp(-(R-r)^2 / 2w^2) - exp(-(R+r)^2 / 2w^2)] dr.
//
// mc_oracle keeps the unreduced six-dimensional form for validation.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mesodrop/error.hpp"
#include "mesodrop/numerics/parallel.hpp"
#include "mesodrop/numerics/quadrature.hpp"
#include "mesodrop/numerics/spline.hpp"
#include "mesodrop/potential.hpp"
#include "mesodrop/units.hpp"

namespace mesodrop {

struct SmoothingKernel {
    double xi = 0.0;
    double kappa = 1.0;  // angstrom per unit xi

    SmoothingKernel() = default;
    SmoothingKernel(double xi_, double kappa_) : xi(xi_), kappa(kappa_)
    {
        if (!(xi >= 0.0) || !std::isfinite(xi)) throw ConfigError("smoothing parameter xi must be >= 0");
        if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("kernel calibration kappa must be > 0");
    }

    /// Per-component standard deviation of one particle's kernel, angstrom.
    [[nodiscard]] double sigma() const { return kappa * xi; }
    /// Width of the combined kernel acting on the pair separation.
    [[nodiscard]] double pair_width() const { return std::numbers::sqrt2 * sigma(); }
    [[nodiscard]] bool degenerate() const { return sigma() == 0.0; }

    /// tau(d): normalised 3-D Gaussian density at distance d from its centre.
    [[nodiscard]] double tau(double d) const
    {
        const double s = sigma();
        if (s == 0.0) throw ConfigError("degenerate kernel has no density");
        return std::exp(-0.5 * d * d / (s * s)) / std::pow(2.0 * std::numbers::pi * s * s, 1.5);
    }
};

namespace detail {

/// Probability mass of the radially reduced pair kernel beyond r = c.
inline double pair_kernel_tail_mass(double R, double w, double c)
{
    const double sq = std::sqrt(std::numbers::pi / 2.0);
    const double u1 = (c - R) / w;
    const double u2 = (c + R) / w;
    const double first = w * w * std::exp(-0.5 * u1 * u1) + R * w * sq * std::erfc(u1 / std::numbers::sqrt2);
    const double second = w * w * std::exp(-0.5 * u2 * u2) - R * w * sq * std::erfc(u2 / std::numbers::sqrt2);
    return (first - second) / (R * w * std::sqrt(2.0 * std::numbers::pi));
}

/// Radial density of the separation |r| when r ~ N(R e, w^2 I).
inline double pair_kernel_density(double R, double w, double r)
{
    const double a = (R - r) / w;
    return -r * std::exp(-0.5 * a * a) * std::expm1(-2.0 * R * r / (w * w)) / (R * w * std::sqrt(2.0 * std::numbers::pi));
}

template <class P>
std::vector<double> kinks_of(const P& v)
{
    if constexpr (HasKinks<P>) return v.kink_points();
    else return {};
}

} // namespace detail

struct SmoothingTolerance {
    double relative = 1e-8;
    double absolute = 1e-30;  // J
    double cutoff_widths = 10.0;
};

/// v~(R) for a single separation by the reduced radial quadrature.
template <RadialPotential P>
double smoothed_value(const P& v, double pair_width, double R, const SmoothingTolerance& tol = {})
{
    if (!(R > 0.0)) throw ConfigError("smoothed potential needs R > 0");
    if (pair_width == 0.0) return v(R);
    const double w = pair_width;
    const double cutoff = R + tol.cutoff_widths * w;

    auto integrand = [&](double r) {
        if (r <= 0.0) return 0.0;
        return detail::pair_kernel_density(R, w, r) * v(r);
    };
    std::vector<double> breaks = detail::kinks_of(v);
    for (double m : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}) breaks.push_back(R + m * w);
    breaks.push_back(R - tol.cutoff_widths * w);

    numerics::QuadratureTolerance qt;
    qt.relative = tol.relative;
    qt.absolute = tol.absolute;
    const auto q = numerics::integrate_pieces(integrand, 0.0, cutoff, breaks, qt);
    if (!q.converged) {
        throw NumericError("smoothing quadrature did not converge at R = " + std::to_string(R) + " angstrom");
    }
    // Kernel mass beyond the cutoff, weighted by the (decayed) tail value there.
    const double tail = v(cutoff) * detail::pair_kernel_tail_mass(R, w, cutoff);
    return q.value + (std::abs(tail) >= tol.absolute ? tail : 0.0);
}

template <RadialPotential P>
double smoothed_value(const P& v, const SmoothingKernel& k, double R, const SmoothingTolerance& tol = {})
{
    return smoothed_value(v, k.pair_width(), R, tol);
}

/// Tabulated v~(R; xi) with natural cubic-spline interpolation.
class SmoothedPotential {
public:
    SmoothedPotential() = default;

    SmoothedPotential(double xi, double kappa, std::vector<double> grid, std::vector<double> values)
        : xi_(xi), kappa_(kappa), grid_(std::move(grid)), values_(std::move(values)), spline_(grid_, values_)
    {
    }

    /// Tabulates an arbitrary model function of R (joule) on the grid.
    template <class F>
    static SmoothedPotential from_function(F&& f, std::vector<double> grid)
    {
        std::vector<double> values(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid[i]);
        return SmoothedPotential(0.0, 1.0, std::move(grid), std::move(values));
    }

    static SmoothedPotential zero(std::vector<double> grid)
    {
        return from_function([](double) { return 0.0; }, std::move(grid));
    }

    [[nodiscard]] double xi() const { return xi_; }
    [[nodiscard]] double kappa() const { return kappa_; }
    [[nodiscard]] const std::vector<double>& grid() const { return grid_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }
    [[nodiscard]] std::optional<double> strong_epsilon() const { return strong_epsilon_; }
    [[nodiscard]] double r_front() const { return grid_.front(); }
    [[nodiscard]] double r_back() const { return grid_.back(); }
    [[nodiscard]] bool covers(double R) const { return R <= grid_.back(); }

    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    /// Interpolated value. Below the first node v~ is continued as an even function
    /// of R (v~ is smooth at coincidence for xi > 0); beyond the last node it is zero.
    [[nodiscard]] double operator()(double R) const
    {
        R = std::abs(R);
        if (R > grid_.back()) return 0.0;
        if (R >= grid_.front()) return spline_(R);
        const double R0 = grid_.front();
        const double slope = spline_.derivative(R0);
        return values_.front() + (R * R - R0 * R0) * slope / (2.0 * R0);
    }

    /// Strong-coupling representation V~* = V~ / epsilon.
    [[nodiscard]] SmoothedPotential strong_scaled(double epsilon) const
    {
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("strong rescaling needs 0 < epsilon < 1");
        std::vector<double> scaled(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) scaled[i] = values_[i] / epsilon;
        SmoothedPotential out(xi_, kappa_, grid_, std::move(scaled));
        out.strong_epsilon_ = epsilon;
        out.warnings_ = warnings_;
        return out;
    }

private:
    double xi_ = 0.0;
    double kappa_ = 1.0;
    std::vector<double> grid_;
    std::vector<double> values_;
    numerics::CubicSpline spline_;
    std::optional<double> strong_epsilon_;
    std::vector<std::string> warnings_;
};

/// 600 nodes on [0.5, 30] angstrom, geometrically spaced so the core is dense.
inline std::vector<double> default_smoothing_grid(std::size_t n = 600, double lo = 0.5, double hi = 30.0)
{
    if (n < 3 || !(lo > 0.0) || !(hi > lo)) throw ConfigError("invalid smoothing grid");
    std::vector<double> g(n);
    const double ratio = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(ratio * static_cast<double>(i));
    g.back() = hi;
    return g;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n)
{
    if (n < 2 || !(hi > lo)) throw ConfigError("invalid uniform grid");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

template <RadialPotential P>
SmoothedPotential smooth_pair_potential(const P& v, const SmoothingKernel& kernel, std::vector<double> grid,
                                        const SmoothingTolerance& tol = {})
{
    if (grid.size() < 3) throw ConfigError("smoothing grid needs at least 3 nodes");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw ConfigError("smoothing grid must be positive and strictly increasing");
        }
    }
    std::vector<double> values(grid.size());
    numerics::parallel_for(grid.size(), [&](std::size_t i) { values[i] = smoothed_value(v, kernel, grid[i], tol); });

    SmoothedPotential sp(kernel.xi, kernel.kappa, std::move(grid), std::move(values));
    double peak = 0.0;
    for (double x : sp.values()) peak = std::max(peak, std::abs(x));
    if (peak > 0.0 && std::abs(sp.values().back()) > 1e-3 * peak) {
        sp.add_warning("grid ends at " + std::to_string(sp.r_back()) +
                       " angstrom before the kernel-widened potential has decayed");
    }
    return sp;
}

struct SmoothedWell {
    double r_min = 0.0;  // angstrom
    double depth = 0.0;  // J
};

/// Default search bracket for smoothed wells, which move outward as xi grows.
inline WellOptions smoothed_well_bracket(double scale = 1.0)
{
    WellOptions opt;
    opt.r_lo = 2.0 * scale;
    opt.r_hi = 30.0 * scale;
    opt.scan_points = 140;
    return opt;
}

/// Minimum of v~ evaluated by direct quadrature (not the spline).
template <RadialPotential P>
SmoothedWell smoothed_minimum(const P& v, const SmoothingKernel& kernel, const WellOptions& opt = smoothed_well_bracket(),
                              SmoothingTolerance tol = {})
{
    tol.relative = std::min(tol.relative, 1e-11);
    auto f = [&](double R) { return smoothed_value(v, kernel, R, tol); };
    SmoothedWell w;
    w.r_min = locate_minimum(f, opt);
    w.depth = f(w.r_min);
    return w;
}

struct MonteCarloEstimate {
    double estimate = 0.0;   // J
    double std_error = 0.0;  // J
    std::size_t samples = 0;
};

using Vec3 = std::array<double, 3>;

struct MonteCarloOptions {
    double core_fraction = 0.25;  // share of second-particle draws placed near the first
    double core_width = 1.0;      // angstrom, per-component width of those draws
};

/// Six-dimensional Monte Carlo estimate of v~(R): particle 1 is drawn from its kernel at
/// the origin, particle 2 from a defensive mixture of its own kernel at R * direction and
/// a narrow Gaussian around particle 1. The importance weight keeps the estimator unbiased
/// while the rare close approaches that dominate the variance are sampled often enough
/// for the standard error to be trustworthy. Deterministic for a fixed seed.
template <RadialPotential P>
MonteCarloEstimate mc_oracle(const P& v, const SmoothingKernel& kernel, double R, std::size_t samples,
                             std::uint64_t seed, Vec3 direction = {0.0, 0.0, 1.0}, const MonteCarloOptions& mc = {})
{
    if (samples < 10000) throw ConfigError("mc_oracle needs at least 1e4 samples");
    if (!(R > 0.0)) throw ConfigError("mc_oracle needs R > 0");
    if (!(mc.core_fraction >= 0.0 && mc.core_fraction < 1.0) || !(mc.core_width > 0.0)) {
        throw ConfigError("mc_oracle mixture needs core_fraction in [0, 1) and core_width > 0");
    }
    const double dn = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] + direction[2] * direction[2]);
    if (!(dn > 0.0)) throw ConfigError("mc_oracle direction must be non-zero");

    MonteCarloEstimate out;
    out.samples = samples;
    if (kernel.degenerate()) {
        out.estimate = v(R);
        return out;
    }
    const Vec3 centre{R * direction[0] / dn, R * direction[1] / dn, R * direction[2] / dn};
    const double s = kernel.sigma();
    const double sc = mc.core_width;
    const double beta = mc.core_fraction;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    // Ratio of the mixture density to the kernel density at x2.
    auto mixture_ratio = [&](double d2_kernel, double d2_core) {
        const double log_ratio = 3.0 * std::log(s / sc) - 0.5 * d2_core / (sc * sc) + 0.5 * d2_kernel / (s * s);
        return (1.0 - beta) + beta * std::exp(log_ratio);
    };

    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t n = 1; n <= samples; ++n) {
        Vec3 x1{};
        Vec3 x2{};
        for (int c = 0; c < 3; ++c) x1[c] = s * unit(rng);
        const bool core = beta > 0.0 && pick(rng) < beta;
        for (int c = 0; c < 3; ++c) x2[c] = core ? x1[c] + sc * unit(rng) : centre[c] + s * unit(rng);
        double d2 = 0.0;
        double d2_kernel = 0.0;
        for (int c = 0; c < 3; ++c) {
            d2 += (x2[c] - x1[c]) * (x2[c] - x1[c]);
            d2_kernel += (x2[c] - centre[c]) * (x2[c] - centre[c]);
        }
        const double value = v(std::sqrt(d2)) / mixture_ratio(d2_kernel, d2);
        const double delta = value - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (value - mean);
    }
    out.estimate = mean;
    out.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    return out;
}

struct KappaCalibration {
    double kappa = 0.0;
    double xi = 0.0;
    double r_target = 0.0;
    double r_achieved = 0.0;
    double depth = 0.0;
    int iterations = 0;
};

/// Finds kappa in (0.01, 100) angstrom such that the smoothed minimum at `xi` lies at `r_target`.
template <RadialPotential P>
KappaCalibration calibrate_kappa(const P& v, double xi, double r_target, double position_tolerance = 0.01)
{
    if (!(xi > 0.0)) throw ConfigError("calibration target with xi = 0 is degenerate: any kappa reproduces it");
    if (!(r_target > 0.0)) throw ConfigError("calibration target position must be positive");

    // Offset of the smoothed minimum from the target; +inf once the well has disappeared.
    auto offset = [&](double kappa, SmoothedWell* out) {
        try {
            const auto w = smoothed_minimum(v, SmoothingKernel(xi, kappa));
            if (out) *out = w;
            return w.r_min - r_target;
        } catch (const NoMinimumError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double lo = std::log(0.01);
    double hi = std::log(100.0);
    const double f_lo = offset(std::exp(lo), nullptr);
    const double f_hi = offset(std::exp(hi), nullptr);
    if (!(f_lo < 0.0 && f_hi > 0.0)) {
        throw NumericError("calibration failed: no kappa in (0.01, 100) angstrom brackets the target");
    }
    KappaCalibration cal;
    cal.xi = xi;
    cal.r_target = r_target;
    // Coarse bisection in log(kappa) until both ends see a well, then TOMS 748.
    double f_lo_cur = f_lo;
    double f_hi_cur = f_hi;
    for (; cal.iterations < 60 && (!std::isfinite(f_hi_cur) || hi - lo > 0.05); ++cal.iterations) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = offset(std::exp(mid), nullptr);
        if (f_mid < 0.0) {
            lo = mid;
            f_lo_cur = f_mid;
        } else {
            hi = mid;
            f_hi_cur = f_mid;
        }
    }
    if (std::isfinite(f_hi_cur) && f_lo_cur < 0.0 && f_hi_cur > 0.0) {
        boost::uintmax_t max_iter = 60;
        auto g = [&](double t) { return offset(std::exp(t), nullptr); };
        auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
        const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, f_lo_cur, f_hi_cur, tol, max_iter);
        cal.iterations += static_cast<int>(max_iter);
        lo = a;
        hi = b;
    }
    cal.kappa = std::exp(0.5 * (lo + hi));
    SmoothedWell w;
    const double miss = offset(cal.kappa, &w);
    cal.r_achieved = w.r_min;
    cal.depth = w.depth;
    if (!(std::abs(miss) <= position_tolerance)) {
        throw NumericError("calibration failed: best kappa misses the target by " + std::to_string(miss) + " angstrom");
    }
    return cal;
}

/// Potential and kernel expressed in a frame whose lengths are multiplied by `factor`
/// (e.g. epsilon(N) / epsilon(N_ref) when moving between droplet sizes).
struct RescaledFrame {
    PairPotential potential;
    SmoothingKernel kernel;
    double factor = 1.0;
};

inline RescaledFrame rescaled_frame(const PairPotential& p, const SmoothingKernel& k, double factor)
{
    if (!(factor > 0.0)) throw ConfigError("frame rescaling factor must be positive");
    return {p.with_length_scale(factor), SmoothingKernel(k.xi, k.kappa * factor), factor};
}

/// Sum over pairs of v~(|R_i - R_j|) for explicit particle positions (angstrom).
class TotalSmoothedPotential {
public:
    struct PairSum {
        double value = 0.0;          // J
        std::size_t out_of_range = 0; // separations beyond the table, counted as zero
    };

    explicit TotalSmoothedPotential(SmoothedPotential sv) : sv_(std::move(sv)) {}

    [[nodiscard]] PairSum evaluate(std::span<const Vec3> positions) const
    {
        PairSum sum;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            for (std::size_t j = i + 1; j < positions.size(); ++j) {
                double d2 = 0.0;
                for (int c = 0; c < 3; ++c) {
                    const double d = positions[i][c] - positions[j][c];
                    d2 += d * d;
                }
                const double R = std::sqrt(d2);
                if (!sv_.covers(R)) ++sum.out_of_range;
                sum.value += sv_(R);
            }
        }
        return sum;
    }

    [[nodiscard]] double operator()(std::span<const Vec3> positions) const { return evaluate(positions).value; }

    [[nodiscard]] const SmoothedPotential& pair() const { return sv_; }

private:
    SmoothedPotential sv_;
};

inline TotalSmoothedPotential build_total_smoothed(const DropletSpec& /*spec*/, SmoothedPotential sv)
{
    return TotalSmoothedPotential(std::move(sv));
}

} // namespace mesodrop
