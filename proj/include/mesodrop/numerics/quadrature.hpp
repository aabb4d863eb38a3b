#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mesodrop/error.hpp"

namespace mesodrop::numerics {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    bool converged = true;
};

struct QuadratureTolerance {
    double relative = 1e-8;
    double absolute = 0.0;
    unsigned max_depth = 15;
};

namespace detail {

inline constexpr double roundoff_floor = 64.0 * std::numeric_limits<double>::epsilon();

// Panel error is |K61 - G30| computed directly: boost's own estimate carries an
// absolute floor of a few ulps of max|f| that never shrinks with the panel width.
template <class F>
void adapt(F& f, double a, double b, double relative, double absolute, unsigned depth, QuadratureResult& out)
{
    QuadratureResult panel;
    panel.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, nullptr, &panel.l1);
    const double gauss = boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
    panel.error = std::abs(panel.value - gauss);
    const double target = std::max({relative * panel.l1, roundoff_floor * panel.l1, absolute});
    if (panel.error <= target || depth == 0 || !std::isfinite(panel.value)) {
        out.value += panel.value;
        out.error += panel.error;
        out.l1 += panel.l1;
        if (panel.error > target || !std::isfinite(panel.value)) out.converged = false;
        return;
    }
    const double mid = 0.5 * (a + b);
    adapt(f, a, mid, relative, 0.5 * absolute, depth - 1, out);
    adapt(f, mid, b, relative, 0.5 * absolute, depth - 1, out);
}

} // namespace detail

/// Adaptive Gauss-Kronrod (G30/K61) on [a, b] with panel bisection.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureTolerance& tol = {})
{
    QuadratureResult r;
    if (!(b > a)) return r;
    detail::adapt(f, a, b, tol.relative, tol.absolute, tol.max_depth, r);
    return r;
}

/// Integrates over [a, b] split at every breakpoint strictly inside the interval.
template <class F>
QuadratureResult integrate_pieces(F&& f, double a, double b, std::vector<double> breaks,
                                  const QuadratureTolerance& tol = {})
{
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    QuadratureResult total;
    const double min_piece = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    double prev = a;
    for (double x : breaks) {
        if (x > b) continue;
        if (x < b && x - prev < min_piece) continue;
        if (x <= prev) continue;
        const auto piece = integrate(f, prev, x, tol);
        total.value += piece.value;
        total.error += piece.error;
        total.l1 += piece.l1;
        total.converged = total.converged && piece.converged;
        prev = x;
    }
    if (total.converged || total.error <= std::max(tol.relative * total.l1, tol.absolute)) total.converged = true;
    return total;
}

} // namespace mesodrop::numerics
