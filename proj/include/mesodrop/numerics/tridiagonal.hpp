#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "mesodrop/error.hpp"

namespace mesodrop::numerics {

/// Symmetric tridiagonal matrix: diagonal d[0..n), off-diagonal e[0..n-1).
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    [[nodiscard]] std::size_t size() const { return diag.size(); }
};

/// Number of eigenvalues strictly below x (Sturm sequence count).
inline std::size_t sturm_count(const SymTridiagonal& t, double x)
{
    const double tiny = std::numeric_limits<double>::min() * 4.0;
    std::size_t count = 0;
    double q = t.diag[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(q) < tiny) q = -tiny;
        q = t.diag[i] - x - t.off[i - 1] * t.off[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

struct Eigenpair {
    double value = 0.0;
    std::vector<double> vector;
};

/// Lowest eigenpair via Sturm bisection followed by inverse iteration.
/// The returned vector has unit Euclidean norm and a non-negative sum.
inline Eigenpair lowest_eigenpair(const SymTridiagonal& t)
{
    const std::size_t n = t.size();
    if (n == 0 || t.off.size() + 1 != n) throw ConfigError("malformed tridiagonal matrix");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(t.off[i]) : 0.0);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double span = std::max(hi - lo, std::abs(hi) + std::abs(lo));
    lo -= 1e-12 * span + std::numeric_limits<double>::min();
    hi += 1e-12 * span;

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(t, mid) >= 1) hi = mid;
        else lo = mid;
    }
    Eigenpair result;
    result.value = 0.5 * (lo + hi);

    // Inverse iteration with a shift just below the eigenvalue.
    const double shift = lo - 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), span * 1e-3);
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> c(n), y(n);
    for (int sweep = 0; sweep < 4; ++sweep) {
        // Thomas algorithm for (T - shift) y = x.
        double denom = t.diag[0] - shift;
        if (denom == 0.0) denom = std::numeric_limits<double>::epsilon() * span;
        c[0] = n > 1 ? t.off[0] / denom : 0.0;
        y[0] = x[0] / denom;
        for (std::size_t i = 1; i < n; ++i) {
            denom = t.diag[i] - shift - t.off[i - 1] * c[i - 1];
            if (denom == 0.0) denom = std::numeric_limits<double>::epsilon() * span;
            c[i] = i + 1 < n ? t.off[i] / denom : 0.0;
            y[i] = (x[i] - t.off[i - 1] * y[i - 1]) / denom;
        }
        for (std::size_t i = n - 1; i-- > 0;) y[i] -= c[i] * y[i + 1];
        double norm = 0.0;
        for (double v : y) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("inverse iteration diverged");
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
    }
    double sum = 0.0;
    for (double v : x) sum += v;
    if (sum < 0.0) {
        for (double& v : x) v = -v;
    }
    result.vector = std::move(x);
    return result;
}

} // namespace mesodrop::numerics
