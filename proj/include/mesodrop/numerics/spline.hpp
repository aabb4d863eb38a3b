#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "mesodrop/error.hpp"

namespace mesodrop::numerics {

/// Natural cubic spline on a strictly increasing, possibly non-uniform grid.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::span<const double> x, std::span<const double> y)
        : x_(x.begin(), x.end()), y_(y.begin(), y.end())
    {
        const std::size_t n = x_.size();
        if (n < 3 || y_.size() != n) throw ConfigError("spline needs >= 3 matching nodes");
        for (std::size_t i = 1; i < n; ++i) {
            if (!(x_[i] > x_[i - 1])) throw ConfigError("spline nodes must be strictly increasing");
        }

        // Tridiagonal system for the second derivatives, M_0 = M_{n-1} = 0.
        m_.assign(n, 0.0);
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            const double a = h0;
            const double b = 2.0 * (h0 + h1);
            const double cc = h1;
            const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
            const double denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (rhs - a * d[i - 1]) / denom;
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = d[i] - c[i] * m_[i + 1];
        }
    }

    [[nodiscard]] bool empty() const { return x_.empty(); }
    [[nodiscard]] double front() const { return x_.front(); }
    [[nodiscard]] double back() const { return x_.back(); }
    [[nodiscard]] const std::vector<double>& nodes() const { return x_; }
    [[nodiscard]] const std::vector<double>& values() const { return y_; }

    /// Value inside [front, back]; callers handle extrapolation.
    [[nodiscard]] double operator()(double t) const
    {
        const std::size_t i = segment(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

    [[nodiscard]] double derivative(double t) const
    {
        const std::size_t i = segment(t);
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return (y_[i + 1] - y_[i]) / h + ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
    }

private:
    [[nodiscard]] std::size_t segment(double t) const
    {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

} // namespace mesodrop::numerics
