#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "qei/errors.hpp"

namespace qei {

// Cubic interpolating spline on a strictly increasing grid. Natural boundary
// conditions unless end slopes are given (clamped).
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> xs, std::vector<double> ys,
                std::optional<double> slope_lo = std::nullopt,
                std::optional<double> slope_hi = std::nullopt)
        : xs_(std::move(xs)), ys_(std::move(ys)) {
        const std::size_t n = xs_.size();
        if (n < 2 || ys_.size() != n) throw Error("CubicSpline: need matching grids, n >= 2");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(xs_[i] < xs_[i + 1])) throw Error("CubicSpline: grid must increase");

        // tridiagonal solve for second derivatives m_i
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = xs_[i] - xs_[i - 1];
            const double hr = xs_[i + 1] - xs_[i];
            a[i] = hl / 6.0;
            b[i] = (hl + hr) / 3.0;
            c[i] = hr / 6.0;
            r[i] = (ys_[i + 1] - ys_[i]) / hr - (ys_[i] - ys_[i - 1]) / hl;
        }
        const double h0 = xs_[1] - xs_[0];
        const double hn = xs_[n - 1] - xs_[n - 2];
        if (slope_lo) {
            b[0] = h0 / 3.0;
            c[0] = h0 / 6.0;
            r[0] = (ys_[1] - ys_[0]) / h0 - *slope_lo;
        } else {
            b[0] = 1.0; // natural: m_0 = 0
        }
        if (slope_hi) {
            a[n - 1] = hn / 6.0;
            b[n - 1] = hn / 3.0;
            r[n - 1] = *slope_hi - (ys_[n - 1] - ys_[n - 2]) / hn;
        } else {
            b[n - 1] = 1.0;
        }

        m_.assign(n, 0.0);
        std::vector<double> cp(n, 0.0), rp(n, 0.0);
        cp[0] = c[0] / b[0];
        rp[0] = r[0] / b[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double den = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / den;
            rp[i] = (r[i] - a[i] * rp[i - 1]) / den;
        }
        m_[n - 1] = rp[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m_[i] = rp[i] - cp[i] * m_[i + 1];
    }

    double value(double x) const {
        const auto [i, h, t] = locate(x);
        const double A = 1.0 - t, B = t;
        return A * ys_[i] + B * ys_[i + 1] +
               ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
    }

    double deriv(double x) const {
        const auto [i, h, t] = locate(x);
        const double A = 1.0 - t, B = t;
        return (ys_[i + 1] - ys_[i]) / h +
               h * (-(3.0 * A * A - 1.0) * m_[i] + (3.0 * B * B - 1.0) * m_[i + 1]) / 6.0;
    }

    double deriv2(double x) const {
        const auto [i, h, t] = locate(x);
        return (1.0 - t) * m_[i] + t * m_[i + 1];
    }

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }

private:
    struct Loc {
        std::size_t i;
        double h, t;
    };
    Loc locate(double x) const {
        std::size_t lo = 0, hi = xs_.size() - 2;
        if (x <= xs_.front()) {
            lo = 0;
        } else if (x >= xs_.back()) {
            lo = hi;
        } else {
            while (lo < hi) {
                const std::size_t mid = (lo + hi + 1) / 2;
                if (x >= xs_[mid])
                    lo = mid;
                else
                    hi = mid - 1;
            }
        }
        const double h = xs_[lo + 1] - xs_[lo];
        return {lo, h, (x - xs_[lo]) / h};
    }

    std::vector<double> xs_, ys_, m_;
};

} // namespace qei
