#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include "qei/errors.hpp"

namespace qei {

struct QuadOptions {
    double rel_tol = 1e-8;
    double abs_floor = 1e-14;
    int max_intervals = 8000;
    std::vector<double> breakpoints; // forced subdivision points (kinks etc.)
};

namespace detail {

// Gauss(7)/Kronrod(15) nodes and weights on [-1, 1] (QUADPACK values).
inline constexpr double kGK15Node[8] = {
    0.991455371120812639206854697526, 0.949107912342758524526189684048,
    0.864864423359769072789712788641, 0.741531185599394439863864773281,
    0.586087235467691130294144838259, 0.405845151377397166906606412077,
    0.207784955007898467600689403773, 0.0};
inline constexpr double kK15Weight[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kG7Weight[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
inline double vnorm(const T& v) {
    return std::abs(v);
}

// One G7K15 panel; returns the K15 estimate and an error estimate.
template <class F, class T = std::invoke_result_t<F, double>>
T gk15_panel(F&& f, double a, double b, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    T fc = f(mid);
    T k15 = kK15Weight[7] * fc;
    T g7 = kG7Weight[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGK15Node[i];
        T s = f(mid + dx) + f(mid - dx);
        k15 += kK15Weight[i] * s;
        if (i % 2 == 1) g7 += kG7Weight[i / 2] * s;
    }
    k15 *= half;
    g7 *= half;

    const double d = vnorm<T>(k15 - g7);
    // QUADPACK-style sharpening of the raw |K15 - G7| gap.
    err = std::min(d, std::pow(200.0 * d, 1.5));
    return k15;
}

template <class T>
struct QuadPiece {
    double a, b, err;
    T val;
};

} // namespace detail

// Adaptive Gauss–Kronrod integration of f over [a, b] with forced
// breakpoints. Throws QuadratureFailure if the interval budget is exhausted
// before the tolerance is met. Works for real- and complex-valued f.
template <class F, class T = std::invoke_result_t<F, double>>
T integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    if (a == b) return T{};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    if (!std::isfinite(a) || !std::isfinite(b))
        throw QuadratureFailure("integrate: endpoints must be finite");

    std::vector<double> cuts{a};
    for (double c : opt.breakpoints)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    using Piece = detail::QuadPiece<T>;
    auto worse = [](const Piece& x, const Piece& y) { return x.err < y.err; };
    std::priority_queue<Piece, std::vector<Piece>, decltype(worse)> heap(worse);

    T total{};
    double total_err = 0.0;
    int pieces = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double e;
        T v = detail::gk15_panel(f, cuts[i], cuts[i + 1], e);
        heap.push({cuts[i], cuts[i + 1], e, v});
        total += v;
        total_err += e;
        ++pieces;
    }

    auto tol = [&] {
        return std::max(opt.rel_tol * detail::vnorm<T>(total), opt.abs_floor);
    };

    while (total_err > tol()) {
        if (pieces >= opt.max_intervals)
            throw QuadratureFailure("integrate: tolerance not reached within interval budget");
        Piece p = heap.top();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            // interval no longer splittable in double precision; accept it
            heap.pop();
            total_err -= p.err;
            p.err = 0.0;
            heap.push(p);
            continue;
        }
        heap.pop();
        double e1, e2;
        T v1 = detail::gk15_panel(f, p.a, m, e1);
        T v2 = detail::gk15_panel(f, m, p.b, e2);
        total += (v1 + v2) - p.val;
        total_err += (e1 + e2) - p.err;
        heap.push({p.a, m, e1, v1});
        heap.push({m, p.b, e2, v2});
        ++pieces;
    }
    return sign * total;
}

} // namespace qei
