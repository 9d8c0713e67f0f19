#pragma once

// Deterministic derivative-free simplex minimizer (Nelder-Mead with the
// standard reflection/expansion/contraction/shrink moves). Ties are broken
// by lexicographic parameter order so a given start always produces the
// same trajectory.

#include <algorithm>
#include <cmath>
#include <vector>

namespace qei {

struct SimplexOptions {
    int max_evals = 6000;
    double init_step = 0.25;
    double x_tol = 1e-11;
    double f_tol = 1e-14;
    double improve_abs_tol = -1.0; // <= 0: relative default
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
    int improvements = 0; // strict improvements over the starting value
};

namespace detail_opt {
inline double max_abs(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}
} // namespace detail_opt

template <class F>
SimplexResult minimize_simplex(F&& func, std::vector<double> start,
                               const SimplexOptions& opt = {}) {
    const std::size_t n = start.size();
    SimplexResult res;

    struct Vertex {
        std::vector<double> x;
        double f;
    };

    auto lex_less = [](const std::vector<double>& a, const std::vector<double>& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    };
    auto vertex_less = [&](const Vertex& a, const Vertex& b) {
        if (a.f != b.f) return a.f < b.f;
        return lex_less(a.x, b.x);
    };

    auto eval = [&](const std::vector<double>& x) {
        ++res.evals;
        return func(x);
    };

    std::vector<Vertex> simplex;
    simplex.push_back({start, eval(start)});
    const double f_start = simplex[0].f;
    double best = f_start;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x = start;
        x[i] += opt.init_step * (1.0 + std::abs(x[i]));
        simplex.push_back({x, eval(x)});
    }

    const double improve_tol = opt.improve_abs_tol > 0.0 ? opt.improve_abs_tol
                                                         : 1e-12 * (1.0 + std::abs(f_start));

    while (res.evals < opt.max_evals) {
        std::stable_sort(simplex.begin(), simplex.end(), vertex_less);
        if (simplex[0].f < best - improve_tol) {
            best = simplex[0].f;
            ++res.improvements;
        }

        // convergence: simplex collapsed in x and f
        double fspread = simplex.back().f - simplex.front().f;
        double xspread = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double lo = simplex[0].x[i], hi = lo;
            for (const auto& v : simplex) {
                lo = std::min(lo, v.x[i]);
                hi = std::max(hi, v.x[i]);
            }
            xspread = std::max(xspread, hi - lo);
        }
        if (fspread <= opt.f_tol * (1.0 + std::abs(simplex[0].f)) &&
            xspread <= opt.x_tol * (1.0 + detail_opt::max_abs(simplex[0].x)))
            break;

        // centroid of all but the worst
        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v + 1 < simplex.size(); ++v)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i];
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = centroid[i] + t * (simplex.back().x[i] - centroid[i]);
            return x;
        };

        Vertex refl{blend(-1.0), 0.0};
        refl.f = eval(refl.x);

        if (refl.f < simplex[0].f) {
            Vertex expa{blend(-2.0), 0.0};
            expa.f = eval(expa.x);
            simplex.back() = vertex_less(expa, refl) ? expa : refl;
        } else if (refl.f < simplex[simplex.size() - 2].f) {
            simplex.back() = refl;
        } else {
            const bool outside = refl.f < simplex.back().f;
            Vertex contr{blend(outside ? -0.5 : 0.5), 0.0};
            contr.f = eval(contr.x);
            if (contr.f < std::min(refl.f, simplex.back().f)) {
                simplex.back() = contr;
            } else {
                // shrink toward the best vertex
                for (std::size_t v = 1; v < simplex.size(); ++v) {
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[v].x[i] = 0.5 * (simplex[v].x[i] + simplex[0].x[i]);
                    simplex[v].f = eval(simplex[v].x);
                }
            }
        }
    }

    std::stable_sort(simplex.begin(), simplex.end(), vertex_less);
    if (simplex[0].f < best - improve_tol) ++res.improvements;
    res.x = simplex[0].x;
    res.value = simplex[0].f;
    return res;
}

} // namespace qei
