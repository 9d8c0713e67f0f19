#pragma once

// Renormalized energy flux of a squeezed state, computed from its generating
// function: a smooth Schwarzian-derivative density plus delta-function terms
// at the declared kinks.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qei/errors.hpp"
#include "qei/genfun.hpp"
#include "qei/quadrature.hpp"

namespace qei {

// Delta-function flux term. Weights carry energy units (hbar per unit length
// times length, c = 1); locations coincide with declared kinks.
struct DeltaTerm {
    double location = 0.0;
    double weight = 0.0;
};

struct FluxProfile {
    std::function<double(double)> density; // smooth part, energy / length
    std::vector<DeltaTerm> deltas;
    Interval domain = Interval::whole_line();
    std::optional<Interval> support;   // density vanishes identically outside
    std::vector<double> breakpoints;   // forced quadrature subdivisions
};

// Schwarzian derivative f'''/f' - (3/2)(f''/f')^2 at a smooth point.
inline double schwarzian(const GeneratingFunction& f, double x) {
    if (f.is_kink(x)) throw KinkEvaluation("schwarzian: x is a declared kink");
    const double d1 = f.d1(x);
    if (!(d1 > 0.0)) throw NonMonotone("schwarzian: f'(x) <= 0");
    const double r2 = f.d2(x) / d1;
    return f.d3(x) / d1 - 1.5 * r2 * r2;
}

// Flux expectation value -(hbar / 24 pi) S(f)(x) away from kinks.
inline double flux_density(const GeneratingFunction& f, double x, double hbar) {
    return -(hbar / (24.0 * std::numbers::pi)) * schwarzian(f, x);
}

namespace detail {

// One-sided variant used for grid sampling; at a kink the right-limit
// density is reported (the smooth parts agree for all built-in profiles).
inline double flux_density_side(const GeneratingFunction& f, double x, double hbar, Side side) {
    const double d1 = f.d1_side(x, side);
    if (!(d1 > 0.0)) throw NonMonotone("flux_density: f'(x) <= 0");
    std::size_t i = f.segment_index(x);
    if (side == Side::left && i > 0 && f.segments()[i].interval.lo == x) --i;
    const double r2 = detail::seg_eval(f.segments()[i], x, 2) / d1;
    const double s = detail::seg_eval(f.segments()[i], x, 3) / d1 - 1.5 * r2 * r2;
    return -(hbar / (24.0 * std::numbers::pi)) * s;
}

} // namespace detail

// Distributional flux at the kinks: weight -(hbar / 24 pi) [f''] / f', where
// [f''] is the jump of the second derivative across the kink. This is the
// mollifier limit of the smooth flux formula at a C^1 kink.
inline std::vector<DeltaTerm> delta_terms(const GeneratingFunction& f, double hbar) {
    std::vector<DeltaTerm> out;
    for (double k : f.kinks()) {
        const double jump = f.d2_side(k, Side::right) - f.d2_side(k, Side::left);
        const double slope = 0.5 * (f.d1_side(k, Side::left) + f.d1_side(k, Side::right));
        out.push_back({k, -(hbar / (24.0 * std::numbers::pi)) * jump / slope});
    }
    return out;
}

inline FluxProfile flux_profile(const GeneratingFunction& f, double hbar) {
    FluxProfile p;
    GeneratingFunction copy = f;
    p.density = [copy, hbar](double x) {
        return detail::flux_density_side(copy, x, hbar, Side::right);
    };
    p.deltas = delta_terms(f, hbar);
    p.domain = f.domain();
    p.support = f.density_support();
    for (double k : f.kinks()) p.breakpoints.push_back(k);
    for (const auto& seg : f.segments()) {
        if (std::isfinite(seg.interval.lo)) p.breakpoints.push_back(seg.interval.lo);
        if (std::isfinite(seg.interval.hi)) p.breakpoints.push_back(seg.interval.hi);
        if (const auto* m = std::get_if<MollifiedSeg>(&seg.form)) {
            // smoothed kinks: the density varies on the kernel-width scale
            for (double k : m->base->kinks()) {
                p.breakpoints.push_back(k - m->width);
                p.breakpoints.push_back(k);
                p.breakpoints.push_back(k + m->width);
            }
        }
    }
    return p;
}

// Quadrature of the smooth density over the interval plus the delta weights
// inside it; a delta sitting exactly on an endpoint counts half.
inline double total_energy(const FluxProfile& p, Interval range = Interval::whole_line()) {
    range = range.intersect(p.domain);
    if (!range.valid()) return 0.0;

    // support == nullopt means the density vanishes identically (affine and
    // Moebius-class segments only), so the quadrature is skipped exactly.
    double sum = 0.0;
    std::optional<Interval> quad_range;
    if (p.support && p.density) {
        Interval q = range.intersect(*p.support);
        if (q.valid() && q.lo < q.hi) {
            if (!q.bounded())
                throw QuadratureFailure("total_energy: density support cannot be truncated");
            quad_range = q;
        }
    }

    if (quad_range) {
        QuadOptions opt;
        opt.rel_tol = 1e-8;
        opt.abs_floor = 1e-14;
        opt.breakpoints = p.breakpoints;
        sum += integrate(p.density, quad_range->lo, quad_range->hi, opt);
    }

    for (const auto& d : p.deltas) {
        if (d.location == range.lo || d.location == range.hi)
            sum += 0.5 * d.weight;
        else if (d.location > range.lo && d.location < range.hi)
            sum += d.weight;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Sampling / export
// ---------------------------------------------------------------------------

struct FluxSample {
    std::vector<double> xs;
    std::vector<double> density;
    std::vector<DeltaTerm> deltas;
};

inline FluxSample sample_flux(const GeneratingFunction& f, double hbar, double lo, double hi,
                              int n) {
    if (!(n >= 2)) throw ConfigError("sample_flux: need at least two grid points");
    if (!(lo < hi)) throw ConfigError("sample_flux: empty range");
    FluxSample s;
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        s.xs.push_back(x);
        s.density.push_back(detail::flux_density_side(f, x, hbar, Side::right));
    }
    s.deltas = delta_terms(f, hbar);
    return s;
}

// 17 significant digits: enough to reproduce the double exactly.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string flux_csv(const FluxSample& s) {
    std::string out = "x,density\n";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        out += format_g17(s.xs[i]);
        out += ',';
        out += format_g17(s.density[i]);
        out += '\n';
    }
    return out;
}

inline std::string deltas_json_text(const std::vector<DeltaTerm>& deltas) {
    std::string out = "{\"deltas\":[";
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (i) out += ',';
        out += '[';
        out += format_g17(deltas[i].location);
        out += ',';
        out += format_g17(deltas[i].weight);
        out += ']';
    }
    out += "]}";
    return out;
}

} // namespace qei
