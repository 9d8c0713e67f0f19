#pragma once

// Monotone C^1 generating functions. A generating function f implicitly
// defines a squeezed state of the 1+1D massless field through the deformed
// modes ~ exp(-i w f(x)); everything downstream (flux, correlators, energy
// bounds) is computed from f and its first three derivatives.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qei/errors.hpp"
#include "qei/interval.hpp"
#include "qei/quadrature.hpp"

namespace qei {

class GeneratingFunction;

// ---------------------------------------------------------------------------
// Segment forms
// ---------------------------------------------------------------------------

// f(x) = c + d x
struct AffineSeg {
    double c = 0.0, d = 1.0;
};

// f(x) = (c + d x) / (a + b x)
struct MoebiusSeg {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
};

// f(x) = k + 1 / (a + b x), increasing for b < 0. This is the natural form
// of the middle branch of the shock and minimum-compensation profiles.
struct ReciprocalShiftSeg {
    double k = 0.0, a = 1.0, b = -1.0;
};

// User-supplied sample function; derivatives by central finite differences.
// The callable should tolerate evaluation a few derivative steps beyond the
// declared interval.
struct NumericSeg {
    std::function<double(double)> fn;
};

// Convolution of a base generating function with a compact smooth bump.
struct MollifiedSeg {
    std::shared_ptr<const GeneratingFunction> base;
    double width = 0.0;
};

struct PiecewiseSegment {
    Interval interval;
    std::variant<AffineSeg, MoebiusSeg, ReciprocalShiftSeg, NumericSeg, MollifiedSeg> form;
};

enum class Side { left, right };

// ---------------------------------------------------------------------------
// Parameter bundles
// ---------------------------------------------------------------------------

struct MobiusParams {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double det() const { return d * a - b * c; }
    bool has_pole() const { return b != 0.0; }
    double pole() const { return -a / b; }
};

// Negative-energy shock profile parameters. The admissible region
// E_n * (x_f - x_i) < hbar / (12 pi) is the uncertainty relation between the
// shock energy and the delay before the compensating positive shock.
struct ShockParams {
    double E_n = 0.0;   // |energy| of the leading negative shock
    double x_i = 0.0;   // arrival coordinate of the negative shock
    double x_f = 0.0;   // arrival coordinate of the positive shock
    double hbar = 1.0;

    double l() const { return x_f - x_i; }
    double epsilon() const {
        const double s = 12.0 * std::numbers::pi * E_n / hbar;
        return s * s;
    }
    bool admissible() const {
        return E_n * l() < hbar / (12.0 * std::numbers::pi);
    }
};

// ---------------------------------------------------------------------------
// Mollifier kernel
// ---------------------------------------------------------------------------

// Normalized C-infinity bump supported on (-1, 1).
struct BumpKernel {
    static double psi(double u) {
        const double q = 1.0 - u * u;
        if (q <= 0.0) return 0.0;
        return std::exp(-1.0 / q);
    }
    static double dpsi(double u) {
        const double q = 1.0 - u * u;
        if (q <= 0.0) return 0.0;
        return psi(u) * (-2.0 * u / (q * q));
    }
    static double norm() {
        static const double n = [] {
            QuadOptions opt;
            opt.rel_tol = 1e-13;
            opt.abs_floor = 1e-16;
            return integrate([](double u) { return psi(u); }, -1.0, 1.0, opt);
        }();
        return n;
    }
};

// ---------------------------------------------------------------------------
// Finite differences for numeric segments (4th-order central stencils).
// The step grows with the derivative order: the higher the order, the more
// the h^-m roundoff amplification dominates over the h^4 truncation term.
// ---------------------------------------------------------------------------
namespace detail {

inline double fd_step(double x, int order) {
    const double scaled = 1e-4 * std::abs(x);
    switch (order) {
        case 1: return std::max(1e-5, scaled);
        case 2: return std::max(2e-3, scaled);
        default: return std::max(6e-3, scaled);
    }
}

template <class F>
double fd_d1(const F& f, double x) {
    const double h = fd_step(x, 1);
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

template <class F>
double fd_d2(const F& f, double x) {
    const double h = fd_step(x, 2);
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) /
           (12 * h * h);
}

template <class F>
double fd_d3(const F& f, double x) {
    const double h = fd_step(x, 3);
    return (f(x - 3 * h) - 8 * f(x - 2 * h) + 13 * f(x - h) - 13 * f(x + h) +
            8 * f(x + 2 * h) - f(x + 3 * h)) /
           (8 * h * h * h);
}

double seg_eval(const PiecewiseSegment& seg, double x, int order);

} // namespace detail

// ---------------------------------------------------------------------------
// GeneratingFunction
// ---------------------------------------------------------------------------

// Immutable monotone C^1 map. Segments tile the domain contiguously; kinks
// are declared by the constructors (never detected numerically) and mark the
// points where f is C^1 but not C^2.
class GeneratingFunction {
public:
    GeneratingFunction(std::vector<PiecewiseSegment> segments, std::vector<double> kinks,
                       double hbar = 1.0)
        : segments_(std::move(segments)), kinks_(std::move(kinks)), hbar_(hbar) {
        if (segments_.empty()) throw Error("GeneratingFunction: no segments");
        if (hbar_ <= 0.0) throw Error("GeneratingFunction: hbar must be positive");
        for (std::size_t i = 0; i + 1 < segments_.size(); ++i) {
            if (segments_[i].interval.hi != segments_[i + 1].interval.lo)
                throw Error("GeneratingFunction: segments must tile the domain contiguously");
        }
        std::sort(kinks_.begin(), kinks_.end());
    }

    double value(double x) const { return eval(x, 0); }
    double operator()(double x) const { return eval(x, 0); }
    double d1(double x) const { return eval(x, 1); }
    double d2(double x) const { return eval(x, 2); }
    double d3(double x) const { return eval(x, 3); }

    double value_side(double x, Side s) const { return eval_side(x, 0, s); }
    double d1_side(double x, Side s) const { return eval_side(x, 1, s); }
    double d2_side(double x, Side s) const { return eval_side(x, 2, s); }

    // f(y) - f(x), cancellation-free within a closed-form segment.
    double value_diff(double x, double y) const;

    const std::vector<PiecewiseSegment>& segments() const { return segments_; }
    const std::vector<double>& kinks() const { return kinks_; }
    double hbar() const { return hbar_; }

    Interval domain() const {
        return {segments_.front().interval.lo, segments_.back().interval.hi};
    }

    bool is_kink(double x) const {
        for (double k : kinks_)
            if (k == x) return true;
        return false;
    }

    // Whether all segments have exact closed-form derivatives.
    bool closed_form() const {
        for (const auto& s : segments_)
            if (std::holds_alternative<NumericSeg>(s.form) ||
                std::holds_alternative<MollifiedSeg>(s.form))
                return false;
        return true;
    }

    // Smallest interval outside which f is exactly affine, or nullopt if f
    // is affine everywhere.
    std::optional<Interval> curved_hull() const;

    // Smallest interval outside which the flux density vanishes identically
    // (affine and Moebius-class segments carry no smooth flux).
    std::optional<Interval> density_support() const;

    // Slope of the asymptotic tail on the given side.
    double tail_slope(Side s) const;

    std::size_t segment_index(double x) const {
        const Interval dom = domain();
        if (!(x >= dom.lo && x <= dom.hi)) throw DomainError("evaluation outside domain");
        std::size_t lo = 0, hi = segments_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (x >= segments_[mid].interval.lo)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }

private:
    double eval(double x, int order) const {
        return detail::seg_eval(segments_[segment_index(x)], x, order);
    }

    double eval_side(double x, int order, Side side) const {
        std::size_t i = segment_index(x);
        if (side == Side::left && i > 0 && segments_[i].interval.lo == x) --i;
        return detail::seg_eval(segments_[i], x, order);
    }

    std::vector<PiecewiseSegment> segments_;
    std::vector<double> kinks_;
    double hbar_;
};

// ---------------------------------------------------------------------------
// Segment evaluation
// ---------------------------------------------------------------------------
namespace detail {

inline double affine_eval(const AffineSeg& s, double x, int order) {
    switch (order) {
        case 0: return s.c + s.d * x;
        case 1: return s.d;
        default: return 0.0;
    }
}

inline double moebius_eval(const MoebiusSeg& s, double x, int order) {
    const double den = s.a + s.b * x;
    const double det = s.d * s.a - s.b * s.c;
    switch (order) {
        case 0: return (s.c + s.d * x) / den;
        case 1: return det / (den * den);
        case 2: return -2.0 * s.b * det / (den * den * den);
        default: return 6.0 * s.b * s.b * det / (den * den * den * den);
    }
}

inline double recip_eval(const ReciprocalShiftSeg& s, double x, int order) {
    const double den = s.a + s.b * x;
    switch (order) {
        case 0: return s.k + 1.0 / den;
        case 1: return -s.b / (den * den);
        case 2: return 2.0 * s.b * s.b / (den * den * den);
        default: return -6.0 * s.b * s.b * s.b / (den * den * den * den);
    }
}

inline double numeric_eval(const NumericSeg& s, double x, int order) {
    switch (order) {
        case 0: return s.fn(x);
        case 1: return fd_d1(s.fn, x);
        case 2: return fd_d2(s.fn, x);
        default: return fd_d3(s.fn, x);
    }
}

// Breakpoints of the convolution integrand in the kernel variable y = x - t,
// where t runs over base kinks and segment boundaries inside the window.
inline std::vector<double> mollify_breaks(const GeneratingFunction& base, double x, double w) {
    std::vector<double> out;
    auto add = [&](double t) {
        const double y = x - t;
        if (y > -w && y < w) out.push_back(y);
    };
    for (double k : base.kinks()) add(k);
    for (const auto& seg : base.segments()) {
        if (std::isfinite(seg.interval.lo)) add(seg.interval.lo);
        if (std::isfinite(seg.interval.hi)) add(seg.interval.hi);
    }
    return out;
}

inline double mollified_eval(const MollifiedSeg& s, double x, int order) {
    const GeneratingFunction& base = *s.base;
    const double w = s.width;
    const double n = BumpKernel::norm();

    QuadOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_floor = 1e-15;
    opt.breakpoints = mollify_breaks(base, x, w);

    // Derivatives are pushed onto the base function while it stays
    // continuous (orders 0..2) and onto the kernel for the third derivative,
    // which keeps the distributional contributions of base kinks.
    auto kernel = [&](double y) { return BumpKernel::psi(y / w) / (w * n); };
    auto dkernel = [&](double y) { return BumpKernel::dpsi(y / w) / (w * w * n); };

    switch (order) {
        case 0:
            return integrate([&](double y) { return kernel(y) * base.value(x - y); }, -w, w, opt);
        case 1:
            return integrate([&](double y) { return kernel(y) * base.d1(x - y); }, -w, w, opt);
        case 2:
            return integrate([&](double y) { return kernel(y) * base.d2(x - y); }, -w, w, opt);
        default:
            return integrate([&](double y) { return dkernel(y) * base.d2(x - y); }, -w, w, opt);
    }
}

inline double seg_eval(const PiecewiseSegment& seg, double x, int order) {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AffineSeg>) return affine_eval(s, x, order);
            else if constexpr (std::is_same_v<S, MoebiusSeg>) return moebius_eval(s, x, order);
            else if constexpr (std::is_same_v<S, ReciprocalShiftSeg>) return recip_eval(s, x, order);
            else if constexpr (std::is_same_v<S, NumericSeg>) return numeric_eval(s, x, order);
            else return mollified_eval(s, x, order);
        },
        seg.form);
}

// f(y) - f(x) rearranged so that the coordinate difference factors out;
// avoids catastrophic cancellation between nearby function values.
inline double seg_value_diff(const PiecewiseSegment& seg, double x, double y) {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AffineSeg>) {
                return s.d * (y - x);
            } else if constexpr (std::is_same_v<S, MoebiusSeg>) {
                const double det = s.d * s.a - s.b * s.c;
                return det * (y - x) / ((s.a + s.b * x) * (s.a + s.b * y));
            } else if constexpr (std::is_same_v<S, ReciprocalShiftSeg>) {
                return -s.b * (y - x) / ((s.a + s.b * x) * (s.a + s.b * y));
            } else {
                return seg_eval(seg, y, 0) - seg_eval(seg, x, 0);
            }
        },
        seg.form);
}

} // namespace detail

inline double GeneratingFunction::value_diff(double x, double y) const {
    const std::size_t ix = segment_index(x), iy = segment_index(y);
    if (ix == iy) return detail::seg_value_diff(segments_[ix], x, y);
    return value(y) - value(x);
}

// ---------------------------------------------------------------------------
// curved hull / density support / tail slopes
// ---------------------------------------------------------------------------

inline std::optional<Interval> GeneratingFunction::curved_hull() const {
    std::optional<Interval> hull;
    auto widen = [&](Interval iv) {
        hull = hull ? hull->hull(iv) : iv;
    };
    for (const auto& seg : segments_) {
        if (std::holds_alternative<AffineSeg>(seg.form)) continue;
        if (const auto* m = std::get_if<MollifiedSeg>(&seg.form)) {
            auto base_hull = m->base->curved_hull();
            for (double k : m->base->kinks()) {
                Interval pt{k, k};
                base_hull = base_hull ? base_hull->hull(pt) : pt;
            }
            if (base_hull)
                widen({base_hull->lo - m->width, base_hull->hi + m->width});
            continue;
        }
        widen(seg.interval);
    }
    for (double k : kinks_) widen({k, k});
    if (hull) *hull = hull->intersect(domain());
    return hull;
}

inline std::optional<Interval> GeneratingFunction::density_support() const {
    std::optional<Interval> sup;
    auto widen = [&](Interval iv) { sup = sup ? sup->hull(iv) : iv; };
    for (const auto& seg : segments_) {
        if (std::holds_alternative<NumericSeg>(seg.form)) {
            widen(seg.interval);
        } else if (const auto* m = std::get_if<MollifiedSeg>(&seg.form)) {
            auto base_hull = m->base->curved_hull();
            for (double k : m->base->kinks()) {
                Interval pt{k, k};
                base_hull = base_hull ? base_hull->hull(pt) : pt;
            }
            if (base_hull)
                widen({base_hull->lo - m->width, base_hull->hi + m->width});
        }
        // affine / Moebius / reciprocal-shift segments have zero Schwarzian
    }
    if (sup) *sup = sup->intersect(domain());
    return sup;
}

inline double GeneratingFunction::tail_slope(Side s) const {
    const auto& seg = (s == Side::left) ? segments_.front() : segments_.back();
    if (const auto* a = std::get_if<AffineSeg>(&seg.form)) return a->d;
    if (const auto* m = std::get_if<MollifiedSeg>(&seg.form)) return m->base->tail_slope(s);
    const Interval dom = domain();
    const double x = (s == Side::left) ? (std::isfinite(dom.lo) ? dom.lo : -1e6)
                                       : (std::isfinite(dom.hi) ? dom.hi : 1e6);
    return detail::seg_eval(seg, x, 1);
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

// Vacuum: f(x) = x on the whole line.
inline GeneratingFunction make_identity(double hbar = 1.0) {
    return GeneratingFunction({{Interval::whole_line(), AffineSeg{0.0, 1.0}}}, {}, hbar);
}

// Flux-vanishing generator f(x) = (c + d x)/(a + b x) on a pole-free domain.
inline GeneratingFunction make_moebius(const MobiusParams& p,
                                       Interval domain = Interval::whole_line(),
                                       double hbar = 1.0) {
    if (!(p.det() > 0.0))
        throw NonMonotone("make_moebius: requires d*a - b*c > 0");
    if (p.has_pole() && domain.contains(p.pole()))
        throw PoleInDomain("make_moebius: pole -a/b inside the declared domain");
    return GeneratingFunction({{domain, MoebiusSeg{p.a, p.b, p.c, p.d}}}, {}, hbar);
}

// Three-branch shock profile: identity left of x_i, a reciprocal-shift
// (Moebius-class, zero Schwarzian) middle, and an affine right tail. The two
// C^1 kinks at x_i and x_f carry delta-function flux of weight -E_n and
// +E_n / (1 - 12 pi E_n l / hbar).
inline GeneratingFunction make_shock(const ShockParams& s) {
    if (s.hbar <= 0.0) throw Error("make_shock: hbar must be positive");
    if (s.E_n < 0.0) throw Error("make_shock: E_n must be nonnegative");
    if (s.x_i > s.x_f) throw DomainError("make_shock: requires x_i <= x_f");
    if (s.E_n == 0.0 || s.l() == 0.0) return make_identity(s.hbar);
    if (!s.admissible())
        throw InadmissibleShock("make_shock: E_n * l >= hbar / (12 pi)");

    const double sq = 12.0 * std::numbers::pi * s.E_n / s.hbar; // sqrt(epsilon)
    const double eps = sq * sq;

    ReciprocalShiftSeg mid;
    mid.k = s.x_i - 1.0 / sq;
    mid.a = sq + eps * s.x_i;
    mid.b = -eps;

    const double inf = std::numeric_limits<double>::infinity();
    const PiecewiseSegment left{{-inf, s.x_i}, AffineSeg{0.0, 1.0}};
    const PiecewiseSegment middle{{s.x_i, s.x_f}, mid};

    const double slope = detail::recip_eval(mid, s.x_f, 1);
    const double val = detail::recip_eval(mid, s.x_f, 0);
    const PiecewiseSegment right{{s.x_f, inf}, AffineSeg{val - slope * s.x_f, slope}};

    return GeneratingFunction({left, middle, right}, {s.x_i, s.x_f}, s.hbar);
}

// Minimum-compensation profile: plane waves for x > L and x < 0, a
// reciprocal-shift branch in between. Carries flux -E_n delta(x) and the
// compensating positive delta at x = L.
inline GeneratingFunction make_f_eta(double E_n, double L, double hbar = 1.0) {
    if (hbar <= 0.0) throw Error("make_f_eta: hbar must be positive");
    if (L <= 0.0) throw DomainError("make_f_eta: L must be positive");
    if (E_n < 0.0) throw Error("make_f_eta: E_n must be nonnegative");
    if (E_n == 0.0) return make_identity(hbar);
    const double budget = hbar / (12.0 * std::numbers::pi);
    if (!(E_n * L < budget))
        throw InadmissibleShock("make_f_eta: E_n * L >= hbar / (12 pi)");

    const double rho = E_n / (budget - E_n * L);

    ReciprocalShiftSeg mid;
    mid.k = L - 1.0 / rho;
    mid.a = rho * rho * L + rho;
    mid.b = -rho * rho;

    const double inf = std::numeric_limits<double>::infinity();
    const double slope0 = detail::recip_eval(mid, 0.0, 1);
    const double val0 = detail::recip_eval(mid, 0.0, 0);

    const PiecewiseSegment left{{-inf, 0.0}, AffineSeg{val0, slope0}};
    const PiecewiseSegment middle{{0.0, L}, mid};
    const PiecewiseSegment right{{L, inf}, AffineSeg{0.0, 1.0}};

    return GeneratingFunction({left, middle, right}, {0.0, L}, hbar);
}

// Wrap an arbitrary monotone callable as a single numeric segment.
inline GeneratingFunction make_numeric(std::function<double(double)> fn, Interval domain,
                                       double hbar = 1.0) {
    return GeneratingFunction({{domain, NumericSeg{std::move(fn)}}}, {}, hbar);
}

// Convolve f with a normalized compact bump of the given width. The result
// is C-infinity, kink-free and monotone, and converges to f as width -> 0.
// Affine maps are exact fixed points and are returned unchanged.
inline GeneratingFunction mollify(const GeneratingFunction& f, double width) {
    if (!(width > 0.0)) throw DomainError("mollify: width must be positive");
    if (f.segments().size() == 1 &&
        std::holds_alternative<AffineSeg>(f.segments().front().form))
        return f;

    Interval dom = f.domain();
    Interval shrunk{std::isfinite(dom.lo) ? dom.lo + width : dom.lo,
                    std::isfinite(dom.hi) ? dom.hi - width : dom.hi};
    if (!shrunk.valid())
        throw DomainError("mollify: width exceeds the domain");

    auto base = std::make_shared<const GeneratingFunction>(f);
    return GeneratingFunction({{shrunk, MollifiedSeg{base, width}}}, {}, f.hbar());
}

// Default width: one hundredth of the curved region's extent.
inline GeneratingFunction mollify(const GeneratingFunction& f) {
    const auto hull = f.curved_hull();
    if (!hull) return f; // affine everywhere: exact fixed point
    if (!(hull->width() > 0.0))
        throw DomainError("mollify: profile has no natural width, pass one explicitly");
    return mollify(f, hull->width() / 100.0);
}

// Composition of Moebius parameter sets: result(x) = p1(p2(x)).
inline MobiusParams mobius_compose(const MobiusParams& p1, const MobiusParams& p2) {
    MobiusParams r;
    r.d = p1.d * p2.d + p1.c * p2.b;
    r.c = p1.d * p2.c + p1.c * p2.a;
    r.b = p1.b * p2.d + p1.a * p2.b;
    r.a = p1.b * p2.c + p1.a * p2.a;
    return r;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
    double worst_c0 = 0.0;   // relative value mismatch across segment joins
    double worst_c1 = 0.0;   // relative slope mismatch across segment joins
    double min_slope = std::numeric_limits<double>::infinity();
    bool asymptotics_ok = true;
    std::vector<std::string> failures;

    static constexpr double match_tol = 1e-12;

    bool monotone_ok() const { return min_slope > 0.0; }
    bool c0_ok() const { return worst_c0 <= match_tol; }
    bool c1_ok() const { return worst_c1 <= match_tol; }
    bool passed() const {
        return monotone_ok() && c0_ok() && c1_ok() && asymptotics_ok && failures.empty();
    }
};

// Checks monotonicity on a dense sample plus segment endpoints, C^1 matching
// at every join, and asymptotic divergence. Never throws; failures are
// reported in the returned record.
inline ValidationReport validate(const GeneratingFunction& f) {
    ValidationReport rep;
    const auto& segs = f.segments();

    for (std::size_t i = 1; i < segs.size(); ++i) {
        const double x = segs[i].interval.lo;
        const double vl = detail::seg_eval(segs[i - 1], x, 0);
        const double vr = detail::seg_eval(segs[i], x, 0);
        const double sl = detail::seg_eval(segs[i - 1], x, 1);
        const double sr = detail::seg_eval(segs[i], x, 1);
        const double vscale = std::max({1.0, std::abs(vl), std::abs(vr)});
        const double sscale = std::max({1.0, std::abs(sl), std::abs(sr)});
        rep.worst_c0 = std::max(rep.worst_c0, std::abs(vl - vr) / vscale);
        rep.worst_c1 = std::max(rep.worst_c1, std::abs(sl - sr) / sscale);
    }
    if (!rep.c0_ok()) rep.failures.push_back("value jump across a segment boundary");
    if (!rep.c1_ok()) rep.failures.push_back("slope jump across a segment boundary");

    for (double k : f.kinks()) {
        bool at_boundary = false;
        for (const auto& s : segs)
            if (s.interval.lo == k || s.interval.hi == k) at_boundary = true;
        if (!at_boundary)
            rep.failures.push_back("declared kink is not a segment boundary");
    }

    // monotonicity sampling
    for (const auto& seg : segs) {
        double lo = seg.interval.lo, hi = seg.interval.hi;
        const bool inf_lo = !std::isfinite(lo), inf_hi = !std::isfinite(hi);
        if (inf_lo && inf_hi) {
            lo = -64.0;
            hi = 64.0;
        } else if (inf_lo) {
            lo = hi - 64.0 * (1.0 + std::abs(hi));
        } else if (inf_hi) {
            hi = lo + 64.0 * (1.0 + std::abs(lo));
        }
        const int n = 33;
        for (int j = 0; j <= n; ++j) {
            const double x = lo + (hi - lo) * j / n;
            rep.min_slope = std::min(rep.min_slope, detail::seg_eval(seg, x, 1));
        }
    }
    if (!rep.monotone_ok()) rep.failures.push_back("f' <= 0 at a sampled point");

    const Interval dom = f.domain();
    if (!std::isfinite(dom.lo) && !(f.tail_slope(Side::left) > 0.0)) rep.asymptotics_ok = false;
    if (!std::isfinite(dom.hi) && !(f.tail_slope(Side::right) > 0.0)) rep.asymptotics_ok = false;
    if (!rep.asymptotics_ok) rep.failures.push_back("nonpositive asymptotic slope");

    return rep;
}

// Monotone inverse: the x with f(x) = y, by bracketed bisection.
inline double inverse(const GeneratingFunction& f, double y) {
    const Interval dom = f.domain();
    double lo = std::isfinite(dom.lo) ? dom.lo : -1.0;
    double hi = std::isfinite(dom.hi) ? dom.hi : 1.0;
    // expand the bracket on unbounded sides
    for (int i = 0; i < 200 && f.value(lo) > y; ++i) {
        if (std::isfinite(dom.lo)) break;
        lo = (lo < 0 ? lo * 2 : -1.0) ;
    }
    for (int i = 0; i < 200 && f.value(hi) < y; ++i) {
        if (std::isfinite(dom.hi)) break;
        hi = (hi > 0 ? hi * 2 : 1.0);
    }
    if (f.value(lo) > y || f.value(hi) < y)
        throw DomainError("inverse: target outside the range of f");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        (f.value(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace qei
