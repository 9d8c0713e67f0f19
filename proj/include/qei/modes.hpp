#pragma once

// Mode machinery for the 1+1D massless field: plane and deformed plane-wave
// modes, moving-mirror boundary modes, Klein-Gordon inner products of
// Gaussian wavepackets, Wick correlators, and the point-splitting flux
// evaluator that cross-checks the Schwarzian density through an independent
// route (two-point functions only, no third derivatives).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "qei/errors.hpp"
#include "qei/genfun.hpp"
#include "qei/quadrature.hpp"
#include "qei/spline.hpp"

namespace qei {

using complex = std::complex<double>;

enum class ModeKind { plane, deformed };
enum class Sector { positive, conjugate };

// A single delta-normalized mode: plane wave or its deformed counterpart.
struct ModeSpec {
    double omega = 1.0;
    ModeKind kind = ModeKind::plane;
    std::shared_ptr<const GeneratingFunction> generator; // deformed kind only
};

// sqrt(hbar / 4 pi w) exp(-i w x), the delta-normalized left-mover mode.
inline complex plane_mode(double omega, double xp, double hbar) {
    if (!(omega > 0.0)) throw DomainError("plane_mode: omega must be positive");
    const double amp = std::sqrt(hbar / (4.0 * std::numbers::pi * omega));
    return std::polar(amp, -omega * xp);
}

// Deformed mode sqrt(hbar / 4 pi w) exp(-i w f(x)).
inline complex deformed_mode(const GeneratingFunction& f, double omega, double x, double hbar) {
    if (!(omega > 0.0)) throw DomainError("deformed_mode: omega must be positive");
    const double amp = std::sqrt(hbar / (4.0 * std::numbers::pi * omega));
    return std::polar(amp, -omega * f.value(x));
}

inline complex mode_value(const ModeSpec& m, double x, double hbar) {
    if (m.kind == ModeKind::deformed) {
        if (!m.generator) throw DomainError("mode_value: deformed kind requires a generator");
        return deformed_mode(*m.generator, m.omega, x, hbar);
    }
    return plane_mode(m.omega, x, hbar);
}

// Mirror in-mode: Theta(x) [ m(t + x) - m(t - x) ], vanishing identically at
// the boundary x = 0 and on the mirror side x < 0.
inline complex mirror_mode(double omega, double t, double x, double hbar,
                           const GeneratingFunction* generator = nullptr) {
    if (!(omega > 0.0)) throw DomainError("mirror_mode: omega must be positive");
    if (x < 0.0) return {0.0, 0.0};
    if (generator)
        return deformed_mode(*generator, omega, t + x, hbar) -
               deformed_mode(*generator, omega, t - x, hbar);
    return plane_mode(omega, t + x, hbar) - plane_mode(omega, t - x, hbar);
}

// ---------------------------------------------------------------------------
// Wavepackets
// ---------------------------------------------------------------------------

// Normalizable Gaussian surrogate for a delta-normalized continuum mode:
// p(x) = Int_0^inf dw g(w) sqrt(hbar/4 pi w) exp(-i w f(x)), with a Gaussian
// frequency profile g centered at center_omega. center_omega >= 8 * bandwidth
// keeps the sub-zero frequency mass below 1e-12.
struct Wavepacket {
    double center_omega = 8.0;
    double bandwidth = 1.0;
    ModeKind kind = ModeKind::plane;
    std::shared_ptr<const GeneratingFunction> generator; // deformed kind only
    Sector sector = Sector::positive;
    double hbar = 1.0;
};

inline Wavepacket make_wavepacket(double center_omega, double bandwidth,
                                  ModeKind kind = ModeKind::plane,
                                  std::shared_ptr<const GeneratingFunction> generator = nullptr,
                                  Sector sector = Sector::positive, double hbar = 1.0) {
    if (!(bandwidth > 0.0)) throw DomainError("wavepacket: bandwidth must be positive");
    if (!(center_omega >= 8.0 * bandwidth))
        throw DomainError("wavepacket: requires center_omega >= 8 * bandwidth");
    if (kind == ModeKind::deformed && !generator)
        throw DomainError("wavepacket: deformed kind requires a generator");
    return {center_omega, bandwidth, kind, std::move(generator), sector, hbar};
}

namespace detail {

// Frequency profile, normalized so that Int |g|^2 dw = 1 over the line.
inline double packet_weight(const Wavepacket& p, double omega) {
    const double s = p.bandwidth;
    const double z = (omega - p.center_omega) / (2.0 * s);
    return std::pow(2.0 * std::numbers::pi * s * s, -0.25) * std::exp(-z * z);
}

// Slowly varying envelope E(u) with p(x) = exp(-i w0 u) E(u), u = f(x).
// Tabulated once on a u-grid and spline-interpolated; the grid resolves the
// bandwidth scale, not the fast carrier.
class PacketEvaluator {
public:
    explicit PacketEvaluator(const Wavepacket& p) : p_(p) {
        const double s = p.bandwidth;
        u_max_ = 12.0 / (std::numbers::sqrt2 * s);
        const double du = 0.01 / s;
        const int n = static_cast<int>(std::ceil(2.0 * u_max_ / du)) + 1;

        std::vector<double> us(n), re(n), im(n);
        const double lo = std::max(0.0, p.center_omega - 12.0 * s);
        const double hi = p.center_omega + 12.0 * s;
        QuadOptions opt;
        opt.rel_tol = 1e-10;
        opt.abs_floor = 1e-13;
        opt.max_intervals = 20000;
        for (int i = 0; i < n; ++i) {
            const double u = -u_max_ + 2.0 * u_max_ * i / (n - 1);
            us[i] = u;
            const complex e = integrate(
                [&](double w) -> complex {
                    const double amp =
                        packet_weight(p, w) * std::sqrt(p.hbar / (4.0 * std::numbers::pi * w));
                    return std::polar(amp, -(w - p.center_omega) * u);
                },
                lo, hi, opt);
            re[i] = e.real();
            im[i] = e.imag();
        }
        env_re_ = CubicSpline(us, re);
        env_im_ = CubicSpline(std::move(us), std::move(im));
    }

    double u_max() const { return u_max_; }

    // packet value and x-derivative at coordinate x
    complex value(double x) const {
        const double u = map(x);
        if (std::abs(u) >= u_max_) return {0.0, 0.0};
        complex v = envelope(u) * std::polar(1.0, -p_.center_omega * u);
        return p_.sector == Sector::positive ? v : std::conj(v);
    }

    complex dvalue(double x) const {
        const double u = map(x);
        if (std::abs(u) >= u_max_) return {0.0, 0.0};
        const double du_dx = (p_.kind == ModeKind::deformed) ? p_.generator->d1(x) : 1.0;
        const complex carrier = std::polar(1.0, -p_.center_omega * u);
        complex v = (denvelope(u) - complex(0.0, p_.center_omega) * envelope(u)) * carrier * du_dx;
        return p_.sector == Sector::positive ? v : std::conj(v);
    }

    double map(double x) const {
        return p_.kind == ModeKind::deformed ? p_.generator->value(x) : x;
    }

private:
    complex envelope(double u) const { return {env_re_.value(u), env_im_.value(u)}; }
    complex denvelope(double u) const { return {env_re_.deriv(u), env_im_.deriv(u)}; }

    Wavepacket p_;
    double u_max_ = 0.0;
    CubicSpline env_re_, env_im_;
};

} // namespace detail

// Klein-Gordon inner product (i/hbar) Int [p1* d p2 - (d p1*) p2] dx of two
// wavepackets, integrated numerically over a truncated domain that carries
// all but < 1e-10 of both packets.
inline complex kg_inner(const Wavepacket& p1, const Wavepacket& p2) {
    if (p1.kind != p2.kind)
        throw DomainError("kg_inner: packets must share a generator kind");
    if (p1.kind == ModeKind::deformed && p1.generator != p2.generator)
        throw DomainError("kg_inner: deformed packets must share the generator");
    if (p1.hbar != p2.hbar) throw DomainError("kg_inner: packets must share hbar");

    detail::PacketEvaluator e1(p1), e2(p2);
    const double u_lim = std::min(e1.u_max(), e2.u_max());

    double x_lo, x_hi;
    if (p1.kind == ModeKind::deformed) {
        const GeneratingFunction& f = *p1.generator;
        try {
            x_lo = inverse(f, -u_lim);
            x_hi = inverse(f, u_lim);
        } catch (const DomainError&) {
            throw TruncationFailure("kg_inner: generator range cannot cover the packet support");
        }
    } else {
        x_lo = -u_lim;
        x_hi = u_lim;
    }

    QuadOptions opt;
    opt.rel_tol = 1e-9;
    opt.abs_floor = 1e-10;
    opt.max_intervals = 40000;
    if (p1.kind == ModeKind::deformed)
        for (double k : p1.generator->kinks()) opt.breakpoints.push_back(k);

    const double hbar = p1.hbar;
    const complex result = integrate(
        [&](double x) -> complex {
            const complex v1 = e1.value(x), v2 = e2.value(x);
            const complex d1 = e1.dvalue(x), d2 = e2.dvalue(x);
            return complex(0.0, 1.0 / hbar) * (std::conj(v1) * d2 - std::conj(d1) * v2);
        },
        x_lo, x_hi, opt);
    return result;
}

// ---------------------------------------------------------------------------
// Correlation functions
// ---------------------------------------------------------------------------

// <d phi(x1) d phi(x2)> = -(hbar/4 pi) f'(x1) f'(x2) / (f(x1) - f(x2))^2.
inline double two_point(const GeneratingFunction& f, double x1, double x2, double hbar) {
    if (x1 == x2) throw CoincidentPoints("two_point: x1 == x2");
    const double df = f.value(x1) - f.value(x2);
    return -(hbar / (4.0 * std::numbers::pi)) * f.d1(x1) * f.d1(x2) / (df * df);
}

// One-point expectation of d phi in the squeezed state defined by f. Every
// term of the mode expansion carries an annihilator acting on the state (or
// its conjugate on the left), so the expectation vanishes identically for
// any generator and any smearing; the same holds for the vacuum. Kept
// explicit so the property is part of the tested surface.
inline double one_point_expectation(const GeneratingFunction&, double) { return 0.0; }

// Four-point function by Wick pairing of two-point functions.
inline double wick_four_point(const GeneratingFunction& f, const std::array<double, 4>& xs,
                              double hbar) {
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (xs[i] == xs[j]) throw CoincidentPoints("wick_four_point: coincident points");
    auto g = [&](int i, int j) { return two_point(f, xs[i], xs[j], hbar); };
    return g(0, 1) * g(2, 3) + g(0, 2) * g(1, 3) + g(0, 3) * g(1, 2);
}

// ---------------------------------------------------------------------------
// Point-splitting oracle
// ---------------------------------------------------------------------------

// Offsets are expressed in units of the local curvature scale |f''/f'|^-1
// clamped to [1e-4, 1]. cutoff_delta is the UV damping length of the
// regularized mode integral, in the same units. The damped integral is
// evaluated in closed form, so the cutoff only has to keep the frequency
// integral convergent; it must sit far below the smallest offset because a
// finite cutoff injects a (cutoff/offset)^2/offset^2 mismatch between the
// deformed and vacuum terms of the subtraction.
struct SplitParams {
    double cutoff_delta = 1e-11;
    std::vector<double> split_offsets = {1e-2, 5e-3, 2.5e-3};
    int extrapolation_order = 3;
};

namespace detail {

// Re <d phi(x + delta) d phi(x)> with frequency damping exp(-w delta_c); the
// damped mode integral has the closed form (hbar/4 pi) f' f' Re (dc + i Df)^-2.
inline double damped_pair(double df, double s1, double s2, double dc, double hbar) {
    const double num = dc * dc - df * df;
    const double den = dc * dc + df * df;
    return (hbar / (4.0 * std::numbers::pi)) * s1 * s2 * num / (den * den);
}

} // namespace detail

// Vacuum-subtracted coincidence limit of the split two-point function,
// Richardson-extrapolated in the split offset. Converges to flux_density for
// smooth generators without using derivatives beyond f'.
inline double point_split_flux(const GeneratingFunction& f, double x, const SplitParams& sp,
                               double hbar) {
    if (f.is_kink(x)) throw KinkEvaluation("point_split_flux: x is a declared kink");
    if (sp.split_offsets.empty()) throw ConfigError("point_split_flux: no split offsets");
    if (!(sp.cutoff_delta > 0.0)) throw ConfigError("point_split_flux: cutoff must be positive");
    for (std::size_t i = 0; i + 1 < sp.split_offsets.size(); ++i)
        if (!(sp.split_offsets[i] > sp.split_offsets[i + 1]))
            throw ConfigError("point_split_flux: offsets must decrease strictly");
    if (!(sp.split_offsets.back() > sp.cutoff_delta))
        throw ConfigError("point_split_flux: offsets must exceed the cutoff");
    if (sp.extrapolation_order < 1) throw ConfigError("point_split_flux: order must be >= 1");

    const double s0 = f.d1(x);
    if (!(s0 > 0.0)) throw NonMonotone("point_split_flux: f'(x) <= 0");
    const double curv = f.d2(x);
    const double scale =
        (curv == 0.0) ? 1.0 : std::clamp(std::abs(s0 / curv), 1e-4, 1.0);
    const double dc = sp.cutoff_delta * scale;

    const std::size_t k =
        std::min<std::size_t>(sp.split_offsets.size(), sp.extrapolation_order);
    std::vector<double> ds(k), vals(k), mags(k);
    for (std::size_t i = 0; i < k; ++i) {
        // the k smallest offsets, in decreasing order, snapped to exactly
        // representable coordinate differences
        const double xo = x + sp.split_offsets[sp.split_offsets.size() - k + i] * scale;
        const double d = xo - x;
        ds[i] = d;
        const double fd = f.value_diff(x, xo);
        const double pf = detail::damped_pair(fd, f.d1(xo), s0, dc, hbar);
        const double pv = detail::damped_pair(d, 1.0, 1.0, dc, hbar);
        vals[i] = pf - pv;
        mags[i] = std::abs(pf) + std::abs(pv); // cancellation scale of the subtraction
    }

    // Divergence watch: a convergent sequence moves by at most O(its own
    // magnitude) plus the roundoff floor of the vacuum subtraction.
    double running = std::abs(vals[0]);
    for (std::size_t j = 1; j < k; ++j) {
        const double cur = std::abs(vals[j] - vals[j - 1]);
        if (cur > 2.5 * running + 1e-13 * mags[j])
            throw ExtrapolationDivergence("point_split_flux: estimates grow as the offset shrinks");
        running = std::max(running, std::abs(vals[j]));
    }

    // Neville evaluation of the interpolating polynomial at offset 0
    std::vector<double> t = vals;
    for (std::size_t m = 1; m < k; ++m)
        for (std::size_t i = 0; i + m < k; ++i)
            t[i] = (ds[i + m] * t[i] - ds[i] * t[i + 1]) / (ds[i + m] - ds[i]);
    return t[0];
}

inline double point_split_flux(const GeneratingFunction& f, double x, double hbar) {
    return point_split_flux(f, x, SplitParams{}, hbar);
}

} // namespace qei
