#pragma once

// Inequality layer: the quantum-inequality bound on negative shock energy,
// the gedanken-experiment chain that yields the switching-energy bound, and
// the constrained minimum-compensation-energy construction together with an
// independent direct-search oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qei/errors.hpp"
#include "qei/flux.hpp"
#include "qei/genfun.hpp"
#include "qei/optimize.hpp"
#include "qei/rng.hpp"

namespace qei {

// Largest admissible negative shock energy for delay l: hbar / (12 pi l).
inline double qi_max_negative_energy(double l, double hbar) {
    if (!(l > 0.0)) throw DomainError("qi_max_negative_energy: l must be positive");
    if (!(hbar > 0.0)) throw DomainError("qi_max_negative_energy: hbar must be positive");
    return hbar / (12.0 * std::numbers::pi * l);
}

// Minimal positive energy that must follow a negative shock of energy E_n
// after a mirror delay |x_i|: E_n / (1 - 12 pi E_n |x_i| / hbar).
inline double compensation_lower_bound(double E_n, double abs_xi, double hbar) {
    if (!(hbar > 0.0)) throw DomainError("compensation_lower_bound: hbar must be positive");
    if (E_n < 0.0 || abs_xi < 0.0)
        throw DomainError("compensation_lower_bound: E_n and |x_i| must be nonnegative");
    const double q = 12.0 * std::numbers::pi * E_n / hbar;
    if (!(q * abs_xi < 1.0))
        throw InadmissibleShock("compensation_lower_bound: E_n |x_i| >= hbar / (12 pi)");
    return E_n / (1.0 - q * abs_xi);
}

// Actuating-energy lower bound for switching over time t_s:
// polarizations * hbar / (12 pi t_s).
inline double switching_bound(double t_s, double hbar, int polarizations) {
    if (!(t_s > 0.0)) throw DomainError("switching_bound: t_s must be positive");
    if (!(hbar > 0.0)) throw DomainError("switching_bound: hbar must be positive");
    if (polarizations < 1) throw DomainError("switching_bound: polarizations must be >= 1");
    return polarizations * hbar / (12.0 * std::numbers::pi * t_s);
}

// ---------------------------------------------------------------------------
// Gedanken chain
// ---------------------------------------------------------------------------

struct ChainStep {
    std::string name;
    double value = 0.0;
    std::string paper_eq; // equation tag carried in exported reports
};

struct ChainReport {
    double t_s = 0.0;
    double hbar = 1.0;
    double bound_per_pol = 0.0;
    double witness_x_f = 0.0;   // smallest admissible positive-shock delay
    double witness_E_n = 0.0;   // representative grid point
    double witness_abs_xi = 0.0;
    std::vector<double> en_grid;
    std::vector<double> substituted; // compensation bound at the optimal |x_i|
    double en_independence_max_rel_dev = 0.0;
    std::vector<ChainStep> steps;
};

// Reproduces the maximization chain step by step: for fixed x_f and E_n the
// optimal mirror delay is |x_i| = hbar/(12 pi E_n) - x_f; substitution makes
// the compensation bound hbar/(12 pi x_f), independent of E_n (verified on a
// grid); the minimal x_f is t_s.
inline ChainReport gedanken_chain(double t_s, double hbar) {
    if (!(t_s > 0.0)) throw DomainError("gedanken_chain: t_s must be positive");
    if (!(hbar > 0.0)) throw DomainError("gedanken_chain: hbar must be positive");

    ChainReport r;
    r.t_s = t_s;
    r.hbar = hbar;
    r.witness_x_f = t_s;
    r.bound_per_pol = hbar / (12.0 * std::numbers::pi * t_s);

    // E_n grid spanning two decades below the admissibility ceiling at x_f
    const double ceiling = hbar / (12.0 * std::numbers::pi * t_s);
    const int n = 9;
    for (int j = 0; j < n; ++j) {
        const double mu = std::pow(10.0, -2.4 + 2.0 * j / (n - 1));
        const double en = ceiling * mu;
        const double q = 12.0 * std::numbers::pi * en / hbar;
        const double abs_xi = 1.0 / q - t_s;
        const double sub = en / (1.0 - q * abs_xi);
        r.en_grid.push_back(en);
        r.substituted.push_back(sub);
        r.en_independence_max_rel_dev = std::max(
            r.en_independence_max_rel_dev, std::abs(sub - r.bound_per_pol) / r.bound_per_pol);
    }
    const std::size_t mid = r.en_grid.size() / 2;
    r.witness_E_n = r.en_grid[mid];
    r.witness_abs_xi = hbar / (12.0 * std::numbers::pi * r.witness_E_n) - t_s;

    r.steps.push_back({"maximize-abs-xi", r.witness_abs_xi, "nieq"});
    r.steps.push_back({"substitute-optimal-xi", hbar / (12.0 * std::numbers::pi * t_s), "ieq2"});
    r.steps.push_back({"minimize-abs-xf", t_s, "ieq2"});
    r.steps.push_back({"per-polarization-bound", r.bound_per_pol, "wieq"});
    return r;
}

// ---------------------------------------------------------------------------
// Gedanken scenario timeline
// ---------------------------------------------------------------------------

struct GedankenScenario {
    double t_s = 1.0;
    double x_i = 0.0;   // <= 0: negative shock reflects before switch-on
    double x_f = 1.0;   // >= t_s: positive shock arrives after switch-off
    double E_n = 0.0;
    int polarizations = 2;
    double hbar = 1.0;
};

inline GedankenScenario make_gedanken_scenario(double t_s, double x_i, double x_f, double E_n,
                                               int polarizations = 2, double hbar = 1.0) {
    if (!(t_s > 0.0) || polarizations < 1 || !(hbar > 0.0))
        throw ScenarioOrderViolation("scenario: t_s > 0, polarizations >= 1, hbar > 0 required");
    if (!(x_i <= 0.0 && 0.0 <= t_s && t_s <= x_f))
        throw ScenarioOrderViolation("scenario: requires x_i <= 0 <= t_s <= x_f");
    if (!(E_n >= 0.0)) throw ScenarioOrderViolation("scenario: E_n must be nonnegative");
    if (!(E_n * (x_f - x_i) < hbar / (12.0 * std::numbers::pi)))
        throw InadmissibleShock("scenario: E_n (x_f - x_i) >= hbar / (12 pi)");
    return {t_s, x_i, x_f, E_n, polarizations, hbar};
}

struct TimelineEvent {
    double time = 0.0;
    std::string label;
    std::string detail;
};

struct TimelineReport {
    std::vector<TimelineEvent> events;   // in time order
    DeltaTerm reflected_negative;        // right-mover delta at x^- = x_i
    Interval switching_window;           // [0, t_s] in x^-
    double ts_integral_lower_bound = 0.0; // bound on the windowed flux integral
    bool quiet_interval_empty = false;
    std::string final_profile; // symbolic form of the late-time right-mover flux
};

// Light-cone bookkeeping of the switching thought experiment. The flux shape
// T_s inside the switching window is unknown by construction; only the lower
// bound on its integral is carried.
inline TimelineReport scenario_timeline(const GedankenScenario& s) {
    // re-validate (aggregates can be built by hand)
    make_gedanken_scenario(s.t_s, s.x_i, s.x_f, s.E_n, s.polarizations, s.hbar);

    TimelineReport r;
    r.events.push_back({s.x_i, "negative-shock-reflection",
                        "left-mover at x+ = x_i hits the mirror at x = 0 and leaves as a "
                        "right-mover at x- = x_i"});
    r.events.push_back({0.0, "switch-on", "mirror body starts to become transparent"});
    r.events.push_back({s.t_s, "switch-off", "mirror fully transparent"});
    r.events.push_back({s.x_f, "positive-shock-transmission",
                        "left-mover at x+ = x_f passes the removed mirror freely"});

    r.reflected_negative = {s.x_i, -s.E_n};
    r.switching_window = {0.0, s.t_s};
    r.quiet_interval_empty = (s.x_i == 0.0);
    r.ts_integral_lower_bound = compensation_lower_bound(s.E_n, -s.x_i, s.hbar);
    r.final_profile =
        "-E_n delta(x- - x_i) + Theta(x-) Theta(t_s - x-) T_s(x-), Int T_s >= bound";
    return r;
}

// ---------------------------------------------------------------------------
// Constrained minimum compensation energy
// ---------------------------------------------------------------------------

struct MinimizerProblem {
    double E_n = 0.0;
    double L = 1.0;
    double hbar = 1.0;
    int family_dim = 8; // node count of the oracle parametrization
};

inline void check_problem(const MinimizerProblem& p) {
    if (!(p.hbar > 0.0)) throw DomainError("minimizer: hbar must be positive");
    if (p.E_n < 0.0) throw DomainError("minimizer: E_n must be nonnegative");
    if (p.L < 0.0) throw DomainError("minimizer: L must be nonnegative");
    if (!(p.E_n * p.L < p.hbar / (12.0 * std::numbers::pi)))
        throw InadmissibleShock("minimizer: E_n L >= hbar / (12 pi)");
}

// Closed-form minimum: E_n / (1 - 12 pi E_n L / hbar). Equals the positive
// delta weight of the minimum-compensation profile.
inline double min_compensation_energy(const MinimizerProblem& p) {
    check_problem(p);
    return compensation_lower_bound(p.E_n, p.L, p.hbar);
}

// ---------------------------------------------------------------------------
// eta multiplier and the c-number shift
// ---------------------------------------------------------------------------

struct EtaReport {
    std::vector<double> xs;
    std::vector<double> eta; // 1/f'(x) - 1
    double eta_at_L = 0.0;
};

// Samples eta(x) = 1/f'(x) - 1 on a grid over (lo, L]. Requires f to act as
// the identity right of L.
inline EtaReport eta_from_f(const GeneratingFunction& f, double L, int n_points = 129) {
    const Interval dom = f.domain();
    if (!dom.contains(L)) throw DomainError("eta_from_f: L outside the domain");
    // spot-check the plane-wave region right of L
    for (double step : {0.25, 1.0, 4.0}) {
        const double x = L + step * (1.0 + std::abs(L));
        if (x > dom.hi) break;
        if (std::abs(f.value(x) - x) > 1e-9 * std::max(1.0, std::abs(x)))
            throw DomainError("eta_from_f: f is not the identity right of L");
    }

    auto hull = f.curved_hull();
    double lo = hull ? hull->lo : L;
    lo -= 0.5 * std::max(1.0, std::abs(L));
    if (std::isfinite(dom.lo)) lo = std::max(lo, dom.lo);

    EtaReport r;
    for (int i = 0; i < n_points; ++i) {
        const double x = lo + (L - lo) * i / (n_points - 1);
        r.xs.push_back(x);
        r.eta.push_back(1.0 / f.d1_side(x, Side::left) - 1.0);
    }
    r.eta_at_L = 1.0 / f.d1_side(L, Side::left) - 1.0;
    return r;
}

// c-number term of the rewritten constrained Hamiltonian:
// -(hbar / 12 pi) Int (d/dx sqrt(1 + eta Theta(L - x)))^2 dx
//                = -(hbar / 48 pi) Int_(-inf)^L f''^2 / f'^3 dx.
inline double casimir_shift(const GeneratingFunction& f, double L, double hbar) {
    auto hull = f.curved_hull();
    if (!hull) return 0.0;
    const Interval dom = f.domain();
    double lo = std::max(hull->lo, dom.lo);
    const double hi = std::min({L, dom.hi});
    if (!(lo < hi)) return 0.0;
    if (!std::isfinite(lo))
        throw QuadratureFailure("casimir_shift: unbounded curvature region");

    QuadOptions opt;
    opt.rel_tol = 1e-9;
    opt.abs_floor = 1e-14;
    for (double k : f.kinks()) opt.breakpoints.push_back(k);
    for (const auto& seg : f.segments()) {
        if (std::isfinite(seg.interval.lo)) opt.breakpoints.push_back(seg.interval.lo);
        if (std::isfinite(seg.interval.hi)) opt.breakpoints.push_back(seg.interval.hi);
    }
    const double integral = integrate(
        [&](double x) {
            const double d1 = f.d1(x);
            const double d2 = f.d2(x);
            return d2 * d2 / (d1 * d1 * d1);
        },
        lo, hi, opt);
    return -(hbar / (48.0 * std::numbers::pi)) * integral;
}

// ---------------------------------------------------------------------------
// Direct-search oracle for the constrained minimum
// ---------------------------------------------------------------------------

struct OracleResult {
    double energy = 0.0;  // compensation energy of the best candidate
    double total = 0.0;   // total flux energy (constraint delta included)
    std::vector<double> parameters; // log node values of the slope profile
    double constraint_residual = 0.0;
    int improvement_steps = 0;
    int starts_used = 0;
};

struct OptimizerStall : Error {
    OracleResult best;
    explicit OptimizerStall(const std::string& msg, OracleResult b)
        : Error(msg), best(std::move(b)) {}
};

struct OracleOptions {
    int starts = 4;
    std::optional<std::vector<double>> init; // free node parameters
    double residual_tol = 1e-6;
};

namespace detail {

// Candidate family: f'(x) = 1/G(x)^2 on [0, L] where G is a positive
// piecewise-linear profile through G_j = exp(phi_j) at uniform nodes,
// pinned to G(L) = 1; identity for x > L and an affine tail for x < 0.
// Monotonicity holds unconditionally and every piece is Moebius-class, so
// the smooth flux vanishes piecewise and candidates can satisfy the
// zero-flux constraint exactly.
inline GeneratingFunction oracle_candidate(const MinimizerProblem& p,
                                           const std::vector<double>& phi_free) {
    const int m = p.family_dim;
    std::vector<double> g(m);
    for (int j = 0; j + 1 < m; ++j) g[j] = std::exp(phi_free[j]);
    g[m - 1] = 1.0;

    const double h = p.L / (m - 1);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> nodes(m);
    for (int j = 0; j < m; ++j) nodes[j] = j * h;
    nodes[m - 1] = p.L; // exact right endpoint

    std::vector<PiecewiseSegment> segs;
    std::vector<double> kinks;
    segs.push_back({{p.L, inf}, AffineSeg{0.0, 1.0}});
    double f_right = p.L; // f at the right end of the current piece

    for (int j = m - 2; j >= 0; --j) {
        const double t0 = nodes[j], t1 = nodes[j + 1];
        const double beta = (g[j + 1] - g[j]) / (t1 - t0);
        const double alpha = g[j] - beta * t0;
        PiecewiseSegment seg;
        seg.interval = {t0, t1};
        if (beta == 0.0) {
            const double slope = 1.0 / (g[j] * g[j]);
            seg.form = AffineSeg{f_right - slope * t1, slope};
            f_right -= slope * (t1 - t0);
        } else {
            // antiderivative of (alpha + beta x)^-2 anchored at t1
            ReciprocalShiftSeg rs;
            rs.a = -beta * alpha;
            rs.b = -beta * beta;
            rs.k = 0.0;
            const double at_t1 = detail::recip_eval(rs, t1, 0);
            rs.k = f_right - at_t1;
            seg.form = rs;
            f_right = detail::recip_eval(rs, t0, 0);
        }
        segs.push_back(seg);
        kinks.push_back(t1);
    }
    kinks.push_back(0.0);
    const double slope_left = 1.0 / (g[0] * g[0]);
    segs.push_back({{-inf, 0.0}, AffineSeg{f_right - slope_left * 0.0, slope_left}});

    std::reverse(segs.begin(), segs.end());
    std::sort(kinks.begin(), kinks.end());
    return GeneratingFunction(std::move(segs), std::move(kinks), p.hbar);
}

struct OracleObjective {
    const MinimizerProblem* p;
    double penalty_weight;

    // returns (total energy, constraint residual) and the penalized value
    double operator()(const std::vector<double>& phi) const {
        for (double v : phi)
            if (!(v > -30.0 && v < 30.0)) return 1e100; // keep exp() sane
        GeneratingFunction f = oracle_candidate(*p, phi);
        const auto deltas = delta_terms(f, p->hbar);
        const double eref = std::max(p->E_n, 1e-12);
        double pen = 0.0;
        double total = 0.0;
        for (const auto& d : deltas) {
            total += d.weight;
            if (d.location == 0.0) {
                const double v = (d.weight + p->E_n) / eref;
                pen += v * v;
            } else if (d.location < p->L) {
                const double v = d.weight / eref;
                pen += v * v;
            }
        }
        return total + penalty_weight * pen;
    }
};

inline double oracle_residual(const MinimizerProblem& p, const std::vector<double>& phi) {
    GeneratingFunction f = oracle_candidate(p, phi);
    double res = 0.0;
    for (const auto& d : delta_terms(f, p.hbar)) {
        if (d.location == 0.0)
            res = std::max(res, std::abs(d.weight + p.E_n));
        else if (d.location < p.L)
            res = std::max(res, std::abs(d.weight));
    }
    return res;
}

} // namespace detail

// Node parameters reproducing the closed-form minimizer within the oracle
// family (the slope profile of the minimum-compensation generating function
// is linear, hence exactly representable).
inline std::vector<double> oracle_reference_params(const MinimizerProblem& p) {
    check_problem(p);
    const int m = p.family_dim;
    const double rho = p.E_n / (p.hbar / (12.0 * std::numbers::pi) - p.E_n * p.L);
    std::vector<double> phi(m - 1);
    for (int j = 0; j + 1 < m; ++j) {
        const double t = j * p.L / (m - 1);
        phi[j] = std::log(1.0 + rho * (p.L - t));
    }
    return phi;
}

// Penalty-method direct search over the monotone candidate family, from
// multiple seeded starts merged by value then lexicographic parameter order.
// The returned energy is the compensation energy of the best candidate,
// measured through the flux machinery.
inline OracleResult numeric_min_oracle(const MinimizerProblem& p, std::uint64_t seed,
                                       const OracleOptions& opt = {}) {
    check_problem(p);
    if (p.family_dim < 3) throw ConfigError("numeric_min_oracle: family_dim must be >= 3");
    if (!(p.L > 0.0)) throw DomainError("numeric_min_oracle: L must be positive");

    const int nfree = p.family_dim - 1;
    if (p.E_n == 0.0) {
        OracleResult r;
        r.parameters.assign(nfree, 0.0);
        return r;
    }

    SplitMix64 rng(seed);
    std::vector<std::vector<double>> starts;
    if (opt.init) {
        if (static_cast<int>(opt.init->size()) != nfree)
            throw ConfigError("numeric_min_oracle: init size must be family_dim - 1");
        starts.push_back(*opt.init);
    } else {
        starts.emplace_back(nfree, 0.0); // identity profile
        for (int s = 1; s < opt.starts; ++s) {
            std::vector<double> x(nfree);
            for (double& v : x) v = rng.uniform(-0.4, 0.4);
            starts.push_back(std::move(x));
        }
    }

    struct Best {
        double value = std::numeric_limits<double>::infinity();
        std::vector<double> x;
        int improvements = 0;
    } best;

    const std::vector<double> stages = {1e4, 1e5, 1e6, 1e7};
    for (const auto& start : starts) {
        std::vector<double> x = start;
        int improvements = 0;
        for (double w : stages) {
            detail::OracleObjective obj{&p, w};
            SimplexOptions sopt;
            sopt.max_evals = 1500 * nfree;
            sopt.improve_abs_tol = 1e-3 * std::max(p.E_n, 1e-9);
            sopt.init_step = (improvements == 0 && x == start) ? 0.2 : 0.02;
            auto r = minimize_simplex(obj, x, sopt);
            x = r.x;
            improvements += r.improvements;
        }
        detail::OracleObjective final_obj{&p, stages.back()};
        const double v = final_obj(x);
        const bool better =
            v < best.value ||
            (v == best.value && std::lexicographical_compare(x.begin(), x.end(),
                                                             best.x.begin(), best.x.end()));
        if (better) best = {v, x, improvements};
    }

    GeneratingFunction f = detail::oracle_candidate(p, best.x);
    OracleResult res;
    res.total = total_energy(flux_profile(f, p.hbar));
    res.energy = res.total + p.E_n;
    res.parameters = best.x;
    res.constraint_residual = detail::oracle_residual(p, best.x);
    res.improvement_steps = best.improvements;
    res.starts_used = static_cast<int>(starts.size());

    if (res.constraint_residual > opt.residual_tol)
        throw OptimizerStall("numeric_min_oracle: constraint residual above tolerance", res);
    return res;
}

} // namespace qei
