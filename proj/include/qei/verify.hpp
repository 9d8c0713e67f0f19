#pragma once

// Named verification suites driving the module invariants. Each suite is
// seeded, deterministic, and reports every check with its tolerance and the
// observed value; the CLI exposes them through `verify` and the acceptance
// runner builds on the same code.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "qei/analysis.hpp"
#include "qei/flux.hpp"
#include "qei/genfun.hpp"
#include "qei/modes.hpp"
#include "qei/rng.hpp"

namespace qei {

struct Check {
    std::string name;
    double tolerance = 0.0;
    double observed = 0.0;
    bool pass = false;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<Check> checks;
    std::vector<std::string> table_header; // optional per-row detail table
    std::vector<std::vector<std::string>> table;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void add(const std::string& name, double tolerance, double observed) {
        checks.push_back({name, tolerance, observed, observed <= tolerance});
    }
    void add_flag(const std::string& name, bool ok) {
        checks.push_back({name, 0.0, ok ? 0.0 : 1.0, ok});
    }
};

inline std::vector<std::string> suite_names() {
    return {"modes", "conformal", "oracle", "shock", "minimizer", "chain"};
}

namespace detail {

inline double pi() { return std::numbers::pi; }

// random admissible shock with comfortable margins for the float tolerances
inline ShockParams random_shock(SplitMix64& rng, double hbar = 1.0) {
    ShockParams s;
    s.hbar = hbar;
    s.E_n = rng.uniform(2e-4, 0.02);
    s.x_i = rng.uniform(-3.0, 3.0);
    const double lmax = std::min(hbar / (12.0 * pi() * s.E_n), 10.0);
    s.x_f = s.x_i + rng.uniform(0.05, 0.95) * lmax;
    return s;
}

inline MobiusParams random_moebius(SplitMix64& rng, const Interval& dom) {
    for (;;) {
        MobiusParams p{rng.uniform(0.8, 2.0), rng.uniform(-0.4, 0.4), rng.uniform(-1.0, 1.0),
                       rng.uniform(0.8, 2.0)};
        if (p.det() <= 0.2) continue;
        if (p.has_pole() && dom.contains(p.pole())) continue;
        return p;
    }
}

// ---------------------------------------------------------------------- modes

inline SuiteReport suite_modes(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "modes";
    rep.seed = seed;
    SplitMix64 rng(seed);

    // mirror boundary condition at x = 0, plane and deformed generators
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i)
        worst = std::max(worst,
                         std::abs(mirror_mode(rng.uniform(0.05, 6.0), rng.uniform(-5.0, 5.0),
                                              0.0, 1.0)));
    rep.add("mirror-boundary-plane", 0.0, worst);

    const auto gen = std::make_shared<const GeneratingFunction>(
        make_shock({0.012, -0.4, 0.8, 1.0}));
    worst = 0.0;
    for (int i = 0; i < 200; ++i)
        worst = std::max(worst,
                         std::abs(mirror_mode(rng.uniform(0.05, 6.0), rng.uniform(-5.0, 5.0),
                                              0.0, 1.0, gen.get())));
    rep.add("mirror-boundary-deformed", 0.0, worst);

    // Gram matrix of five well-separated plane packets
    {
        std::vector<Wavepacket> ps;
        for (int i = 0; i < 5; ++i) ps.push_back(make_wavepacket(8.0 + 20.0 * i, 1.0));
        double dev = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = i; j < 5; ++j) {
                const auto g = kg_inner(ps[i], ps[j]);
                const double expect = (i == j) ? 1.0 : 0.0;
                dev = std::max(dev, std::abs(g - complex{expect, 0.0}));
            }
        rep.add("plane-gram-identity", 1e-6, dev);
    }

    // deformed packets: same statement after the coordinate change
    {
        std::vector<Wavepacket> ps;
        for (int i = 0; i < 3; ++i)
            ps.push_back(make_wavepacket(8.0 + 20.0 * i, 1.0, ModeKind::deformed, gen));
        double dev = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                const auto g = kg_inner(ps[i], ps[j]);
                const double expect = (i == j) ? 1.0 : 0.0;
                dev = std::max(dev, std::abs(g - complex{expect, 0.0}));
            }
        rep.add("deformed-gram-identity", 1e-6, dev);
    }

    // conjugate sector: mixed entries vanish, same-sector norm is -1
    {
        const auto p = make_wavepacket(8.0, 1.0);
        const auto q = make_wavepacket(8.0, 1.0, ModeKind::plane, nullptr, Sector::conjugate);
        const auto q2 = make_wavepacket(28.0, 1.0, ModeKind::plane, nullptr, Sector::conjugate);
        rep.add("mixed-sector-orthogonality", 1e-6,
                std::max(std::abs(kg_inner(q, p)), std::abs(kg_inner(q2, p))));
        rep.add("conjugate-negative-norm", 1e-6, std::abs(kg_inner(q, q) + complex{1.0, 0.0}));

        // the same statement for deformed modes, across distinct frequencies
        // (the equal-frequency case cancels pointwise and tests nothing)
        const auto dp = make_wavepacket(8.0, 1.0, ModeKind::deformed, gen);
        const auto dq =
            make_wavepacket(13.0, 1.0, ModeKind::deformed, gen, Sector::conjugate);
        rep.add("deformed-mixed-sector-orthogonality", 1e-6, std::abs(kg_inner(dq, dp)));
    }

    // one-point functions vanish identically; correspondingly the split pair
    // kernel is even in the separation, leaving no unpaired odd term
    {
        double worst_one = 0.0;
        for (double x : {-1.0, 0.1, 0.6})
            worst_one = std::max(worst_one, std::abs(one_point_expectation(*gen, x)));
        rep.add("one-point-vanishes", 0.0, worst_one);

        double worst_even = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double df = rng.uniform(-0.05, 0.05);
            const double s1 = rng.uniform(0.5, 2.0), s2 = rng.uniform(0.5, 2.0);
            worst_even = std::max(worst_even,
                                  std::abs(damped_pair(df, s1, s2, 1e-11, 1.0) -
                                           damped_pair(-df, s1, s2, 1e-11, 1.0)));
        }
        rep.add("split-kernel-even", 0.0, worst_even);
    }

    return rep;
}

// ------------------------------------------------------------------ conformal

inline SuiteReport suite_conformal(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "conformal";
    rep.seed = seed;
    SplitMix64 rng(seed);
    const auto id = make_identity();
    const Interval dom{-1.0, 1.0};

    double worst2 = 0.0, worst4 = 0.0, worst_flux = 0.0;
    bool all_valid = true;
    for (int t = 0; t < 50; ++t) {
        const auto p = random_moebius(rng, dom);
        const auto f = make_moebius(p, dom);
        if (!validate(f).passed()) all_valid = false;

        const double x1 = rng.uniform(-0.95, -0.2);
        const double x2 = rng.uniform(0.2, 0.95);
        const double ref2 = two_point(id, x1, x2, 1.0);
        worst2 = std::max(worst2, std::abs(two_point(f, x1, x2, 1.0) - ref2) / std::abs(ref2));

        const std::array<double, 4> xs{x1, x2, x1 + 0.11, x2 - 0.13};
        const double ref4 = wick_four_point(id, xs, 1.0);
        worst4 = std::max(worst4,
                          std::abs(wick_four_point(f, xs, 1.0) - ref4) / std::abs(ref4));

        worst_flux = std::max(worst_flux, std::abs(flux_density(f, rng.uniform(-0.9, 0.9), 1.0)));
    }
    rep.add("two-point-vacuum-equivalence", 1e-10, worst2);
    rep.add("four-point-vacuum-equivalence", 1e-10, worst4);
    rep.add("flux-vanishing", 1e-10, worst_flux);
    rep.add_flag("profiles-validate", all_valid);
    return rep;
}

// --------------------------------------------------------------------- oracle

inline SuiteReport suite_oracle(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "oracle";
    rep.seed = seed;
    SplitMix64 rng(seed);
    rep.table_header = {"x", "analytic_flux", "oracle_flux", "rel_err", "offsets_used"};

    const SplitParams sp;
    std::string offsets;
    for (std::size_t i = 0; i < sp.split_offsets.size(); ++i) {
        if (i) offsets += ';';
        offsets += format_g17(sp.split_offsets[i]);
    }

    struct Gen {
        const char* name;
        GeneratingFunction f;
    };
    const std::vector<Gen> gens = {
        {"exp", make_numeric([](double x) { return std::exp(x); }, {-4.0, 4.0})},
        {"sinh-blend",
         make_numeric([](double x) { return x + 0.3 * std::sinh(0.5 * x); }, {-6.0, 6.0})},
        {"tanh-blend",
         make_numeric([](double x) { return x + 0.5 * std::tanh(x); }, {-6.0, 6.0})},
    };

    double worst_rel = 0.0;
    for (const auto& g : gens) {
        for (double x : {-1.1, -0.3, 0.4, 1.3}) {
            const double dens = flux_density(g.f, x, 1.0);
            const double split = point_split_flux(g.f, x, sp, 1.0);
            const double rel = std::abs(split - dens) / std::max(std::abs(dens), 1e-12);
            worst_rel = std::max(worst_rel, rel);
            rep.table.push_back({format_g17(x), format_g17(dens), format_g17(split),
                                 format_g17(rel), offsets});
        }
    }
    rep.add("split-vs-schwarzian", 1e-4, worst_rel);

    // analytic anchor: exponential generator at the origin
    const double analytic = 1.0 / (48.0 * pi());
    const double split0 = point_split_flux(gens[0].f, 0.0, sp, 1.0);
    rep.add("exp-analytic-anchor", 1e-4, std::abs(split0 - analytic) / analytic);

    // vacuum and flux-vanishing generators
    double worst_id = 0.0;
    for (double x : {-2.0, 0.3, 5.0})
        worst_id = std::max(worst_id, std::abs(point_split_flux(make_identity(), x, sp, 1.0)));
    rep.add("vacuum-subtraction", 1e-10, worst_id);

    double worst_mob = 0.0;
    for (int t = 0; t < 10; ++t) {
        const Interval dom{-1.5, 1.5};
        const auto f = make_moebius(random_moebius(rng, dom), dom);
        worst_mob = std::max(worst_mob,
                             std::abs(point_split_flux(f, rng.uniform(-1.0, 1.0), sp, 1.0)));
    }
    rep.add("flux-vanishing-split", 1e-8, worst_mob);
    return rep;
}

// ---------------------------------------------------------------------- shock

inline SuiteReport suite_shock(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "shock";
    rep.seed = seed;
    SplitMix64 rng(seed);

    double worst_w = 0.0, worst_c1 = 0.0, worst_total = 0.0;
    bool uncertainty_ok = true;
    for (int t = 0; t < 100; ++t) {
        const auto s = random_shock(rng);
        const auto f = make_shock(s);

        const auto d = delta_terms(f, s.hbar);
        const double wneg = -s.E_n;
        const double wpos = s.E_n / (1.0 - 12.0 * pi() * s.E_n * s.l() / s.hbar);
        worst_w = std::max(worst_w, std::abs(d[0].weight - wneg) / std::abs(wneg));
        worst_w = std::max(worst_w, std::abs(d[1].weight - wpos) / wpos);

        const auto v = validate(f);
        worst_c1 = std::max({worst_c1, v.worst_c0, v.worst_c1});

        // uncertainty relation and non-negative total flux
        if (!(s.E_n < s.hbar / (12.0 * pi() * s.l()))) uncertainty_ok = false;
        const double tot = total_energy(flux_profile(f, s.hbar));
        worst_total = std::max(worst_total, -tot);
    }
    rep.add("kink-weight-law", 1e-10, worst_w);
    rep.add("c1-matching", 1e-12, worst_c1);
    rep.add_flag("uncertainty-relation", uncertainty_ok);
    rep.add("total-energy-nonnegative", 1e-9, worst_total);

    // marginal shock is rejected
    bool rejected = false;
    try {
        make_shock({1.0 / (12.0 * pi()), 0.0, 1.0, 1.0});
    } catch (const InadmissibleShock&) {
        rejected = true;
    }
    rep.add_flag("marginal-shock-rejected", rejected);

    // mollifier consistency on a fixed representative shock
    {
        const ShockParams s{0.01, 0.0, 1.0, 1.0};
        const auto base = make_shock(s);
        const double wneg = -s.E_n;
        const double wpos = s.E_n / (1.0 - 12.0 * pi() * s.E_n * s.l());
        double prev = 1e9;
        bool monotone = true;
        double final_err = 1.0;
        for (double w : {s.l() / 10.0, s.l() / 30.0, s.l() / 100.0}) {
            const auto prof = flux_profile(mollify(base, w), s.hbar);
            const double neg = total_energy(prof, {s.x_i - 5 * w, s.x_i + 5 * w});
            const double pos = total_energy(prof, {s.x_f - 5 * w, s.x_f + 5 * w});
            const double err = std::max(std::abs(neg - wneg) / std::abs(wneg),
                                        std::abs(pos - wpos) / wpos);
            if (err >= prev) monotone = false;
            prev = err;
            final_err = err;
        }
        rep.add_flag("mollified-error-monotone", monotone);
        rep.add("mollified-windowed-weights", 1e-2, final_err);
    }
    return rep;
}

// ------------------------------------------------------------------ minimizer

inline SuiteReport suite_minimizer(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "minimizer";
    rep.seed = seed;
    SplitMix64 rng(seed);

    // consistency triangle: closed form == compensation bound == delta weight
    double worst_tri = 0.0, worst_c1 = 0.0, worst_total = 0.0;
    for (int t = 0; t < 20; ++t) {
        MinimizerProblem p;
        p.E_n = rng.uniform(2e-4, 0.02);
        p.L = rng.uniform(0.2, 2.0);
        const double ceiling = 1.0 / (12.0 * pi() * p.E_n);
        if (p.L >= 0.8 * ceiling) p.L = 0.8 * ceiling;
        const double closed = min_compensation_energy(p);
        const double bound = compensation_lower_bound(p.E_n, p.L, p.hbar);
        const auto f = make_f_eta(p.E_n, p.L, p.hbar);
        const auto d = delta_terms(f, p.hbar);
        worst_tri = std::max(worst_tri, std::abs(closed - bound) / closed);
        worst_tri = std::max(worst_tri, std::abs(closed - d[1].weight) / closed);
        worst_tri = std::max(worst_tri, std::abs(-p.E_n - d[0].weight) / p.E_n);

        const auto v = validate(f);
        worst_c1 = std::max({worst_c1, v.worst_c0, v.worst_c1});
        worst_total = std::max(worst_total, -total_energy(flux_profile(f, p.hbar)));
    }
    rep.add("consistency-triangle", 1e-12, worst_tri);
    rep.add("profile-c1-matching", 1e-12, worst_c1);
    rep.add("profile-total-nonnegative", 1e-9, worst_total);

    // oracle dominance: never below the closed form, within 0.5% above
    double worst_below = 0.0, worst_above = 0.0;
    for (int t = 0; t < 20; ++t) {
        MinimizerProblem p;
        p.E_n = rng.uniform(1e-3, 0.02);
        p.L = rng.uniform(0.2, 2.0);
        const double ceiling = 1.0 / (12.0 * pi() * p.E_n);
        if (p.L >= 0.8 * ceiling) p.L = 0.8 * ceiling;
        p.family_dim = 6;
        const double closed = min_compensation_energy(p);
        const auto r = numeric_min_oracle(p, rng.next_u64());
        worst_below = std::max(worst_below, closed - r.energy);
        worst_above = std::max(worst_above, (r.energy - closed) / closed);
    }
    rep.add("oracle-never-below", 1e-6, worst_below);
    rep.add("oracle-within-half-percent", 5e-3, worst_above);

    // canonical problem at the default family dimension
    {
        const MinimizerProblem p{0.01, 1.0, 1.0, 8};
        const double closed = min_compensation_energy(p);
        const auto r = numeric_min_oracle(p, seed);
        rep.add("canonical-oracle-gap", 5e-3, std::abs(r.energy - closed) / closed);
        rep.add("canonical-constraint-residual", 1e-6, r.constraint_residual);
    }

    // eta boundary value and the c-number shift quadrature
    {
        const auto f = make_f_eta(0.01, 1.0, 1.0);
        const auto er = eta_from_f(f, 1.0);
        rep.add("eta-vanishes-at-L", 1e-12, std::abs(er.eta_at_L));

        const double rho = 0.01 / (1.0 / (12.0 * pi()) - 0.01);
        const double closed_shift = -(rho * rho) / (12.0 * pi());
        rep.add("casimir-shift-quadrature", 1e-8,
                std::abs(casimir_shift(f, 1.0, 1.0) - closed_shift) / std::abs(closed_shift));
    }
    return rep;
}

// ---------------------------------------------------------------------- chain

inline SuiteReport suite_chain(std::uint64_t seed) {
    SuiteReport rep;
    rep.suite = "chain";
    rep.seed = seed;

    const auto r = gedanken_chain(1.0, 1.0);
    rep.add("main-bound-per-pol", 1e-12,
            std::abs(r.bound_per_pol - 1.0 / (12.0 * pi())) / (1.0 / (12.0 * pi())));
    rep.add("en-independence", 1e-12, r.en_independence_max_rel_dev);
    rep.add("doubled-bound-exact", 0.0,
            std::abs(2.0 * r.bound_per_pol - switching_bound(1.0, 1.0, 2)));

    // monotonicity of the two bounds
    bool comp_up = true;
    double prev = 0.0;
    for (double xi : {0.0, 0.5, 1.0, 2.0}) {
        const double v = compensation_lower_bound(0.01, xi, 1.0);
        if (!(v > prev) && xi > 0.0) comp_up = false;
        prev = v;
    }
    rep.add_flag("compensation-increasing", comp_up);

    bool sw_down = true;
    prev = std::numeric_limits<double>::infinity();
    for (double ts : {0.5, 1.0, 2.0, 8.0}) {
        const double v = switching_bound(ts, 1.0, 2);
        if (!(v < prev)) sw_down = false;
        prev = v;
    }
    rep.add_flag("switching-decreasing", sw_down);

    // hbar covariance of the three bounds
    double worst = 0.0;
    const double k = 2.5;
    worst = std::max(worst, std::abs(qi_max_negative_energy(1.0, k) -
                                     k * qi_max_negative_energy(1.0, 1.0)));
    worst = std::max(worst,
                     std::abs(switching_bound(1.0, k, 2) - k * switching_bound(1.0, 1.0, 2)));
    worst = std::max(
        worst, std::abs(min_compensation_energy({k * 0.01, 1.0, k, 8}) -
                        k * min_compensation_energy({0.01, 1.0, 1.0, 8})) /
                   (k * min_compensation_energy({0.01, 1.0, 1.0, 8})));
    rep.add("hbar-covariance", 1e-13, worst);
    return rep;
}

} // namespace detail

inline SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "modes") return detail::suite_modes(seed);
    if (name == "conformal") return detail::suite_conformal(seed);
    if (name == "oracle") return detail::suite_oracle(seed);
    if (name == "shock") return detail::suite_shock(seed);
    if (name == "minimizer") return detail::suite_minimizer(seed);
    if (name == "chain") return detail::suite_chain(seed);
    throw ConfigError("unknown suite '" + name + "'");
}

inline nlohmann::ordered_json suite_report_json(const SuiteReport& r) {
    nlohmann::ordered_json j;
    j["suite"] = r.suite;
    j["seed"] = r.seed;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name},
                               {"tolerance", c.tolerance},
                               {"observed", c.observed},
                               {"pass", c.pass}});
    j["all_pass"] = r.all_pass();
    return j;
}

inline std::string suite_report_csv(const SuiteReport& r) {
    std::string out;
    if (!r.table.empty()) {
        for (std::size_t i = 0; i < r.table_header.size(); ++i) {
            if (i) out += ',';
            out += r.table_header[i];
        }
        out += '\n';
        for (const auto& row : r.table) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += row[i];
            }
            out += '\n';
        }
        return out;
    }
    out = "name,tolerance,observed,pass\n";
    for (const auto& c : r.checks) {
        out += c.name;
        out += ',';
        out += format_g17(c.tolerance);
        out += ',';
        out += format_g17(c.observed);
        out += ',';
        out += c.pass ? "1" : "0";
        out += '\n';
    }
    return out;
}

} // namespace qei
