#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qei/analysis.hpp"
#include "qei/flux.hpp"
#include "qei/genfun.hpp"
#include "qei/rng.hpp"

using namespace qei;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("quantum-inequality ceiling") {
    CHECK(qi_max_negative_energy(1.0, 1.0) == Approx(0.026525823848649224).epsilon(1e-14));
    CHECK(qi_max_negative_energy(2.0, 1.0) ==
          Approx(0.5 * qi_max_negative_energy(1.0, 1.0)).epsilon(1e-14));
    CHECK(qi_max_negative_energy(1.0, 2.0) ==
          Approx(2.0 * qi_max_negative_energy(1.0, 1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(qi_max_negative_energy(0.0, 1.0), DomainError);
}

TEST_CASE("compensation lower bound") {
    CHECK(compensation_lower_bound(0.01, 0.0, 1.0) == 0.01);
    CHECK(compensation_lower_bound(0.01, 1.0, 1.0) ==
          Approx(0.016051135538890168).epsilon(1e-13));

    // strictly increasing in the mirror delay, diverging at the ceiling
    double prev = 0.0;
    for (double xi : {0.0, 0.5, 1.0, 2.0, 2.6}) {
        const double v = compensation_lower_bound(0.01, xi, 1.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(compensation_lower_bound(0.01, 2.66, 1.0), InadmissibleShock);
}

TEST_CASE("switching bound") {
    CHECK(switching_bound(1.0, 1.0, 2) == Approx(0.053051647697298445).epsilon(1e-14));
    CHECK(switching_bound(1.0, 1.0, 1) == Approx(0.026525823848649224).epsilon(1e-14));
    CHECK(switching_bound(10.0, 1.0, 2) ==
          Approx(0.1 * switching_bound(1.0, 1.0, 2)).epsilon(1e-14));
    // strictly decreasing in the switching time
    CHECK(switching_bound(2.0, 1.0, 2) < switching_bound(1.0, 1.0, 2));
    CHECK_THROWS_AS(switching_bound(0.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(switching_bound(1.0, 1.0, 0), DomainError);
}

TEST_CASE("gedanken chain report") {
    const auto r = gedanken_chain(1.0, 1.0);
    CHECK(r.bound_per_pol == Approx(1.0 / (12.0 * pi)).epsilon(1e-15));
    CHECK(r.witness_x_f == 1.0);
    CHECK(r.en_independence_max_rel_dev < 1e-12);
    REQUIRE(r.steps.size() == 4);
    CHECK(r.steps[0].name == "maximize-abs-xi");
    CHECK(r.steps[3].value == r.bound_per_pol);

    // substituted values are constant across the E_n grid
    for (double s : r.substituted) CHECK(s == Approx(r.bound_per_pol).epsilon(1e-12));

    // scaling in t_s
    const auto half = gedanken_chain(0.5, 1.0);
    CHECK(half.bound_per_pol == Approx(2.0 * r.bound_per_pol).epsilon(1e-14));

    // chain soundness: twice the per-polarization bound is the two-field bound
    CHECK(2.0 * r.bound_per_pol == switching_bound(1.0, 1.0, 2));
}

TEST_CASE("gedanken scenario validation") {
    CHECK_NOTHROW(make_gedanken_scenario(1.0, -1.0, 1.5, 1e-3));
    CHECK_THROWS_AS(make_gedanken_scenario(1.0, 0.5, 1.5, 1e-3), ScenarioOrderViolation);
    CHECK_THROWS_AS(make_gedanken_scenario(1.0, -1.0, 0.5, 1e-3), ScenarioOrderViolation);
    CHECK_THROWS_AS(make_gedanken_scenario(-1.0, -1.0, 1.5, 1e-3), ScenarioOrderViolation);
    // admissibility: E_n (x_f - x_i) must stay below hbar / (12 pi)
    CHECK_THROWS_AS(make_gedanken_scenario(1.0, -1.0, 1.5, 0.02), InadmissibleShock);
}

TEST_CASE("scenario timeline events") {
    const auto s = make_gedanken_scenario(1.0, -1.0, 1.5, 1e-3);
    const auto tl = scenario_timeline(s);
    REQUIRE(tl.events.size() == 4);
    CHECK(tl.events[0].label == "negative-shock-reflection");
    CHECK(tl.events[0].time == -1.0);
    CHECK(tl.events[1].time == 0.0);
    CHECK(tl.events[2].time == 1.0);
    CHECK(tl.events[3].time == 1.5);
    for (std::size_t i = 1; i < tl.events.size(); ++i)
        CHECK(tl.events[i].time >= tl.events[i - 1].time);

    CHECK(tl.reflected_negative.location == -1.0);
    CHECK(tl.reflected_negative.weight == -1e-3);
    CHECK(!tl.quiet_interval_empty);
    CHECK(tl.ts_integral_lower_bound ==
          Approx(compensation_lower_bound(1e-3, 1.0, 1.0)).epsilon(1e-14));

    // degenerate delay: reflection coincides with switch-on, bound is E_n
    const auto s0 = make_gedanken_scenario(1.0, 0.0, 1.5, 1e-3);
    const auto tl0 = scenario_timeline(s0);
    CHECK(tl0.quiet_interval_empty);
    CHECK(tl0.ts_integral_lower_bound == 1e-3);
}

TEST_CASE("closed-form minimum compensation energy") {
    const MinimizerProblem p{0.01, 1.0, 1.0, 8};
    const double closed = min_compensation_energy(p);
    CHECK(closed == Approx(0.016051135538890168).epsilon(1e-13));
    CHECK(closed == compensation_lower_bound(0.01, 1.0, 1.0));

    // consistency triangle: equals the positive delta weight of the profile
    const auto deltas = delta_terms(make_f_eta(p.E_n, p.L, p.hbar), p.hbar);
    CHECK(closed == Approx(deltas[1].weight).epsilon(1e-12));

    CHECK(min_compensation_energy({0.01, 0.0, 1.0, 8}) == 0.01);
    CHECK_THROWS_AS(min_compensation_energy({0.03, 1.0, 1.0, 8}), InadmissibleShock);

    // hbar covariance at fixed dimensionless E_n L / hbar
    const double k = 3.0;
    CHECK(min_compensation_energy({k * 0.01, 1.0, k, 8}) ==
          Approx(k * closed).epsilon(1e-13));
}

TEST_CASE("eta multiplier report") {
    const auto id = make_identity();
    const auto r0 = eta_from_f(id, 1.0);
    for (double e : r0.eta) CHECK(e == 0.0);
    CHECK(r0.eta_at_L == 0.0);

    const double rho = 0.60511355388901678;
    const auto f = make_f_eta(0.01, 1.0, 1.0);
    const auto r = eta_from_f(f, 1.0);
    CHECK(r.eta_at_L == Approx(0.0).epsilon(1e-12));
    // left of the constraint point eta approaches (rho L + 1)^2 - 1
    CHECK(1.0 / f.d1(-0.25) - 1.0 == Approx((rho + 1.0) * (rho + 1.0) - 1.0).epsilon(1e-12));
    CHECK(1.0 / f.d1(-0.25) - 1.0 == Approx(1.5763895208782296).epsilon(1e-12));

    // f must act as the identity right of L
    const auto shock = make_shock({0.01, 0.0, 1.0, 1.0});
    CHECK_THROWS_AS(eta_from_f(shock, 1.0), DomainError); // right tail has slope != 1
}

TEST_CASE("casimir shift") {
    CHECK(casimir_shift(make_identity(), 1.0, 1.0) == 0.0);

    // constant integrand 4 rho^2 on (0, L): closed value -(hbar rho^2 L)/(12 pi)
    const double rho = 0.60511355388901678;
    const auto f = make_f_eta(0.01, 1.0, 1.0);
    const double closed = -(rho * rho * 1.0) / (12.0 * pi);
    CHECK(casimir_shift(f, 1.0, 1.0) == Approx(closed).epsilon(1e-9));
    CHECK(casimir_shift(f, 1.0, 1.0) == Approx(-0.0097127596698921279).epsilon(1e-9));
    CHECK(casimir_shift(f, 1.0, 2.0) == Approx(2.0 * closed).epsilon(1e-9));

    // mollified profile converges to the distributional value as width -> 0
    double prev_err = 1e9;
    for (double w : {0.1, 0.04, 0.016}) {
        const auto err = std::abs(casimir_shift(mollify(f, w), 1.0 + w, 1.0) - closed);
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("numeric minimization oracle") {
    const MinimizerProblem p{0.01, 1.0, 1.0, 8};
    const double closed = min_compensation_energy(p);

    const auto r = numeric_min_oracle(p, 1);
    CHECK(r.energy >= closed - 1e-6);
    CHECK(r.energy <= closed * 1.005);
    CHECK(r.constraint_residual <= 1e-6);

    // deterministic for a fixed seed
    const auto r2 = numeric_min_oracle(p, 1);
    CHECK(r2.energy == r.energy);
    CHECK(r2.parameters == r.parameters);

    // zero-energy problem short-circuits to the identity profile
    const auto z = numeric_min_oracle({0.0, 1.0, 1.0, 8}, 5);
    CHECK(z.energy == 0.0);
}

TEST_CASE("oracle initialized at the reference parameters stays put") {
    const MinimizerProblem p{0.01, 1.0, 1.0, 8};
    OracleOptions opt;
    opt.init = oracle_reference_params(p);
    const auto r = numeric_min_oracle(p, 0, opt);
    CHECK(r.improvement_steps == 0);
    CHECK(r.energy == Approx(min_compensation_energy(p)).epsilon(1e-8));
}

TEST_CASE("oracle dominance on random admissible problems") {
    SplitMix64 rng(2024);
    for (int t = 0; t < 4; ++t) {
        MinimizerProblem p;
        p.E_n = rng.uniform(1e-3, 0.02);
        p.L = rng.uniform(0.2, 2.0);
        const double ceiling = 1.0 / (12.0 * pi * p.E_n);
        if (p.L >= 0.8 * ceiling) p.L = 0.8 * ceiling;
        p.family_dim = 6;
        const double closed = min_compensation_energy(p);
        const auto r = numeric_min_oracle(p, 11 + t);
        CHECK(r.energy >= closed - 1e-6);
        CHECK(r.energy <= closed * 1.005);
    }
}

TEST_CASE("oracle stalls on an unreachable residual tolerance") {
    const MinimizerProblem p{0.01, 1.0, 1.0, 6};
    OracleOptions opt;
    opt.starts = 1;
    opt.residual_tol = 1e-15;
    CHECK_THROWS_AS(numeric_min_oracle(p, 3, opt), OptimizerStall);
    try {
        numeric_min_oracle(p, 3, opt);
    } catch (const OptimizerStall& e) {
        CHECK(std::isfinite(e.best.energy));
        CHECK(e.best.constraint_residual > 1e-15);
    }
}

TEST_CASE("oracle candidate profiles validate") {
    const MinimizerProblem p{0.01, 1.0, 1.0, 8};
    const auto phi = oracle_reference_params(p);
    const auto f = detail::oracle_candidate(p, phi);
    CHECK(validate(f).passed());
    // reference profile reproduces the minimum-compensation generating function
    const auto ref = make_f_eta(p.E_n, p.L, p.hbar);
    for (double x : {-0.5, 0.3, 0.8, 1.5})
        CHECK(f.value(x) == Approx(ref.value(x)).epsilon(1e-10));
}
