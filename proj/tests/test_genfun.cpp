#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qei/genfun.hpp"
#include "qei/genfun_json.hpp"
#include "qei/rng.hpp"

using namespace qei;

namespace {

// Schwarzian from exact segment derivatives, local to these tests.
double schw(const GeneratingFunction& f, double x) {
    const double d1 = f.d1(x);
    const double r = f.d2(x) / d1;
    return f.d3(x) / d1 - 1.5 * r * r;
}

} // namespace

TEST_CASE("identity map") {
    const auto f = make_identity();
    CHECK(f.value(2.5) == 2.5);
    CHECK(f.d1(2.5) == 1.0);
    CHECK(f.d2(2.5) == 0.0);
    CHECK(f.d3(-7.0) == 0.0);
    CHECK(f.kinks().empty());
    CHECK(validate(f).passed());
    CHECK(!f.curved_hull().has_value());
    CHECK(!f.density_support().has_value());
}

TEST_CASE("moebius: affine special case is the identity") {
    const auto f = make_moebius({1.0, 0.0, 0.0, 1.0});
    CHECK(f.value(3.25) == 3.25);
    CHECK(f.d1(-11.0) == 1.0);
    CHECK(validate(f).passed());
}

TEST_CASE("moebius on a restricted pole-free domain") {
    const double inf = std::numeric_limits<double>::infinity();
    const auto f = make_moebius({1.0, 1.0, 0.0, 2.0}, {0.0, inf});
    CHECK(f.value(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.d1(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(schw(f, 0.7)) < 1e-14);
    CHECK(validate(f).passed());
}

TEST_CASE("moebius rejections") {
    CHECK_THROWS_AS(make_moebius({1.0, -1.0, 0.0, 1.0}, {0.0, 2.0}), PoleInDomain);
    CHECK_THROWS_AS(make_moebius({1.0, 0.0, 0.0, -1.0}), NonMonotone);
    CHECK_THROWS_AS(make_moebius({1.0, 2.0, 0.5, 1.0}), NonMonotone); // det = 0
}

TEST_CASE("shock profile: construction and branch matching") {
    const ShockParams s{0.01, 0.0, 1.0, 1.0};
    const double eps = s.epsilon();
    CHECK(eps == doctest::Approx(0.14212230337568676).epsilon(1e-14));

    const auto f = make_shock(s);
    REQUIRE(f.kinks().size() == 2);
    CHECK(f.kinks()[0] == 0.0);
    CHECK(f.kinks()[1] == 1.0);

    // identity branch left of x_i
    CHECK(f.value(-2.0) == -2.0);
    CHECK(f.d1(-0.5) == 1.0);

    // slope of the affine tail: eps / (sqrt(eps) - eps l)^2
    const double expect_slope = eps / std::pow(std::sqrt(eps) - eps * 1.0, 2);
    CHECK(f.d1(1.5) == doctest::Approx(expect_slope).epsilon(1e-13));
    CHECK(f.d1(1.5) == doctest::Approx(2.5763895208782296).epsilon(1e-12));

    // C^1 joins and monotonicity
    const auto rep = validate(f);
    CHECK(rep.passed());
    CHECK(rep.worst_c0 < 1e-12);
    CHECK(rep.worst_c1 < 1e-12);

    // middle branch is Moebius-class: identically zero Schwarzian
    for (double x : {0.1, 0.37, 0.5, 0.73, 0.99})
        CHECK(std::abs(schw(f, x)) < 1e-10);

    CHECK(f.curved_hull().has_value());
    CHECK(f.curved_hull()->lo == 0.0);
    CHECK(f.curved_hull()->hi == 1.0);
    CHECK(!f.density_support().has_value()); // Moebius-class branches only
}

TEST_CASE("shock admissibility") {
    // zero-energy and zero-length shocks degenerate to the identity
    CHECK(make_shock({0.0, -1.0, 2.0, 1.0}).kinks().empty());
    CHECK(make_shock({0.01, 1.0, 1.0, 1.0}).kinks().empty());

    // marginal case E_n l = hbar / (12 pi) is rejected
    const double en = 1.0 / (12.0 * std::numbers::pi);
    CHECK_THROWS_AS(make_shock({en, 0.0, 1.0, 1.0}), InadmissibleShock);
    CHECK_THROWS_AS(make_shock({2.0 * en, 0.0, 1.0, 1.0}), InadmissibleShock);
    CHECK_THROWS_AS(make_shock({0.01, 1.0, 0.0, 1.0}), DomainError);
}

TEST_CASE("minimum-compensation profile f_eta") {
    const double budget = 1.0 / (12.0 * std::numbers::pi);
    const double rho = 0.01 / (budget - 0.01);
    CHECK(rho == doctest::Approx(0.60511355388901678).epsilon(1e-14));

    const auto f = make_f_eta(0.01, 1.0, 1.0);
    REQUIRE(f.kinks().size() == 2);
    CHECK(f.kinks()[0] == 0.0);
    CHECK(f.kinks()[1] == 1.0);
    CHECK(validate(f).passed());

    // plane waves on both tails
    CHECK(f.value(2.0) == 2.0);
    CHECK(f.d1(3.0) == 1.0);
    const double slope_left = 1.0 / std::pow(rho + 1.0, 2);
    CHECK(f.d1(-1.0) == doctest::Approx(slope_left).epsilon(1e-13));

    // zero-constraint limit
    CHECK(make_f_eta(0.0, 1.0).kinks().empty());
    CHECK_THROWS_AS(make_f_eta(budget, 1.0), InadmissibleShock);
}

TEST_CASE("numeric segment derivatives") {
    const auto f = make_numeric([](double x) { return std::exp(x); }, {-4.0, 4.0});
    CHECK(f.value(0.0) == 1.0);
    CHECK(f.d1(0.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.d2(0.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(f.d3(0.0) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(schw(f, 0.0) == doctest::Approx(-0.5).epsilon(1e-7));
}

TEST_CASE("mollify: affine fixed point and smoothing") {
    const auto id = make_identity();
    const auto mid = mollify(id, 0.3);
    CHECK(mid.value(1.7) == 1.7); // affine maps are exact fixed points
    CHECK(mid.kinks().empty());

    const auto shock = make_shock({0.01, 0.0, 1.0, 1.0});
    const auto w = mollify(shock, 0.01);
    CHECK(w.kinks().empty());
    CHECK(validate(w).passed());
    // matches the base away from the kinks
    CHECK(w.value(-1.0) == doctest::Approx(shock.value(-1.0)).epsilon(1e-12));
    CHECK(w.value(2.0) == doctest::Approx(shock.value(2.0)).epsilon(1e-12));
    // smooth across the kink: second derivative finite and continuous-ish
    CHECK(std::isfinite(w.d2(0.0)));
    CHECK(w.density_support().has_value());
    CHECK(w.density_support()->lo == doctest::Approx(-0.01));
    CHECK(w.density_support()->hi == doctest::Approx(1.01));
}

TEST_CASE("mollify default width is a hundredth of the curved extent") {
    const auto shock = make_shock({0.01, -1.0, 1.0, 1.0}); // extent 2
    const auto w = mollify(shock);
    const auto sup = w.density_support();
    REQUIRE(sup.has_value());
    CHECK(sup->lo == doctest::Approx(-1.02));
    CHECK(sup->hi == doctest::Approx(1.02));
    CHECK(mollify(make_identity()).kinks().empty()); // affine passthrough
}

TEST_CASE("mollify converges to f, order >= 2 for smooth inputs") {
    const auto f = make_numeric([](double x) { return std::exp(x); }, {-3.0, 3.0});
    double prev = 0.0;
    double ratio_min = 1e9;
    bool first = true;
    for (double w : {0.2, 0.1, 0.05}) {
        const auto fw = mollify(f, w);
        double sup = 0.0;
        for (double x = -1.0; x <= 1.0; x += 0.17)
            sup = std::max(sup, std::abs(fw.value(x) - f.value(x)));
        if (!first) ratio_min = std::min(ratio_min, prev / sup);
        prev = sup;
        first = false;
    }
    CHECK(ratio_min > 3.5); // halving the width cuts the error ~4x
}

TEST_CASE("validate flags a value jump") {
    std::vector<PiecewiseSegment> segs;
    const double inf = std::numeric_limits<double>::infinity();
    segs.push_back({{-inf, 0.0}, AffineSeg{0.0, 1.0}});
    segs.push_back({{0.0, inf}, AffineSeg{0.5, 1.0}}); // C0 jump at 0
    const GeneratingFunction broken(segs, {0.0});
    const auto rep = validate(broken);
    CHECK(!rep.passed());
    CHECK(rep.worst_c0 > 1e-3);
}

TEST_CASE("validate flags nonmonotone numeric input") {
    const auto f = make_numeric([](double x) { return x - 2.0 * std::sin(x); }, {-2.0, 2.0});
    CHECK(!validate(f).passed()); // slope negative near the origin
}

TEST_CASE("moebius composition closure") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        MobiusParams p1{rng.uniform(0.5, 2.0), rng.uniform(-0.3, 0.3), rng.uniform(-1.0, 1.0),
                        rng.uniform(0.5, 2.0)};
        MobiusParams p2{rng.uniform(0.5, 2.0), rng.uniform(-0.3, 0.3), rng.uniform(-1.0, 1.0),
                        rng.uniform(0.5, 2.0)};
        if (p1.det() <= 0.1 || p2.det() <= 0.1) continue;
        const auto comp = mobius_compose(p1, p2);
        CHECK(comp.det() == doctest::Approx(p1.det() * p2.det()).epsilon(1e-10));
        const auto f1 = make_moebius(p1, {-0.5, 0.5});
        const auto f2 = make_moebius(p2, {-0.5, 0.5});
        // compose where the intermediate value stays inside f1's domain
        const double x = rng.uniform(-0.4, 0.4);
        const double y = f2.value(x);
        if (y <= -0.5 || y >= 0.5) continue;
        const auto fc = make_moebius(comp, {-0.45, 0.45});
        if (comp.has_pole() && std::abs(comp.pole()) < 0.6) continue;
        CHECK(fc.value(x) == doctest::Approx(f1.value(y)).epsilon(1e-10));
        CHECK(std::abs(schw(fc, x)) < 1e-10);
    }
}

TEST_CASE("json round-trip is bit-faithful") {
    const auto f = make_shock({0.008, -0.7, 1.9, 1.0});
    const json doc = to_json(f);
    const auto g = from_json(doc);
    REQUIRE(g.segments().size() == f.segments().size());
    for (std::size_t i = 0; i < f.segments().size(); ++i) {
        for (double x : {-1.0, -0.7, 0.33, 1.9, 2.5}) {
            CHECK(f.value(x) == g.value(x));
            CHECK(f.d1(x) == g.d1(x));
        }
    }
    CHECK(to_json(g) == doc);
    // round-trip through text as well
    const auto h = from_json_text(doc.dump());
    CHECK(to_json(h) == doc);
}

TEST_CASE("json round-trip of a restricted moebius profile") {
    const double inf = std::numeric_limits<double>::infinity();
    const auto f = make_moebius({1.0, 1.0, 0.0, 2.0}, {0.0, inf});
    const json doc = to_json(f);
    CHECK(doc["segments"][0]["form"] == "moebius");
    CHECK(doc["segments"][0]["interval"][1].is_null());
    const auto g = from_json(doc);
    CHECK(g.value(1.0) == f.value(1.0));
    CHECK(g.domain().lo == 0.0);
    CHECK(to_json(g) == doc);
}

TEST_CASE("json round-trip of a mollified profile") {
    const auto f = mollify(make_shock({0.01, 0.0, 1.0, 1.0}), 0.05);
    const json doc = to_json(f);
    const auto g = from_json(doc);
    CHECK(g.value(0.5) == doctest::Approx(f.value(0.5)).epsilon(1e-14));
    CHECK(to_json(g) == doc);
}

TEST_CASE("serialization rejections") {
    const auto f = make_numeric([](double x) { return x; }, {-1.0, 1.0});
    CHECK_THROWS_AS(to_json(f), SerializationError);
    CHECK_THROWS_AS(from_json_text("{not json"), SerializationError);
    CHECK_THROWS_AS(from_json_text("{\"segments\":[{\"form\":\"nope\",\"interval\":[0,1]}]}"),
                    SerializationError);
}

TEST_CASE("monotone inverse") {
    const auto f = make_shock({0.01, 0.0, 1.0, 1.0});
    for (double y : {-3.0, 0.2, 0.9, 4.0}) {
        const double x = inverse(f, y);
        CHECK(f.value(x) == doctest::Approx(y).epsilon(1e-10));
    }
    const auto g = make_moebius({1.0, 1.0, 0.0, 2.0}, {0.0, 10.0});
    CHECK_THROWS_AS(inverse(g, 100.0), DomainError);
}
