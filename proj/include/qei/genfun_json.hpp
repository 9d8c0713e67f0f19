#pragma once

// JSON (de)serialization of generating functions:
//   {"segments":[{"interval":[a,b],"form":"moebius","coeffs":[...]},...],
//    "kinks":[...], "hbar":1.0}
// Infinite interval endpoints are encoded as null. Coefficients round-trip
// bit-faithfully (shortest-exact double printing). Numeric segments have no
// closed form and cannot be serialized.

#include <json.hpp>

#include "qei/errors.hpp"
#include "qei/genfun.hpp"

namespace qei {

using json = nlohmann::ordered_json;

namespace detail {

inline json interval_to_json(const Interval& iv) {
    json j = json::array();
    j.push_back(std::isfinite(iv.lo) ? json(iv.lo) : json(nullptr));
    j.push_back(std::isfinite(iv.hi) ? json(iv.hi) : json(nullptr));
    return j;
}

inline Interval interval_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw SerializationError("interval must be a two-element array");
    const double inf = std::numeric_limits<double>::infinity();
    Interval iv;
    iv.lo = j[0].is_null() ? -inf : j[0].get<double>();
    iv.hi = j[1].is_null() ? inf : j[1].get<double>();
    if (!iv.valid()) throw SerializationError("interval endpoints out of order");
    return iv;
}

} // namespace detail

inline json to_json(const GeneratingFunction& f);

namespace detail {

inline json segment_to_json(const PiecewiseSegment& seg) {
    json j;
    j["interval"] = interval_to_json(seg.interval);
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AffineSeg>) {
                j["form"] = "affine";
                j["coeffs"] = {s.c, s.d};
            } else if constexpr (std::is_same_v<S, MoebiusSeg>) {
                j["form"] = "moebius";
                j["coeffs"] = {s.a, s.b, s.c, s.d};
            } else if constexpr (std::is_same_v<S, ReciprocalShiftSeg>) {
                j["form"] = "reciprocal-shift";
                j["coeffs"] = {s.k, s.a, s.b};
            } else if constexpr (std::is_same_v<S, MollifiedSeg>) {
                j["form"] = "mollified-numeric";
                j["width"] = s.width;
                j["base"] = qei::to_json(*s.base);
            } else {
                throw SerializationError("numeric segments have no serializable form");
            }
        },
        seg.form);
    return j;
}

inline PiecewiseSegment segment_from_json(const json& j) {
    if (!j.contains("form") || !j.contains("interval"))
        throw SerializationError("segment requires 'form' and 'interval'");
    PiecewiseSegment seg;
    seg.interval = interval_from_json(j.at("interval"));
    const std::string form = j.at("form").get<std::string>();

    auto coeffs = [&](std::size_t n) {
        const auto& c = j.at("coeffs");
        if (!c.is_array() || c.size() != n)
            throw SerializationError("bad coefficient count for form '" + form + "'");
        std::vector<double> v;
        for (const auto& e : c) v.push_back(e.get<double>());
        return v;
    };

    if (form == "affine") {
        auto c = coeffs(2);
        seg.form = AffineSeg{c[0], c[1]};
    } else if (form == "moebius") {
        auto c = coeffs(4);
        seg.form = MoebiusSeg{c[0], c[1], c[2], c[3]};
    } else if (form == "reciprocal-shift") {
        auto c = coeffs(3);
        seg.form = ReciprocalShiftSeg{c[0], c[1], c[2]};
    } else if (form == "mollified-numeric") {
        if (!j.contains("base") || !j.contains("width"))
            throw SerializationError("mollified segment requires 'base' and 'width'");
        MollifiedSeg m;
        m.width = j.at("width").get<double>();
        seg.form = m; // base filled by from_json, which owns the recursion

    } else {
        throw SerializationError("unknown segment form '" + form + "'");
    }
    return seg;
}

} // namespace detail

inline json to_json(const GeneratingFunction& f) {
    json j;
    j["segments"] = json::array();
    for (const auto& seg : f.segments()) j["segments"].push_back(detail::segment_to_json(seg));
    j["kinks"] = f.kinks();
    j["hbar"] = f.hbar();
    return j;
}

inline GeneratingFunction from_json(const json& j) {
    if (!j.is_object() || !j.contains("segments"))
        throw SerializationError("document requires a 'segments' array");
    std::vector<PiecewiseSegment> segs;
    for (const auto& sj : j.at("segments")) {
        PiecewiseSegment seg = detail::segment_from_json(sj);
        if (auto* m = std::get_if<MollifiedSeg>(&seg.form)) {
            m->base = std::make_shared<const GeneratingFunction>(from_json(sj.at("base")));
        }
        segs.push_back(std::move(seg));
    }
    std::vector<double> kinks;
    if (j.contains("kinks"))
        for (const auto& k : j.at("kinks")) kinks.push_back(k.get<double>());
    const double hbar = j.contains("hbar") ? j.at("hbar").get<double>() : 1.0;
    try {
        return GeneratingFunction(std::move(segs), std::move(kinks), hbar);
    } catch (const Error& e) {
        throw SerializationError(std::string("invalid generating function: ") + e.what());
    }
}

inline GeneratingFunction from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SerializationError("malformed JSON document");
    return from_json(j);
}

} // namespace qei
