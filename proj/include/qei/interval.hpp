#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace qei {

// Closed real interval, possibly unbounded on either side.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Interval whole_line() { return {}; }

    bool contains(double x) const { return x >= lo && x <= hi; }
    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool valid() const { return lo <= hi; }
    double width() const { return hi - lo; }
    double clamp(double x) const { return std::min(hi, std::max(lo, x)); }

    Interval intersect(const Interval& o) const {
        return {std::max(lo, o.lo), std::min(hi, o.hi)};
    }
    Interval hull(const Interval& o) const {
        return {std::min(lo, o.lo), std::max(hi, o.hi)};
    }
};

} // namespace qei
