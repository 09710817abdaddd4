#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace certsens {

/// Closed real interval [lo, hi].  Arithmetic is the usual interval
/// arithmetic (no directed rounding: enclosures are exact in real
/// arithmetic and empirically dominate floating-point error by many
/// orders of magnitude in this application).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval point(double v) { return {v, v}; }
    static Interval radius(double center, double r) { return {center - r, center + r}; }

    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
};

inline Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }

inline Interval operator*(Interval a, Interval b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

inline Interval operator*(double c, Interval a) {
    return c >= 0 ? Interval{c * a.lo, c * a.hi} : Interval{c * a.hi, c * a.lo};
}

inline Interval operator+(Interval a, double c) { return {a.lo + c, a.hi + c}; }
inline Interval operator-(Interval a, double c) { return {a.lo - c, a.hi - c}; }

inline Interval square(Interval a) {
    if (a.lo >= 0.0) return {a.lo * a.lo, a.hi * a.hi};
    if (a.hi <= 0.0) return {a.hi * a.hi, a.lo * a.lo};
    const double m = std::max(-a.lo, a.hi);
    return {0.0, m * m};
}

/// Quotient a / b for b strictly positive (b.lo > 0).
inline Interval divide_positive(Interval a, Interval b) {
    const double q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
    return {std::min(std::min(q1, q2), std::min(q3, q4)),
            std::max(std::max(q1, q2), std::max(q3, q4))};
}

}  // namespace certsens
