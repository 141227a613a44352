#pragma once

// Closed real intervals with outward rounding. Every operation widens its
// round-to-nearest result by one ulp on each side (two for the transcendental
// functions), which is enough for IEEE add/mul/div and for glibc's exp/log.
// Infinite endpoints are allowed; 0 * inf is taken as 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace fewzeros {

namespace detail {

inline double down(double x) { return std::isinf(x) ? x : std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double up(double x) { return std::isinf(x) ? x : std::nextafter(x, std::numeric_limits<double>::infinity()); }

inline double mul0(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

}  // namespace detail

class Interval {
public:
    constexpr Interval() = default;
    constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT: implicit on purpose
    Interval(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(lo <= hi)) throw std::invalid_argument("interval with lo > hi or NaN");
    }

    static Interval entire() {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    static Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }
    /// Smallest interval sure to contain x after a rounding error of `ulps` ulps.
    static Interval around(double x, int ulps = 1) {
        double lo = x, hi = x;
        for (int i = 0; i < ulps; ++i) {
            lo = detail::down(lo);
            hi = detail::up(hi);
        }
        return {lo, hi};
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double mid() const {
        if (std::isinf(lo_) || std::isinf(hi_)) {
            if (std::isinf(lo_) && std::isinf(hi_)) return 0.0;
            return std::isinf(lo_) ? hi_ : lo_;
        }
        return lo_ + 0.5 * (hi_ - lo_);
    }
    double width() const { return hi_ - lo_; }
    double rad() const { return 0.5 * width(); }
    double mag() const { return std::max(std::abs(lo_), std::abs(hi_)); }

    bool contains(double x) const { return lo_ <= x && x <= hi_; }
    bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
    bool subset_of(const Interval& o) const { return o.lo_ <= lo_ && hi_ <= o.hi_; }
    bool interior_of(const Interval& o) const { return o.lo_ < lo_ && hi_ < o.hi_; }
    bool intersects(const Interval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }
    /// +1 / -1 when the interval excludes zero, 0 otherwise.
    int sign() const { return lo_ > 0.0 ? 1 : (hi_ < 0.0 ? -1 : 0); }

    friend Interval operator-(const Interval& a) { return {-a.hi_, -a.lo_}; }
    friend Interval operator+(const Interval& a, const Interval& b) {
        return {detail::down(a.lo_ + b.lo_), detail::up(a.hi_ + b.hi_)};
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        return {detail::down(a.lo_ - b.hi_), detail::up(a.hi_ - b.lo_)};
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        using detail::mul0;
        if ((a.lo_ == 0.0 && a.hi_ == 0.0) || (b.lo_ == 0.0 && b.hi_ == 0.0)) return Interval(0.0);  // exact
        const double p[4] = {mul0(a.lo_, b.lo_), mul0(a.lo_, b.hi_), mul0(a.hi_, b.lo_), mul0(a.hi_, b.hi_)};
        return {detail::down(*std::min_element(p, p + 4)), detail::up(*std::max_element(p, p + 4))};
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.contains_zero()) return entire();
        const double p[4] = {a.lo_ / b.lo_, a.lo_ / b.hi_, a.hi_ / b.lo_, a.hi_ / b.hi_};
        for (double v : p)
            if (std::isnan(v)) return entire();
        return {detail::down(*std::min_element(p, p + 4)), detail::up(*std::max_element(p, p + 4))};
    }
    Interval& operator+=(const Interval& o) { return *this = *this + o; }
    Interval& operator-=(const Interval& o) { return *this = *this - o; }
    Interval& operator*=(const Interval& o) { return *this = *this * o; }

    friend bool operator==(const Interval&, const Interval&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Interval& x) {
        return os << '[' << x.lo_ << ", " << x.hi_ << ']';
    }

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

/// Intersection; returns false when empty.
inline bool intersect(const Interval& a, const Interval& b, Interval& out) {
    const double lo = std::max(a.lo(), b.lo());
    const double hi = std::min(a.hi(), b.hi());
    if (lo > hi) return false;
    out = Interval(lo, hi);
    return true;
}

inline Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

// The lower bound is kept finite so sums of overflowing terms never form inf - inf.
inline Interval exp(const Interval& x) {
    double lo = x.lo() == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(x.lo());
    double hi = std::exp(x.hi());
    lo = std::max(0.0, detail::down(detail::down(lo)));
    lo = std::min(lo, std::numeric_limits<double>::max());
    hi = detail::up(detail::up(hi));
    return {lo, hi};
}

/// Natural log of an interval with lo >= 0; log(0) = -inf.
inline Interval log(const Interval& x) {
    if (x.lo() < 0.0) throw std::domain_error("interval log of negative values");
    const double lo = x.lo() == 0.0 ? -std::numeric_limits<double>::infinity()
                                    : detail::down(detail::down(std::log(x.lo())));
    const double hi = x.hi() == 0.0 ? -std::numeric_limits<double>::infinity() : detail::up(detail::up(std::log(x.hi())));
    return {lo, hi};
}

inline Interval sqr(const Interval& x) {
    if (x.lo() >= 0.0) return x * x;
    if (x.hi() <= 0.0) return (-x) * (-x);
    return {0.0, detail::up(x.mag() * x.mag())};
}

}  // namespace fewzeros
