#pragma once

// Certified counting of positive zeros, always in log coordinates y = ln x.
//
//  * n = 1: interval bisection with monotonicity certificates on a window
//    outside of which one term provably dominates.
//  * unmixed systems with t <= n + 2: exact rational elimination reduces the
//    system to a sign test (t = n + 1) or to one equation in one unknown along
//    the positive part of a two-dimensional kernel (t = n + 2).
//  * everything else: dominance pieces bounded by LP, then a Krawczyk search.
//
// Certified means every counted zero has a uniqueness proof and every other
// part of the search region was excluded. Anything else is reported undecided.

#include "fewzeros/geometry.hpp"
#include "fewzeros/interval.hpp"
#include "fewzeros/lp.hpp"
#include "fewzeros/random_systems.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fewzeros {

/// Axis-aligned box in log coordinates.
struct Box {
    std::vector<Interval> coords;

    std::size_t dim() const { return coords.size(); }
    std::vector<double> mid() const {
        std::vector<double> m;
        for (const auto& c : coords) m.push_back(c.mid());
        return m;
    }
    double max_width() const {
        double w = 0.0;
        for (const auto& c : coords) w = std::max(w, c.width());
        return w;
    }
    bool subset_of(const Box& o) const {
        for (std::size_t i = 0; i < dim(); ++i)
            if (!coords[i].subset_of(o.coords[i])) return false;
        return true;
    }
    bool interior_of(const Box& o) const {
        for (std::size_t i = 0; i < dim(); ++i)
            if (!coords[i].interior_of(o.coords[i])) return false;
        return true;
    }
    bool intersects(const Box& o) const {
        for (std::size_t i = 0; i < dim(); ++i)
            if (!coords[i].intersects(o.coords[i])) return false;
        return true;
    }
    bool finite() const {
        for (const auto& c : coords)
            if (!std::isfinite(c.lo()) || !std::isfinite(c.hi())) return false;
        return true;
    }
};

inline Box hull(const Box& a, const Box& b) {
    Box h;
    for (std::size_t i = 0; i < a.dim(); ++i) h.coords.push_back(hull(a.coords[i], b.coords[i]));
    return h;
}

struct CountOptions {
    int max_depth = 60;
    double tol = 1e-10;
    bool exact_check = false;  // univariate integer exponents: also count by Descartes bisection
};

struct CountResult {
    int count = 0;
    bool certified = false;
    std::vector<Box> undecided_boxes;
    std::vector<std::vector<double>> zero_points;  // log coordinates
    std::string method;
    std::optional<int> exact_count;  // from the optional exact cross-check
};

namespace detail {

struct Term {
    Interval logabs;  // encloses ln|coefficient|
    int sign = 1;
    std::vector<double> alpha;
};
using ExpSum = std::vector<Term>;

inline std::vector<ExpSum> log_terms(const FewnomialSystem& sys) {
    std::vector<ExpSum> out(sys.n());
    for (std::size_t k = 0; k < sys.n(); ++k)
        for (std::size_t a = 0; a < sys.coefficients[k].size(); ++a) {
            const double c = sys.coefficients[k][a];
            if (c == 0.0) continue;
            out[k].push_back({log(Interval(std::abs(c))), c > 0 ? 1 : -1, sys.exponents[k][a]});
        }
    return out;
}

inline bool has_sign_change(const ExpSum& eq) {
    bool pos = false, neg = false;
    for (const auto& t : eq) (t.sign > 0 ? pos : neg) = true;
    return pos && neg;
}

/// Encloses e^{-M} times the terms of `eq` over the box, M chosen at its centre.
struct ScaledTerms {
    std::vector<Interval> values;  // e^{L_j - M}, without sign
};

inline ScaledTerms scaled_terms(const ExpSum& eq, const Box& x, const std::vector<double>& c) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : eq) {
        double l = t.logabs.mid();
        for (std::size_t i = 0; i < c.size(); ++i) l += t.alpha[i] * c[i];
        m = std::max(m, l);
    }
    ScaledTerms out;
    for (const auto& t : eq) {
        Interval e = t.logabs - Interval(m);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (t.alpha[i] == 0.0) continue;
            e += Interval(t.alpha[i]) * Interval(c[i]);
            e += Interval(t.alpha[i]) * (x.coords[i] - Interval(c[i]));
        }
        out.values.push_back(exp(e));
    }
    return out;
}

// ---------------------------------------------------------------- 1-D engine

/// A real function on [lo, hi] described by enclosures of a positive multiple
/// of f and of a positive multiple of f'. Domain ends may be singular, in
/// which case the sign of f near them is supplied.
struct Function1D {
    std::function<Interval(const Interval&)> value;
    std::function<Interval(const Interval&)> slope;
    int sign_near_lo = 0;  // 0: evaluate value() at lo
    int sign_near_hi = 0;
};

struct Isolation1D {
    int count = 0;
    bool certified = true;
    std::vector<Interval> roots;  // each holds exactly one simple zero
    std::vector<Interval> undecided;
};

inline Isolation1D isolate_1d(const Function1D& f, double lo, double hi, const CountOptions& opts) {
    Isolation1D out;
    if (!(lo < hi)) return out;
    auto point_sign = [&](double p) -> int {
        if (p == lo && f.sign_near_lo != 0) return f.sign_near_lo;
        if (p == hi && f.sign_near_hi != 0) return f.sign_near_hi;
        return f.value(Interval(p)).sign();
    };
    struct Seg {
        double a, b;
        int sa, sb, depth;
    };
    std::vector<Seg> stack{{lo, hi, 0, 0, 0}};
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        const Interval x(s.a, s.b);
        if (f.value(x).sign() != 0) continue;
        if (f.slope(x).sign() != 0) {
            if (s.sa == 0) s.sa = point_sign(s.a);
            if (s.sb == 0) s.sb = point_sign(s.b);
            if (s.sa != 0 && s.sb != 0) {
                if (s.sa != s.sb) {
                    ++out.count;
                    out.roots.push_back(x);
                }
                continue;
            }
        }
        const double w = s.b - s.a;
        if (s.depth >= opts.max_depth || w <= opts.tol) {
            out.certified = false;
            out.undecided.push_back(x);
            continue;
        }
        double m = s.a + 0.5 * w;
        int sm = 0;
        for (double frac : {0.5, 0.4375, 0.5625, 0.375, 0.625}) {
            const double p = s.a + frac * w;
            if (p <= s.a || p >= s.b) continue;
            if (const int sp = point_sign(p); sp != 0) {
                m = p;
                sm = sp;
                break;
            }
        }
        if (!(m > s.a && m < s.b)) {
            out.certified = false;
            out.undecided.push_back(x);
            continue;
        }
        stack.push_back({m, s.b, sm, s.sb, s.depth + 1});
        stack.push_back({s.a, m, s.sa, sm, s.depth + 1});
    }
    return out;
}

/// Shrinks a root bracket by sign bisection; returns its midpoint.
inline double polish_root_1d(const Function1D& f, Interval bracket, double lo, double hi) {
    auto sign_at = [&](double p) -> int {
        if (p == lo && f.sign_near_lo != 0) return f.sign_near_lo;
        if (p == hi && f.sign_near_hi != 0) return f.sign_near_hi;
        return f.value(Interval(p)).sign();
    };
    double a = bracket.lo(), b = bracket.hi();
    int sa = sign_at(a);
    for (int it = 0; it < 200 && sa != 0; ++it) {
        const double m = a + 0.5 * (b - a);
        if (!(m > a && m < b)) break;
        const int sm = sign_at(m);
        if (sm == 0) return m;
        if (sm == sa) {
            a = m;
        } else {
            b = m;
        }
    }
    return a + 0.5 * (b - a);
}

// ------------------------------------------------------- exact Descartes count

using RatPoly = std::vector<Rational>;  // index = degree

inline int sign_variations(const RatPoly& p) {
    int v = 0, last = 0;
    for (const auto& c : p) {
        const int s = c > 0 ? 1 : (c < 0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++v;
        last = s;
    }
    return v;
}

inline RatPoly reverse_poly(RatPoly p) {
    std::reverse(p.begin(), p.end());
    return p;
}

inline RatPoly taylor_shift_one(RatPoly p) {
    const std::size_t d = p.size();
    for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t j = d - 1; j > i; --j) p[j - 1] += p[j];
    return p;
}

inline RatPoly scale_half(RatPoly p) {
    const std::size_t d = p.size() - 1;
    Rational f(1);
    for (std::size_t i = d + 1; i-- > 0;) {
        p[i] *= f;
        f *= 2;
    }
    return p;
}

inline Rational eval_poly(const RatPoly& p, const Rational& x) {
    Rational v(0);
    for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

/// Divides by (x - r), assuming r is a root.
inline RatPoly deflate(const RatPoly& p, const Rational& r) {
    RatPoly q(p.size() - 1);
    Rational carry(0);
    for (std::size_t i = p.size(); i-- > 1;) {
        carry = carry * r + p[i];
        q[i - 1] = carry;
    }
    return q;
}

/// Distinct roots in (0, 1) of a polynomial with p(0) != 0 and p(1) != 0.
inline std::optional<int> roots_in_unit_interval(const RatPoly& p, int depth) {
    if (p.size() <= 1) return 0;
    const int v = sign_variations(taylor_shift_one(reverse_poly(p)));
    if (v <= 1) return v;
    if (depth > 200) return std::nullopt;  // multiple root or pathological input
    int count = 0;
    RatPoly q = p;
    const Rational half(1, 2);
    while (q.size() > 1 && eval_poly(q, half) == 0) {
        q = deflate(q, half);
        ++count;
    }
    const auto left = roots_in_unit_interval(scale_half(q), depth + 1);
    const auto right = roots_in_unit_interval(taylor_shift_one(scale_half(q)), depth + 1);
    if (!left || !right) return std::nullopt;
    return count + *left + *right;
}

}  // namespace detail

/// Exact number of distinct positive roots of sum c_j x^{e_j} for integer
/// exponents, by Descartes' rule with bisection. nullopt if a multiple root
/// defeats the bisection.
inline std::optional<int> descartes_positive_roots(const std::vector<double>& coeffs, const std::vector<long>& exps) {
    if (coeffs.size() != exps.size()) throw std::invalid_argument("coefficient and exponent lists differ in length");
    long emin = std::numeric_limits<long>::max(), emax = std::numeric_limits<long>::min();
    bool any = false;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 0.0) {
            emin = std::min(emin, exps[i]);
            emax = std::max(emax, exps[i]);
            any = true;
        }
    if (!any) return std::nullopt;  // the zero polynomial
    detail::RatPoly p(static_cast<std::size_t>(emax - emin) + 1, Rational(0));
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 0.0) p[static_cast<std::size_t>(exps[i] - emin)] += ScalarTraits<Rational>::from_double(coeffs[i]);
    int count = 0;
    while (p.size() > 1 && detail::eval_poly(p, Rational(1)) == 0) {
        p = detail::deflate(p, Rational(1));
        ++count;
    }
    const auto below = detail::roots_in_unit_interval(p, 0);
    const auto above = detail::roots_in_unit_interval(detail::reverse_poly(p), 0);
    if (!below || !above) return std::nullopt;
    return count + *below + *above;
}

/// n = 1: zeros of g(y) = sum_j c_j e^{a_j y} on the real line.
inline CountResult count_univariate(const FewnomialSystem& sys, const CountOptions& opts = {}) {
    if (sys.n() != 1) throw std::invalid_argument("count_univariate needs n = 1");
    CountResult out;
    out.method = "univariate";
    const auto eq = detail::log_terms(sys)[0];

    if (opts.exact_check) {
        bool integral = true;
        std::vector<long> exps;
        for (const auto& a : sys.spec.equations[0].support) {
            if (boost::multiprecision::denominator(a[0]) != 1) integral = false;
            exps.push_back(integral ? boost::multiprecision::numerator(a[0]).convert_to<long>() : 0);
        }
        if (integral) out.exact_count = descartes_positive_roots(sys.coefficients[0], exps);
    }

    if (!detail::has_sign_change(eq)) {
        out.certified = true;
        return out;
    }
    // Outside [y_lo, y_hi] the extreme-exponent term beats all others together.
    std::size_t top = 0, bot = 0;
    for (std::size_t j = 1; j < eq.size(); ++j) {
        if (eq[j].alpha[0] > eq[top].alpha[0]) top = j;
        if (eq[j].alpha[0] < eq[bot].alpha[0]) bot = j;
    }
    const double lt = std::log(static_cast<double>(eq.size()));
    double y_hi = -std::numeric_limits<double>::infinity(), y_lo = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < eq.size(); ++j) {
        if (j != top)
            y_hi = std::max(y_hi, (eq[j].logabs.mid() - eq[top].logabs.mid() + lt) / (eq[top].alpha[0] - eq[j].alpha[0]));
        if (j != bot)
            y_lo = std::min(y_lo, (eq[bot].logabs.mid() - eq[j].logabs.mid() - lt) / (eq[j].alpha[0] - eq[bot].alpha[0]));
    }
    y_hi += 1.0 + 1e-9 * std::abs(y_hi);
    y_lo -= 1.0 + 1e-9 * std::abs(y_lo);

    detail::Function1D f;
    f.value = [&eq](const Interval& y) {
        const auto st = detail::scaled_terms(eq, Box{{y}}, {y.mid()});
        Interval v(0.0);
        for (std::size_t j = 0; j < eq.size(); ++j) v += Interval(eq[j].sign) * st.values[j];
        return v;
    };
    f.slope = [&eq](const Interval& y) {
        const auto st = detail::scaled_terms(eq, Box{{y}}, {y.mid()});
        Interval v(0.0);
        for (std::size_t j = 0; j < eq.size(); ++j) v += Interval(eq[j].sign * eq[j].alpha[0]) * st.values[j];
        return v;
    };
    f.sign_near_lo = eq[bot].sign;
    f.sign_near_hi = eq[top].sign;
    if (!(y_lo < y_hi)) {
        out.certified = true;
        return out;
    }
    const auto iso = detail::isolate_1d(f, y_lo, y_hi, opts);
    out.count = iso.count;
    out.certified = iso.certified;
    for (const auto& u : iso.undecided) out.undecided_boxes.push_back(Box{{u}});
    for (const auto& r : iso.roots) out.zero_points.push_back({detail::polish_root_1d(f, r, y_lo, y_hi)});
    return out;
}

// ------------------------------------------------------------ dominance pieces

/// One polyhedral piece {rows · y <= rhs} of the zero localisation together
/// with its bounding box (sides may be infinite).
struct Piece {
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<std::size_t> dominant;  // per equation, index of the largest term
    Box box;
};

struct TruncationRegion {
    bool span_deficient = false;  // zeros (if any) are never regular
    std::vector<Piece> pieces;
};

namespace detail {

inline std::optional<double> lp_max(const std::vector<double>& obj, const std::vector<std::vector<double>>& rows,
                                    const std::vector<double>& rhs, bool& unbounded) {
    const auto r = lp::maximize<double>(obj, rows, rhs);
    unbounded = r.status == lp::Status::unbounded;
    if (r.status != lp::Status::optimal) return std::nullopt;
    return r.value;
}

inline bool lp_feasible(std::size_t n, const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs) {
    const auto r = lp::maximize<double>(std::vector<double>(n, 0.0), rows, rhs);
    return r.status != lp::Status::infeasible;
}

/// Bounding box of a polyhedron; infinite where unbounded. Inflated for LP round-off.
inline Box bounding_box(std::size_t n, const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs) {
    Box b;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        bool unb = false;
        const auto hi = lp_max(e, rows, rhs, unb);
        e[i] = -1.0;
        bool unb2 = false;
        const auto lo = lp_max(e, rows, rhs, unb2);
        double h = hi ? *hi + 1e-6 * (1.0 + std::abs(*hi)) : inf;
        double l = lo ? -*lo - 1e-6 * (1.0 + std::abs(*lo)) : -inf;
        if (!hi && !unb) h = inf;
        if (!lo && !unb2) l = -inf;
        b.coords.emplace_back(l, h);
    }
    return b;
}

}  // namespace detail

/// Pieces covering every zero of the log-coordinate system. At a zero of g_k
/// the largest term L_a (L = ln|c| + alpha·y) is balanced by the m_a terms of
/// opposite sign, so some such b has L_a - L_b <= ln m_a. One choice of (a, b)
/// per equation gives a polyhedron; infeasible combinations are dropped.
inline TruncationRegion truncation_region(const FewnomialSystem& sys, double tol = 1e-10) {
    const std::size_t n = sys.n();
    TruncationRegion out;
    if (affine_span_dimension(sys.spec.supports<Rational>()) < n) {
        out.span_deficient = true;
        return out;
    }
    const auto eqs = detail::log_terms(sys);
    auto slack = [tol](double rhs) { return rhs + tol + 1e-9 * (1.0 + std::abs(rhs)); };

    struct Choice {
        std::vector<std::vector<double>> rows;
        std::vector<double> rhs;
        std::size_t dominant;
    };
    std::vector<std::vector<Choice>> choices(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& eq = eqs[k];
        for (std::size_t a = 0; a < eq.size(); ++a) {
            std::size_t m = 0;
            for (const auto& t : eq) m += t.sign != eq[a].sign;
            if (m == 0) continue;
            for (std::size_t b = 0; b < eq.size(); ++b) {
                if (eq[b].sign == eq[a].sign) continue;
                Choice c{{}, {}, a};
                for (std::size_t j = 0; j < eq.size(); ++j) {
                    if (j == a) continue;
                    std::vector<double> row(n);
                    for (std::size_t i = 0; i < n; ++i) row[i] = eq[j].alpha[i] - eq[a].alpha[i];
                    c.rows.push_back(row);
                    c.rhs.push_back(slack(eq[a].logabs.mid() - eq[j].logabs.mid()));
                }
                std::vector<double> row(n);
                for (std::size_t i = 0; i < n; ++i) row[i] = eq[a].alpha[i] - eq[b].alpha[i];
                c.rows.push_back(row);
                c.rhs.push_back(slack(std::log(static_cast<double>(m)) + eq[b].logabs.mid() - eq[a].logabs.mid()));
                choices[k].push_back(std::move(c));
            }
        }
        if (choices[k].empty()) return out;  // an equation without sign change has no zeros
    }

    std::vector<std::size_t> dominant(n);
    std::function<void(std::size_t, std::vector<std::vector<double>>&, std::vector<double>&)> dfs =
        [&](std::size_t k, std::vector<std::vector<double>>& rows, std::vector<double>& rhs) {
            if (k == n) {
                out.pieces.push_back({rows, rhs, dominant, detail::bounding_box(n, rows, rhs)});
                return;
            }
            for (const auto& c : choices[k]) {
                const std::size_t mark = rows.size();
                rows.insert(rows.end(), c.rows.begin(), c.rows.end());
                rhs.insert(rhs.end(), c.rhs.begin(), c.rhs.end());
                dominant[k] = c.dominant;
                if (detail::lp_feasible(n, rows, rhs)) dfs(k + 1, rows, rhs);
                rows.resize(mark);
                rhs.resize(mark);
            }
        };
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    dfs(0, rows, rhs);
    return out;
}

// -------------------------------------------------------------- Krawczyk search

namespace detail {

struct KrawczykStep {
    enum Outcome { excluded, unique, contracted, inconclusive } outcome = inconclusive;
    Box image;  // K(X) ∩ X when contracted, K(X) when unique
};

inline KrawczykStep krawczyk_step(const std::vector<ExpSum>& eqs, const Box& x) {
    const std::size_t n = x.dim();
    const auto c = x.mid();
    const Box cbox{std::vector<Interval>(c.begin(), c.end())};
    std::vector<Interval> gc(n);
    std::vector<std::vector<Interval>> jac(n, std::vector<Interval>(n, Interval(0.0)));
    for (std::size_t k = 0; k < n; ++k) {
        const auto& eq = eqs[k];
        const auto over = scaled_terms(eq, x, c);
        const auto at = scaled_terms(eq, cbox, c);  // same scaling: same centre
        Interval v(0.0), vc(0.0);
        for (std::size_t j = 0; j < eq.size(); ++j) {
            v += Interval(eq[j].sign) * over.values[j];
            vc += Interval(eq[j].sign) * at.values[j];
            for (std::size_t i = 0; i < n; ++i)
                if (eq[j].alpha[i] != 0.0) jac[k][i] += Interval(eq[j].sign * eq[j].alpha[i]) * over.values[j];
        }
        if (v.sign() != 0) return {KrawczykStep::excluded, {}};
        gc[k] = vc;
    }
    Eigen::MatrixXd jm(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const double m = jac[k][i].mid();
            if (!std::isfinite(m)) return {};
            jm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = m;
        }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jm);
    if (lu.rank() < static_cast<Eigen::Index>(n)) return {};
    const Eigen::MatrixXd y = lu.inverse();
    if (!y.allFinite()) return {};

    Box k_box;
    for (std::size_t r = 0; r < n; ++r) {
        Interval acc(c[r]);
        for (std::size_t j = 0; j < n; ++j)
            acc -= Interval(y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j))) * gc[j];
        for (std::size_t l = 0; l < n; ++l) {
            Interval m(r == l ? 1.0 : 0.0);
            for (std::size_t j = 0; j < n; ++j)
                m -= Interval(y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j))) * jac[j][l];
            acc += m * (x.coords[l] - Interval(c[l]));
        }
        if (!std::isfinite(acc.lo()) || !std::isfinite(acc.hi())) return {};
        k_box.coords.push_back(acc);
    }
    if (k_box.interior_of(x)) return {KrawczykStep::unique, k_box};
    Box meet;
    for (std::size_t i = 0; i < n; ++i) {
        Interval m;
        if (!intersect(k_box.coords[i], x.coords[i], m)) return {KrawczykStep::excluded, {}};
        meet.coords.push_back(m);
    }
    return {KrawczykStep::contracted, meet};
}

struct Certificate {
    Box enclosure;  // contains the zero
    Box region;     // the zero is the only one in here
};

/// Tightens the enclosure and grows the uniqueness region (epsilon-inflation).
inline Certificate refine_certificate(const std::vector<ExpSum>& eqs, const Box& region, const Box& image) {
    Certificate cert{image, region};
    for (int it = 0; it < 8; ++it) {
        const auto s = krawczyk_step(eqs, cert.enclosure);
        if (s.outcome != KrawczykStep::unique) break;
        const bool shrunk = s.image.max_width() < 0.5 * cert.enclosure.max_width();
        cert.enclosure = s.image;
        if (!shrunk) break;
    }
    const auto centre = cert.enclosure.mid();
    std::vector<double> half(region.dim());
    for (std::size_t i = 0; i < region.dim(); ++i) half[i] = std::max(region.coords[i].rad(), 1e-12);
    // the grown box is centred on the enclosure, so its unique zero is ours
    for (int grow = 0; grow < 8; ++grow) {
        Box bigger;
        for (std::size_t i = 0; i < region.dim(); ++i) {
            half[i] *= 2.0;
            bigger.coords.emplace_back(centre[i] - half[i], centre[i] + half[i]);
        }
        if (krawczyk_step(eqs, bigger).outcome != KrawczykStep::unique) break;
        cert.region = bigger;
    }
    return cert;
}

/// Encloses eq / (its term `ref`) over a polyhedron, bounding each exponent
/// difference by LP. Returns false if some difference is unbounded above.
inline bool quotient_over(const ExpSum& eq, std::size_t ref, const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& rhs, Interval& q) {
    const std::size_t n = eq[ref].alpha.size();
    const auto& dom = eq[ref];
    q = Interval(static_cast<double>(dom.sign));
    for (std::size_t j = 0; j < eq.size(); ++j) {
        if (j == ref) continue;
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = eq[j].alpha[i] - dom.alpha[i];
        const double off = eq[j].logabs.mid() - dom.logabs.mid();
        bool unb = false;
        const auto hi = lp_max(d, rows, rhs, unb);
        if (!hi) return false;
        for (auto& v : d) v = -v;
        const auto lo = lp_max(d, rows, rhs, unb);
        const double l = lo ? -*lo + off : -std::numeric_limits<double>::infinity();
        const double h = *hi + off;
        const double pad = 1e-6 * (1.0 + std::abs(h)) + eq[j].logabs.rad() + dom.logabs.rad();
        q += Interval(eq[j].sign) * exp(Interval(std::isfinite(l) ? l - pad : l, h + pad));
    }
    return true;
}

/// Tail exclusion for an unbounded piece: over piece ∩ {extra row} some
/// equation divided by one of its terms must provably stay away from zero.
/// Base equations are divided by their dominant term in the piece; the
/// eliminated combinations try every term.
inline bool tail_excluded(const std::vector<ExpSum>& eqs, const std::vector<ExpSum>& derived, const Piece& piece,
                          const std::vector<double>& extra_row, double extra_rhs) {
    const std::size_t n = extra_row.size();
    auto rows = piece.rows;
    auto rhs = piece.rhs;
    rows.push_back(extra_row);
    rhs.push_back(extra_rhs);
    if (!lp_feasible(n, rows, rhs)) return true;
    Interval q;
    for (std::size_t k = 0; k < eqs.size(); ++k)
        if (quotient_over(eqs[k], piece.dominant[k], rows, rhs, q) && q.sign() != 0) return true;
    for (const auto& eq : derived)
        for (std::size_t r = 0; r < eq.size(); ++r)
            if (quotient_over(eq, r, rows, rhs, q) && q.sign() != 0) return true;
    return false;
}

/// Consequences of the system obtained by cancelling one shared monomial
/// between two equations, with exactly computed coefficients. They vanish at
/// every zero, so they can exclude regions the original equations cannot.
inline std::vector<ExpSum> eliminated_equations(const FewnomialSystem& sys) {
    std::vector<ExpSum> out;
    const auto& spec = sys.spec;
    const std::size_t n = sys.n();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) {
            const auto& sk = spec.equations[k].support;
            const auto& sl = spec.equations[l].support;
            for (std::size_t a = 0; a < sk.size(); ++a) {
                const auto it = std::find(sl.begin(), sl.end(), sk[a]);
                if (it == sl.end()) continue;
                const auto b = static_cast<std::size_t>(it - sl.begin());
                const Rational ck = ScalarTraits<Rational>::from_double(sys.coefficients[k][a]);
                const Rational cl = ScalarTraits<Rational>::from_double(sys.coefficients[l][b]);
                if (ck == 0 || cl == 0) continue;
                // cl * f_k - ck * f_l
                std::vector<std::pair<const std::vector<Rational>*, Rational>> terms;
                for (std::size_t j = 0; j < sk.size(); ++j)
                    terms.emplace_back(&sk[j], cl * ScalarTraits<Rational>::from_double(sys.coefficients[k][j]));
                for (std::size_t j = 0; j < sl.size(); ++j) {
                    const Rational v = -ck * ScalarTraits<Rational>::from_double(sys.coefficients[l][j]);
                    auto hit = std::find_if(terms.begin(), terms.end(), [&](const auto& t) { return *t.first == sl[j]; });
                    if (hit != terms.end()) {
                        hit->second += v;
                    } else {
                        terms.emplace_back(&sl[j], v);
                    }
                }
                ExpSum eq;
                for (const auto& [ex, c] : terms) {
                    if (c == 0) continue;
                    std::vector<double> alpha;
                    for (const auto& x : *ex) alpha.push_back(to_double(x));
                    const Rational mag = c < 0 ? Rational(-c) : c;
                    eq.push_back({log(Interval::around(mag.convert_to<double>(), 1)), c > 0 ? 1 : -1, alpha});
                }
                if (!eq.empty()) out.push_back(std::move(eq));
            }
        }
    return out;
}

/// True if some equation's enclosure over the box excludes zero.
inline bool box_excluded(const std::vector<ExpSum>& eqs, const Box& x) {
    const auto c = x.mid();
    for (const auto& eq : eqs) {
        const auto st = scaled_terms(eq, x, c);
        Interval v(0.0);
        for (std::size_t j = 0; j < eq.size(); ++j) v += Interval(eq[j].sign) * st.values[j];
        if (v.sign() != 0) return true;
    }
    return false;
}

}  // namespace detail

/// Certified count of zeros inside the given pieces.
inline CountResult krawczyk_count(const FewnomialSystem& sys, const TruncationRegion& region,
                                  const CountOptions& opts = {}) {
    CountResult out;
    out.method = "krawczyk";
    if (region.span_deficient) {
        out.certified = true;
        out.method = "span-deficient";
        return out;
    }
    const std::size_t n = sys.n();
    const auto eqs = detail::log_terms(sys);
    const auto derived = detail::eliminated_equations(sys);
    std::vector<detail::Certificate> zeros;
    std::vector<Box> regions;  // uniqueness regions of counted zeros
    bool certified = true;

    struct Item {
        Box box;
        int depth;
    };
    std::vector<Item> work;
    for (const auto& piece : region.pieces) {
        Box b = piece.box;
        // cap infinite sides, proving the cut-off tails zero-free
        bool capped = true;
        for (std::size_t i = 0; i < n && capped; ++i) {
            for (int side = 0; side < 2 && capped; ++side) {
                const double cur = side == 0 ? b.coords[i].lo() : b.coords[i].hi();
                if (std::isfinite(cur)) continue;
                const double other = side == 0 ? b.coords[i].hi() : b.coords[i].lo();
                const double base = std::isfinite(other) ? other : 0.0;
                double reach = 16.0;
                bool ok = false;
                double cap = base;
                for (int tries = 0; tries < 8 && !ok; ++tries, reach *= 2.0) {
                    cap = side == 0 ? base - reach : base + reach;
                    std::vector<double> row(n, 0.0);
                    row[i] = side == 0 ? 1.0 : -1.0;  // tail: y_i <= cap or y_i >= cap
                    ok = detail::tail_excluded(eqs, derived, piece, row, side == 0 ? cap : -cap);
                }
                if (!ok) {
                    capped = false;
                    break;
                }
                b.coords[i] = side == 0 ? Interval(cap, b.coords[i].hi()) : Interval(b.coords[i].lo(), cap);
            }
        }
        if (!capped) {
            certified = false;
            out.undecided_boxes.push_back(piece.box);
            continue;
        }
        if (!b.finite()) {
            certified = false;
            out.undecided_boxes.push_back(b);
            continue;
        }
        work.push_back({b, 0});
    }
    std::reverse(work.begin(), work.end());

    auto record = [&](const Box& region_box, const Box& image) {
        const auto cert = detail::refine_certificate(eqs, region_box, image);
        for (const auto& z : zeros) {
            if (cert.enclosure.subset_of(z.region) || z.enclosure.subset_of(cert.region)) {
                regions.push_back(cert.region);
                return;
            }
        }
        for (const auto& z : zeros) {
            if (!cert.enclosure.intersects(z.enclosure)) continue;
            // overlapping tight enclosures: try to prove they hold the same zero
            Box h = hull(cert.enclosure, z.enclosure);
            for (auto& c : h.coords) {
                const double pad = std::max(c.width(), 1e-12);
                c = Interval(c.lo() - pad, c.hi() + pad);
            }
            const auto s = detail::krawczyk_step(eqs, h);
            if (s.outcome == detail::KrawczykStep::unique) {
                regions.push_back(cert.region);
                return;
            }
            certified = false;
            out.undecided_boxes.push_back(h);
            return;
        }
        zeros.push_back(cert);
        regions.push_back(cert.region);
    };

    while (!work.empty()) {
        Item it = work.back();
        work.pop_back();
        bool covered = false;
        for (const auto& r : regions)
            if (it.box.subset_of(r)) {
                covered = true;
                break;
            }
        if (covered) continue;
        if (detail::box_excluded(derived, it.box)) continue;

        Box x = it.box;
        bool done = false;
        for (int contraction = 0; contraction < 4 && !done; ++contraction) {
            const auto s = detail::krawczyk_step(eqs, x);
            if (s.outcome == detail::KrawczykStep::excluded) {
                done = true;
            } else if (s.outcome == detail::KrawczykStep::unique) {
                record(x, s.image);
                done = true;
            } else if (s.outcome == detail::KrawczykStep::contracted) {
                // K(X) holds every zero of X; a slightly inflated copy often
                // proves uniqueness when K is pinned against a face of X
                Box inflated = s.image;
                for (auto& c : inflated.coords) {
                    const double pad = 0.1 * c.width() + 1e-9 * (1.0 + std::abs(c.mid()));
                    c = Interval(c.lo() - pad, c.hi() + pad);
                }
                const auto e = detail::krawczyk_step(eqs, inflated);
                if (e.outcome == detail::KrawczykStep::excluded) {
                    done = true;
                    break;
                }
                if (e.outcome == detail::KrawczykStep::unique) {
                    record(inflated, e.image);
                    done = true;
                    break;
                }
                bool good = false;
                for (std::size_t i = 0; i < n; ++i)
                    if (s.image.coords[i].width() < 0.75 * x.coords[i].width()) good = true;
                x = s.image;
                if (!good) break;
            } else {
                break;
            }
        }
        if (done) continue;
        if (it.depth >= opts.max_depth || x.max_width() <= opts.tol) {
            certified = false;
            out.undecided_boxes.push_back(x);
            continue;
        }
        std::size_t widest = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (x.coords[i].width() > x.coords[widest].width()) widest = i;
        const double m = x.coords[widest].mid();
        Box left = x, right = x;
        left.coords[widest] = Interval(x.coords[widest].lo(), m);
        right.coords[widest] = Interval(m, x.coords[widest].hi());
        work.push_back({right, it.depth + 1});
        work.push_back({left, it.depth + 1});
    }

    out.count = static_cast<int>(zeros.size());
    out.certified = certified;
    for (const auto& z : zeros) {
        auto p = z.enclosure.mid();
        // Newton polish, kept inside the certified enclosure
        for (int iter = 0; iter < 50; ++iter) {
            const auto ev = eval_log(sys, p);
            const Eigen::VectorXd step = ev.jacobian.fullPivLu().solve(ev.values);
            if (!step.allFinite()) break;
            auto q = p;
            bool inside = true;
            for (std::size_t i = 0; i < n; ++i) {
                q[i] -= step[static_cast<Eigen::Index>(i)];
                inside = inside && z.enclosure.coords[i].contains(q[i]);
            }
            if (!inside) break;
            p = q;
            if (step.norm() <= 1e-15 * (1.0 + Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(n)).norm()))
                break;
        }
        out.zero_points.push_back(p);
    }
    return out;
}

// -------------------------------------------------- unmixed, t <= n + 2 supports

namespace detail {

using RatMatrix = std::vector<std::vector<Rational>>;

/// Basis of the right kernel, by exact reduced row echelon form.
inline RatMatrix kernel_basis(RatMatrix m, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
        std::size_t p = row;
        while (p < m.size() && m[p][col] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[row]);
        const Rational inv = 1 / m[row][col];
        for (auto& v : m[row]) v *= inv;
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col] == 0) continue;
            const Rational f = m[r][col];
            for (std::size_t c = 0; c < cols; ++c) m[r][c] -= f * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    RatMatrix basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
        std::vector<Rational> v(cols, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline Interval to_interval(const Rational& q) {
    if (q == 0) return Interval(0.0);
    return Interval::around(q.convert_to<double>(), 1);
}

/// Column order of equation k relative to equation 0, or nullopt if the sets differ.
inline std::optional<std::vector<std::size_t>> align_support(const SystemSpec& spec, std::size_t k) {
    const auto& ref = spec.equations[0].support;
    const auto& s = spec.equations[k].support;
    if (s.size() != ref.size()) return std::nullopt;
    std::vector<std::size_t> map(s.size());
    for (std::size_t a = 0; a < s.size(); ++a) {
        const auto it = std::find(ref.begin(), ref.end(), s[a]);
        if (it == ref.end()) return std::nullopt;
        map[a] = static_cast<std::size_t>(it - ref.begin());
    }
    return map;
}

/// y with ln m_j = const + a_j·y, by least squares over the consistent system.
inline std::vector<double> log_point_from_monomials(const SystemSpec& spec, const std::vector<double>& log_m) {
    const auto& sup = spec.equations[0].support;
    const std::size_t n = spec.n;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(sup.size() - 1), static_cast<Eigen::Index>(n));
    Eigen::VectorXd b(static_cast<Eigen::Index>(sup.size() - 1));
    for (std::size_t j = 1; j < sup.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i)
            a(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(i)) = to_double(sup[j][i] - sup[0][i]);
        b[static_cast<Eigen::Index>(j - 1)] = log_m[j] - log_m[0];
    }
    const Eigen::VectorXd y = a.colPivHouseholderQr().solve(b);
    return std::vector<double>(y.data(), y.data() + y.size());
}

}  // namespace detail

/// True when every equation has the same support set.
inline bool is_unmixed(const SystemSpec& spec) {
    for (std::size_t k = 1; k < spec.n; ++k)
        if (!detail::align_support(spec, k)) return false;
    return true;
}

/// Unmixed systems with t = n + 1 or t = n + 2 monomials. Writing m_j = x^{a_j},
/// the system is linear in m: C m = 0. Positive zeros are the positive kernel
/// rays of C that satisfy the monomial relation prod m_j^{lambda_j} = 1, where
/// lambda spans the affine dependencies of the support.
inline CountResult count_unmixed_small(const FewnomialSystem& sys, const CountOptions& opts = {}) {
    const std::size_t n = sys.n();
    const auto& spec = sys.spec;
    const std::size_t t = spec.equations[0].support.size();
    if (!is_unmixed(spec) || t < n + 1 || t > n + 2)
        throw std::invalid_argument("count_unmixed_small needs an unmixed system with n+1 or n+2 monomials");
    CountResult out;
    out.method = "unmixed-reduction";
    if (affine_span_dimension(spec.supports<Rational>()) < n) {
        out.certified = true;
        out.method = "span-deficient";
        return out;
    }

    detail::RatMatrix c(n, std::vector<Rational>(t, Rational(0)));
    for (std::size_t k = 0; k < n; ++k) {
        const auto map = *detail::align_support(spec, k);
        for (std::size_t a = 0; a < t; ++a) c[k][map[a]] = ScalarTraits<Rational>::from_double(sys.coefficients[k][a]);
    }
    const auto ker = detail::kernel_basis(c, t);
    const std::size_t expected = t - n;
    if (ker.size() != expected) {
        out.undecided_boxes.push_back(Box{std::vector<Interval>(n, Interval::entire())});
        return out;  // rank-deficient coefficients: a measure-zero event
    }

    if (t == n + 1) {
        const auto& v = ker[0];
        int s = 0;
        bool same = true;
        for (const auto& x : v) {
            const int sx = x > 0 ? 1 : (x < 0 ? -1 : 0);
            if (sx == 0 || (s != 0 && sx != s)) same = false;
            s = sx;
        }
        out.certified = true;
        if (same) {
            out.count = 1;
            std::vector<double> lm;
            for (const auto& x : v) lm.push_back(std::log(std::abs(x.convert_to<double>())));
            out.zero_points.push_back(detail::log_point_from_monomials(spec, lm));
        }
        return out;
    }

    // t = n + 2: two-dimensional kernel span{P, Q}
    const auto& p = ker[0];
    const auto& q = ker[1];
    for (std::size_t j = 0; j < t; ++j)
        if (p[j] == 0 && q[j] == 0) {
            out.certified = true;  // m_j vanishes on the whole kernel
            return out;
        }
    // extreme rays of the cone {m >= 0} ∩ span{P, Q}
    std::vector<std::vector<Rational>> rays;
    for (std::size_t j = 0; j < t; ++j) {
        std::vector<Rational> r(t);
        for (std::size_t i = 0; i < t; ++i) r[i] = q[j] * p[i] - p[j] * q[i];
        for (int sgn : {1, -1}) {
            std::vector<Rational> cand = r;
            Rational mx(0);
            bool nonneg = true;
            for (auto& x : cand) {
                x *= sgn;
                if (x < 0) nonneg = false;
                mx = std::max(mx, x);
            }
            if (!nonneg || mx == 0) continue;
            for (auto& x : cand) x /= mx;
            if (std::find(rays.begin(), rays.end(), cand) == rays.end()) rays.push_back(cand);
        }
    }
    if (rays.size() < 2) {
        out.certified = true;  // the positive part of the kernel is empty or a boundary ray
        return out;
    }
    if (rays.size() > 2) {
        out.undecided_boxes.push_back(Box{std::vector<Interval>(n, Interval::entire())});
        return out;
    }
    const auto& r1 = rays[0];
    const auto& r2 = rays[1];
    for (std::size_t j = 0; j < t; ++j)
        if (r1[j] + r2[j] == 0) {
            out.certified = true;
            return out;
        }

    // affine dependency lambda of the support: sum lambda_j a_j = 0, sum lambda_j = 0
    detail::RatMatrix aff(n + 1, std::vector<Rational>(t));
    for (std::size_t j = 0; j < t; ++j) {
        for (std::size_t i = 0; i < n; ++i) aff[i][j] = spec.equations[0].support[j][i];
        aff[n][j] = 1;
    }
    const auto lam_basis = detail::kernel_basis(aff, t);
    if (lam_basis.size() != 1) {
        out.undecided_boxes.push_back(Box{std::vector<Interval>(n, Interval::entire())});
        return out;
    }
    const auto& lam = lam_basis[0];

    // phi(s) = sum_j lambda_j ln m_j(s), m(s) = (1 - s) r1 + s r2, s in (0, 1)
    //        = L0 ln s + L1 ln(1 - s) + h(s), h smooth on [0, 1]
    Rational l0(0), l1(0);
    Interval h0(0.0);
    struct Smooth {
        Interval lambda, base, delta;  // lambda_j, r1_j, r2_j - r1_j
    };
    std::vector<Smooth> smooth;
    for (std::size_t j = 0; j < t; ++j) {
        if (lam[j] == 0) continue;
        if (r1[j] == 0) {
            l0 += lam[j];
            h0 += detail::to_interval(lam[j]) * log(detail::to_interval(r2[j]));
        } else if (r2[j] == 0) {
            l1 += lam[j];
            h0 += detail::to_interval(lam[j]) * log(detail::to_interval(r1[j]));
        } else {
            smooth.push_back({detail::to_interval(lam[j]), detail::to_interval(r1[j]),
                              detail::to_interval(Rational(r2[j] - r1[j]))});
        }
    }
    const Interval il0 = detail::to_interval(l0), il1 = detail::to_interval(l1);
    const bool sing0 = l0 != 0, sing1 = l1 != 0;

    detail::Function1D f;
    f.value = [&](const Interval& s) {
        if ((sing0 && s.lo() <= 0.0) || (sing1 && s.hi() >= 1.0)) return Interval::entire();
        Interval v = h0;
        if (sing0) v += il0 * log(s);
        if (sing1) {
            const Interval one_minus = Interval(1.0) - s;
            if (one_minus.lo() <= 0.0) return Interval::entire();
            v += il1 * log(one_minus);
        }
        for (const auto& sm : smooth) {
            const Interval m = sm.base + s * sm.delta;
            if (m.lo() <= 0.0) return Interval::entire();
            v += sm.lambda * log(m);
        }
        return v;
    };
    f.slope = [&](const Interval& s) {
        // (s^[L0 != 0] (1 - s)^[L1 != 0]) · phi'(s)
        const Interval one_minus = Interval(1.0) - s;
        Interval v(0.0);
        if (sing0) v += il0 * (sing1 ? one_minus : Interval(1.0));
        if (sing1) v -= il1 * (sing0 ? s : Interval(1.0));
        Interval w(1.0);
        if (sing0) w *= s;
        if (sing1) w *= one_minus;
        Interval hp(0.0);
        for (const auto& sm : smooth) {
            const Interval m = sm.base + s * sm.delta;
            if (m.lo() <= 0.0) return Interval::entire();
            hp += sm.lambda * sm.delta / m;
        }
        return v + w * hp;
    };
    // ln s -> -inf at s = 0, ln(1 - s) -> -inf at s = 1
    f.sign_near_lo = sing0 ? (l0 > 0 ? -1 : 1) : 0;
    f.sign_near_hi = sing1 ? (l1 > 0 ? -1 : 1) : 0;

    const auto iso = detail::isolate_1d(f, 0.0, 1.0, opts);
    out.count = iso.count;
    out.certified = iso.certified;
    if (!iso.undecided.empty()) out.undecided_boxes.push_back(Box{std::vector<Interval>(n, Interval::entire())});
    for (const auto& r : iso.roots) {
        const double s = detail::polish_root_1d(f, r, 0.0, 1.0);
        std::vector<double> lm;
        for (std::size_t j = 0; j < t; ++j)
            lm.push_back(std::log((1.0 - s) * r1[j].convert_to<double>() + s * r2[j].convert_to<double>()));
        out.zero_points.push_back(detail::log_point_from_monomials(spec, lm));
    }
    return out;
}

/// Positive zeros of the system, x = e^y. Undecided parts are reported, never guessed.
inline CountResult count_positive_zeros(const FewnomialSystem& sys, const CountOptions& opts = {}) {
    if (sys.n() == 1) return count_univariate(sys, opts);
    const auto eqs = detail::log_terms(sys);
    for (const auto& eq : eqs)
        if (!detail::has_sign_change(eq)) {
            CountResult out;
            out.certified = true;
            out.method = "no-sign-change";
            return out;
        }
    const std::size_t t = sys.spec.equations[0].support.size();
    if (is_unmixed(sys.spec) && (t == sys.n() + 1 || t == sys.n() + 2)) return count_unmixed_small(sys, opts);
    return krawczyk_count(sys, truncation_region(sys, opts.tol), opts);
}

}  // namespace fewzeros
