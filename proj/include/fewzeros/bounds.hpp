#pragma once

// Closed-form upper bounds on the expected number of positive zeros of
// random fewnomial systems, together with the side conditions each of them
// needs before it may be reported.

#include "fewzeros/geometry.hpp"
#include "fewzeros/system_spec.hpp"

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fewzeros {

/// 4^{-n} prod_k t_k (t_k - 1): the variance-free bound.
inline double bound_kushnirenko(const std::vector<std::size_t>& t, std::size_t n) {
    double value = std::pow(4.0, -static_cast<double>(n));
    for (std::size_t tk : t) {
        if (tk < 1) throw std::invalid_argument("support sizes must be at least 1");
        value *= static_cast<double>(tk) * static_cast<double>(tk - 1);
    }
    return value;
}

/// Lifting values 1/2 ln v per exponent. In exact mode a unit variance lifts
/// to exactly 0 and every other value is the exact rational of the double.
template <class T>
std::vector<Lifting<T>> lifting_from_variances(const SystemSpec& spec) {
    std::vector<Lifting<T>> out;
    for (const auto& eq : spec.equations) {
        Lifting<T> l;
        for (const auto& v : eq.variances) {
            if (!(v > 0)) throw std::invalid_argument("variances must be positive");
            if (v == 1) {
                l.values.push_back(T(0));
            } else {
                l.values.push_back(ScalarTraits<T>::from_double(0.5 * std::log(to_double(v))));
            }
        }
        out.push_back(std::move(l));
    }
    return out;
}

namespace detail {

inline double product_t_minus_one(const std::vector<std::size_t>& t) {
    double p = 1.0;
    for (std::size_t tk : t) p *= static_cast<double>(tk) - 1.0;
    return p;
}

template <class T>
std::size_t lifted_vertex_count(const SystemSpec& spec) {
    return minkowski_sum_vertex_count(spec.supports<T>(), lifting_from_variances<T>(spec));
}

template <class T>
std::size_t polytope_sum_vertex_count(const SystemSpec& spec) {
    auto supports = spec.supports<T>();
    std::vector<Lifting<T>> zero;
    for (const auto& s : supports) zero.push_back(zero_lifting(s));
    return minkowski_sum_vertex_count(supports, zero);
}

inline bool variance_equals_one(const Rational& v, GeometryMode mode) {
    if (mode == GeometryMode::exact) return v == 1;
    return std::abs(to_double(v) - 1.0) <= 1e-12;
}

inline bool variance_at_most_one(const Rational& v, GeometryMode mode) {
    if (mode == GeometryMode::exact) return v <= 1;
    return to_double(v) <= 1.0 + 1e-12;
}

}  // namespace detail

/// V of the Minkowski sum of the variance-lifted envelopes, in the spec's mode.
inline std::size_t lifted_vertex_count(const SystemSpec& spec) {
    return spec.mode == GeometryMode::exact ? detail::lifted_vertex_count<Rational>(spec)
                                            : detail::lifted_vertex_count<double>(spec);
}

/// 4^{-n} V(sum of lifted envelopes) prod_k (t_k - 1).
inline double bound_lifted(const SystemSpec& spec) {
    spec.validate();
    const auto t = spec.sizes();
    if (std::any_of(t.begin(), t.end(), [](std::size_t x) { return x == 1; })) return 0.0;
    return std::pow(4.0, -static_cast<double>(spec.n)) * static_cast<double>(lifted_vertex_count(spec)) *
           detail::product_t_minus_one(t);
}

/// Per-equation check of the variance conditions: every variance at most 1,
/// and exactly 1 on every vertex of conv(A_k).
inline std::vector<bool> check_vm(const SystemSpec& spec) {
    std::vector<bool> ok;
    for (std::size_t k = 0; k < spec.equations.size(); ++k) {
        const auto& eq = spec.equations[k];
        bool pass = std::all_of(eq.variances.begin(), eq.variances.end(),
                                [&](const Rational& v) { return detail::variance_at_most_one(v, spec.mode); });
        if (pass) {
            std::vector<std::size_t> vertices;
            if (spec.mode == GeometryMode::exact) {
                auto s = spec.supports<Rational>()[k];
                vertices = envelope_vertices(s, zero_lifting(s)).vertex_indices;
            } else {
                auto s = spec.supports<double>()[k];
                vertices = envelope_vertices(s, zero_lifting(s)).vertex_indices;
            }
            for (std::size_t i : vertices)
                if (!detail::variance_equals_one(eq.variances[i], spec.mode)) pass = false;
        }
        ok.push_back(pass);
    }
    return ok;
}

/// 4^{-n} V(sum of conv(A_k)) prod (t_k - 1); nullopt when the variance conditions fail.
inline std::optional<double> bound_polytope(const SystemSpec& spec) {
    spec.validate();
    const auto vm = check_vm(spec);
    if (!std::all_of(vm.begin(), vm.end(), [](bool b) { return b; })) return std::nullopt;
    const auto t = spec.sizes();
    if (std::any_of(t.begin(), t.end(), [](std::size_t x) { return x == 1; })) return 0.0;
    const std::size_t v = spec.mode == GeometryMode::exact ? detail::polytope_sum_vertex_count<Rational>(spec)
                                                           : detail::polytope_sum_vertex_count<double>(spec);
    return std::pow(4.0, -static_cast<double>(spec.n)) * static_cast<double>(v) * detail::product_t_minus_one(t);
}

enum class MvStatus { satisfied, violated, undetermined, not_unmixed };

inline const char* to_string(MvStatus s) {
    switch (s) {
        case MvStatus::satisfied: return "satisfied";
        case MvStatus::violated: return "violated";
        case MvStatus::undetermined: return "undetermined";
        case MvStatus::not_unmixed: return "not unmixed";
    }
    return "?";
}

struct UnmixedBound {
    std::optional<double> value;
    MvStatus status = MvStatus::not_unmixed;
    std::size_t vertex_count = 0;  // V(L(A, pi)) used in the formula
    std::string reason;
};

namespace detail {

// Reorders every equation to the exponent order of the first one.
// Returns nullopt when the supports are not equal as sets.
inline std::optional<SystemSpec> aligned_unmixed(const SystemSpec& spec) {
    SystemSpec out = spec;
    const auto& base = spec.equations.front().support;
    for (std::size_t k = 1; k < spec.equations.size(); ++k) {
        const auto& eq = spec.equations[k];
        if (eq.support.size() != base.size()) return std::nullopt;
        EquationSpec aligned;
        for (const auto& alpha : base) {
            auto it = std::find(eq.support.begin(), eq.support.end(), alpha);
            if (it == eq.support.end()) return std::nullopt;
            aligned.support.push_back(alpha);
            aligned.variances.push_back(eq.variances[static_cast<std::size_t>(it - eq.support.begin())]);
        }
        out.equations[k] = std::move(aligned);
    }
    return out;
}

// V vertex cells, each contributing at most C(t-1, n) binomial summands of
// mass 4^{-n}. Equals (n+1) 4^{-n} C(t, n+1) when V = t.
inline double unmixed_formula(std::size_t n, std::size_t v, std::size_t t) {
    if (t < n + 1) return 0.0;
    return static_cast<double>(v) * std::pow(4.0, -static_cast<double>(n)) *
           boost::math::binomial_coefficient<double>(static_cast<unsigned>(t - 1), static_cast<unsigned>(n));
}

template <class T>
UnmixedBound unmixed_from_cells(const SystemSpec& aligned) {
    const auto supports = aligned.supports<T>();
    const auto liftings = lifting_from_variances<T>(aligned);
    const auto cells = enumerate_full_cells(supports, liftings);
    UnmixedBound out;
    bool close_call = false;
    for (const auto& c : cells) {
        if (!is_diagonal(c.label, supports)) {
            if constexpr (!ScalarTraits<T>::exact) {
                if (c.margin <= 1e3 * ScalarTraits<T>::vertex_tol()) {
                    close_call = true;
                    continue;
                }
            }
            out.status = MvStatus::violated;
            out.reason = "a full-dimensional cell has a non-diagonal label";
            return out;
        }
    }
    if (close_call) {
        out.status = MvStatus::undetermined;
        out.reason = "a non-diagonal cell has an LP margin within rounding of zero";
        return out;
    }
    out.status = MvStatus::satisfied;
    out.vertex_count = cells.size();
    out.reason = "every full-dimensional cell is diagonal; the averaged lifting realises the sum";
    out.value = unmixed_formula(aligned.n, out.vertex_count, aligned.equations[0].support.size());
    return out;
}

}  // namespace detail

/// V(L(A, pi)) C(t-1, n) / 4^n for unmixed systems whose lifted envelopes sum
/// to a dilate of a single envelope; this is (n+1) 4^{-n} C(t, n+1) whenever
/// all t lifted exponents are envelope vertices. Applicability is decided by equal variance
/// vectors, by the variance conditions, or else by inspecting the labels of
/// all full-dimensional cells.
inline UnmixedBound bound_unmixed(const SystemSpec& spec) {
    spec.validate();
    UnmixedBound out;
    auto aligned = detail::aligned_unmixed(spec);
    if (!aligned) {
        out.reason = "supports are not all equal";
        return out;
    }
    const bool exact = spec.mode == GeometryMode::exact;

    bool equal_variances = true;
    for (std::size_t k = 1; k < aligned->equations.size(); ++k) {
        for (std::size_t i = 0; i < aligned->equations[k].variances.size(); ++i) {
            const Rational& a = aligned->equations[0].variances[i];
            const Rational& b = aligned->equations[k].variances[i];
            if (exact ? a != b : std::abs(to_double(a) - to_double(b)) > 1e-12 * to_double(a)) equal_variances = false;
        }
    }
    if (equal_variances) {
        SystemSpec single = *aligned;
        single.n = aligned->n;
        std::size_t v;
        if (exact) {
            auto s = single.supports<Rational>()[0];
            v = envelope_vertices(s, lifting_from_variances<Rational>(single)[0]).vertex_indices.size();
        } else {
            auto s = single.supports<double>()[0];
            v = envelope_vertices(s, lifting_from_variances<double>(single)[0]).vertex_indices.size();
        }
        out.status = MvStatus::satisfied;
        out.vertex_count = v;
        out.reason = "all variance vectors are equal";
        out.value = detail::unmixed_formula(spec.n, v, aligned->equations[0].support.size());
        return out;
    }

    const auto vm = check_vm(*aligned);
    if (std::all_of(vm.begin(), vm.end(), [](bool b) { return b; })) {
        std::size_t v = exact ? polytope_vertex_count(aligned->supports<Rational>()[0])
                              : polytope_vertex_count(aligned->supports<double>()[0]);
        out.status = MvStatus::satisfied;
        out.vertex_count = v;
        out.reason = "variances satisfy the vertex conditions";
        out.value = detail::unmixed_formula(spec.n, v, aligned->equations[0].support.size());
        return out;
    }

    return exact ? detail::unmixed_from_cells<Rational>(*aligned) : detail::unmixed_from_cells<double>(*aligned);
}

/// min(1, l (n+1)^l / 4^n): probability that a random circuit-like system
/// with #A = n + l has a positive zero.
inline double prob_bound_circuit(unsigned ell, unsigned n) {
    if (ell < 1 || n < 1) throw std::invalid_argument("ell and n must be positive");
    const double v = ell * std::pow(static_cast<double>(n + 1), ell) * std::pow(4.0, -static_cast<double>(n));
    return std::clamp(v, 0.0, 1.0);
}

/// Riemannian volume of real projective k-space: pi^{(k+1)/2} / Gamma((k+1)/2).
inline double projective_volume(unsigned k) {
    const double h = 0.5 * (k + 1.0);
    return std::pow(boost::math::constants::pi<double>(), h) / std::tgamma(h);
}

struct VolumeBound {
    double value = 0.0;
    std::vector<std::string> warnings;
};

/// Degree-free bound on the expected (n-q)-volume of a random projective
/// fewnomial variety cut out by q equations with t_k terms each.
inline VolumeBound volume_bound_fewnomial(const std::vector<std::size_t>& t, unsigned n, unsigned q) {
    if (q > n) throw std::invalid_argument("q must not exceed n");
    if (t.size() != q) throw std::invalid_argument("expected one support size per equation");
    for (std::size_t tk : t)
        if (tk < n + 1) throw std::invalid_argument("each support must contain the n+1 pure powers (t_k >= n+1)");
    VolumeBound out;
    double value = projective_volume(n - q) / projective_volume(n);
    value *= std::pow(static_cast<double>(n) * (n + 1.0), static_cast<double>(n - q)) / std::pow(2.0, n);
    for (std::size_t tk : t) value *= static_cast<double>(tk) * (tk - 1.0);
    out.value = value;
    if (q == n)
        out.warnings.push_back(
            "q = n: the zero set is finite and this formula is below the exact count of simple cases "
            "(n = q = 1, t = 2 has exactly one projective zero); treat the value as unverified");
    return out;
}

/// Expected (n-q)-volume of a Kostlan-Shub-Smale system of the given degrees.
inline double volume_shub_smale(const std::vector<unsigned>& degrees, unsigned n, unsigned q) {
    if (q > n) throw std::invalid_argument("q must not exceed n");
    if (degrees.size() != q) throw std::invalid_argument("expected one degree per equation");
    double prod = 1.0;
    for (unsigned d : degrees) {
        if (d == 0) throw std::invalid_argument("degrees must be positive");
        prod *= d;
    }
    return projective_volume(n - q) / projective_volume(n) * std::sqrt(prod);
}

/// Support-size threshold below which the fewnomial volume bound is claimed
/// to beat the Shub-Smale value: 2^{n/q} / (n(n+1))^{n/q-1} sqrt(d).
inline double shub_smale_crossover_threshold(unsigned n, unsigned q, unsigned d) {
    if (q == 0 || q > n) throw std::invalid_argument("need 1 <= q <= n");
    const double r = static_cast<double>(n) / q;
    return std::pow(2.0, r) / std::pow(static_cast<double>(n) * (n + 1.0), r - 1.0) * std::sqrt(static_cast<double>(d));
}

struct BoundReport {
    double kushnirenko = 0.0;
    double lifted = 0.0;
    std::size_t lifted_vertex_count = 0;
    std::optional<double> polytope;
    std::optional<double> unmixed;
    MvStatus mv_status = MvStatus::not_unmixed;
    std::size_t affine_span = 0;
    std::vector<std::string> notes;
};

inline BoundReport compute_bounds(const SystemSpec& spec) {
    spec.validate();
    BoundReport r;
    const auto t = spec.sizes();
    r.kushnirenko = bound_kushnirenko(t, spec.n);
    r.lifted_vertex_count = lifted_vertex_count(spec);
    r.lifted = bound_lifted(spec);
    r.affine_span = spec.mode == GeometryMode::exact ? affine_span_dimension(spec.supports<Rational>())
                                                     : affine_span_dimension(spec.supports<double>());
    if (r.affine_span < spec.n)
        r.notes.push_back("affine span of the summed supports has dimension " + std::to_string(r.affine_span) +
                          " < n: the system has no positive zeros with probability one");

    r.polytope = bound_polytope(spec);
    if (!r.polytope) r.notes.push_back("polytope bound inapplicable: variance conditions VM1/VM2 fail");

    const auto u = bound_unmixed(spec);
    r.mv_status = u.status;
    r.unmixed = u.value;
    if (u.status == MvStatus::not_unmixed) {
        r.notes.push_back("unmixed bound inapplicable: " + u.reason);
    } else {
        r.notes.push_back(std::string("MV condition ") + to_string(u.status) + ": " + u.reason);
    }
    r.notes.push_back(std::string("geometry mode: ") + to_string(spec.mode));
    return r;
}

}  // namespace fewzeros
