#pragma once

// Polyhedral side of the bounds: upper envelopes of lifted supports,
// cells of the induced regular mixed subdivision, and the vertex count of
// the Minkowski sum of the envelopes.
//
// Everything is templated on the scalar. With Rational every vertex and
// full-dimensionality decision is exact; with double the decisions use a
// strict LP margin above ScalarTraits<double>::vertex_tol().

#include "fewzeros/lp.hpp"
#include "fewzeros/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

namespace fewzeros {

/// A finite set of distinct exponent vectors in R^dim.
template <class T>
class Support {
public:
    Support() = default;

    Support(std::size_t dim, Vec<Vec<T>> exponents) : dim_(dim), exponents_(std::move(exponents)) {
        if (dim_ == 0) throw std::invalid_argument("support dimension must be positive");
        if (exponents_.empty()) throw std::invalid_argument("support must contain at least one exponent");
        for (const auto& e : exponents_)
            if (e.size() != dim_) throw std::invalid_argument("exponent vector has wrong dimension");
        for (std::size_t i = 0; i < exponents_.size(); ++i)
            for (std::size_t j = i + 1; j < exponents_.size(); ++j)
                if (same_point(exponents_[i], exponents_[j]))
                    throw std::invalid_argument("duplicate exponent at indices " + std::to_string(i) + " and " +
                                                std::to_string(j));
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return exponents_.size(); }
    const Vec<Vec<T>>& exponents() const { return exponents_; }
    const Vec<T>& operator[](std::size_t i) const { return exponents_[i]; }

    friend bool operator==(const Support& a, const Support& b) {
        return a.dim_ == b.dim_ && a.exponents_ == b.exponents_;
    }

private:
    static bool same_point(const Vec<T>& a, const Vec<T>& b) {
        if constexpr (ScalarTraits<T>::exact) {
            return a == b;
        } else {
            for (std::size_t i = 0; i < a.size(); ++i)
                if (std::abs(a[i] - b[i]) > 1e-12 * (1.0 + std::abs(a[i]))) return false;
            return true;
        }
    }

    std::size_t dim_ = 0;
    Vec<Vec<T>> exponents_;
};

/// One lifting value per exponent of the owning support.
template <class T>
struct Lifting {
    Vec<T> values;
};

template <class T>
Lifting<T> zero_lifting(const Support<T>& support) {
    return {Vec<T>(support.size(), T(0))};
}

template <class T>
struct UpperEnvelope {
    Support<T> support;
    Lifting<T> lifting;
    std::vector<std::size_t> vertex_indices;
    Vec<T> margins;  // LP optimum delta* per exponent index (capped at 1)
};

struct CellLabel {
    std::vector<std::size_t> indices;  // one exponent index per equation

    friend bool operator==(const CellLabel&, const CellLabel&) = default;
};

template <class T>
struct Inequality {
    Vec<T> normal;
    T rhs{};
};

/// The polyhedron of directions z for which every chosen lifted exponent is
/// a maximiser of z·alpha + lift(alpha) within its own support.
template <class T>
struct Cell {
    CellLabel label;
    Vec<Inequality<T>> inequalities;
    T margin{};
    bool full_dimensional = false;
    Vec<T> witness;  // a point of the cell realising the margin

    bool contains(const Vec<T>& z) const {
        for (const auto& ineq : inequalities) {
            T lhs(0);
            for (std::size_t i = 0; i < z.size(); ++i) lhs += ineq.normal[i] * z[i];
            if (lhs > ineq.rhs) return false;
        }
        return true;
    }

    /// Containment with slack, for float-valued query points.
    bool contains_approx(const std::vector<double>& z, double slack) const {
        for (const auto& ineq : inequalities) {
            double lhs = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) lhs += to_double(ineq.normal[i]) * z[i];
            if (lhs > to_double(ineq.rhs) + slack) return false;
        }
        return true;
    }
};

class GeometryError : public std::runtime_error {
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

template <class T>
void check_same_dimension(const std::vector<Support<T>>& supports) {
    if (supports.empty()) throw std::invalid_argument("empty support list");
    for (const auto& s : supports)
        if (s.dim() != supports.front().dim()) throw std::invalid_argument("supports differ in dimension");
}

template <class T>
void check_liftings(const std::vector<Support<T>>& supports, const std::vector<Lifting<T>>& liftings) {
    if (supports.size() != liftings.size()) throw std::invalid_argument("one lifting per support is required");
    for (std::size_t k = 0; k < supports.size(); ++k)
        if (liftings[k].values.size() != supports[k].size())
            throw std::invalid_argument("lifting " + std::to_string(k) + " has wrong length");
}

// Constraint rows (alpha - alpha_k)·z <= lift(alpha_k) - lift(alpha) for one support.
template <class T>
void append_exposure_rows(const Support<T>& support, const Lifting<T>& lifting, std::size_t chosen,
                          Vec<Vec<T>>& rows, Vec<T>& rhs) {
    const auto& base = support[chosen];
    for (std::size_t j = 0; j < support.size(); ++j) {
        if (j == chosen) continue;
        Vec<T> row(support.dim());
        for (std::size_t i = 0; i < support.dim(); ++i) row[i] = support[j][i] - base[i];
        rows.push_back(std::move(row));
        rhs.push_back(lifting.values[chosen] - lifting.values[j]);
    }
}

template <class T>
std::size_t matrix_rank(Vec<Vec<T>> m) {
    if (m.empty()) return 0;
    const std::size_t cols = m.front().size();
    T scale(0);
    if constexpr (!ScalarTraits<T>::exact) {
        scale = 1.0;
        for (const auto& r : m)
            for (const auto& v : r) scale = std::max(scale, std::abs(v));
    }
    const T tol = ScalarTraits<T>::exact ? T(0) : T(1e-9) * scale;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t best = rank;
        for (std::size_t r = rank; r < m.size(); ++r)
            if (lp::detail::abs_value(m[r][c]) > lp::detail::abs_value(m[best][c])) best = r;
        if (!(lp::detail::abs_value(m[best][c]) > tol)) continue;
        std::swap(m[best], m[rank]);
        for (std::size_t r = 0; r < m.size(); ++r) {
            if (r == rank) continue;
            const T f = m[r][c] / m[rank][c];
            if (f == 0) continue;
            for (std::size_t j = c; j < cols; ++j) m[r][j] -= f * m[rank][j];
        }
        ++rank;
    }
    return rank;
}

}  // namespace detail

/// Dimension of the affine span of the Minkowski sum of the supports: the
/// rank of all within-support differences pooled over every support.
template <class T>
std::size_t affine_span_dimension(const std::vector<Support<T>>& supports) {
    detail::check_same_dimension(supports);
    Vec<Vec<T>> diffs;
    for (const auto& s : supports) {
        for (std::size_t j = 1; j < s.size(); ++j) {
            Vec<T> d(s.dim());
            for (std::size_t i = 0; i < s.dim(); ++i) d[i] = s[j][i] - s[0][i];
            diffs.push_back(std::move(d));
        }
    }
    return detail::matrix_rank(std::move(diffs));
}

/// Vertices of the upper envelope of `support` lifted by `lifting`.
/// Index i is a vertex iff the bounded-slack exposure LP has optimum > tol.
template <class T>
UpperEnvelope<T> envelope_vertices(const Support<T>& support, const Lifting<T>& lifting,
                                   T tol = ScalarTraits<T>::vertex_tol()) {
    if (lifting.values.size() != support.size()) throw std::invalid_argument("lifting length does not match support");
    UpperEnvelope<T> env{support, lifting, {}, Vec<T>(support.size())};
    for (std::size_t i = 0; i < support.size(); ++i) {
        Vec<Vec<T>> rows;
        Vec<T> rhs;
        detail::append_exposure_rows(support, lifting, i, rows, rhs);
        try {
            env.margins[i] = lp::max_slack(rows, rhs, support.dim()).first;
        } catch (const lp::LpError& e) {
            throw GeometryError("envelope LP failed at exponent index " + std::to_string(i) + ": " + e.what());
        }
        if (env.margins[i] > tol) env.vertex_indices.push_back(i);
    }
    return env;
}

/// Number of vertices of conv(support).
template <class T>
std::size_t polytope_vertex_count(const Support<T>& support) {
    return envelope_vertices(support, zero_lifting(support)).vertex_indices.size();
}

/// Inequality system and margin of the cell labelled by one exponent index per support.
template <class T>
Cell<T> build_cell(const CellLabel& label, const std::vector<Support<T>>& supports,
                   const std::vector<Lifting<T>>& liftings, T tol = ScalarTraits<T>::vertex_tol()) {
    detail::check_same_dimension(supports);
    detail::check_liftings(supports, liftings);
    if (label.indices.size() != supports.size()) throw std::invalid_argument("label length must equal support count");
    for (std::size_t k = 0; k < supports.size(); ++k)
        if (label.indices[k] >= supports[k].size())
            throw std::invalid_argument("label index out of range for support " + std::to_string(k));

    Vec<Vec<T>> rows;
    Vec<T> rhs;
    for (std::size_t k = 0; k < supports.size(); ++k)
        detail::append_exposure_rows(supports[k], liftings[k], label.indices[k], rows, rhs);

    Cell<T> cell;
    cell.label = label;
    for (std::size_t r = 0; r < rows.size(); ++r) cell.inequalities.push_back({rows[r], rhs[r]});
    try {
        auto [delta, z] = lp::max_slack(rows, rhs, supports.front().dim());
        cell.margin = delta;
        cell.witness = std::move(z);
    } catch (const lp::LpError& e) {
        throw GeometryError(std::string("cell LP failed: ") + e.what());
    }
    cell.full_dimensional = cell.margin > tol;
    return cell;
}

/// All full-dimensional cells, found by depth-first search over labels.
/// A partial label is abandoned as soon as its partial cell has no interior;
/// only envelope vertices are tried at each level.
template <class T>
std::vector<Cell<T>> enumerate_full_cells(const std::vector<Support<T>>& supports,
                                          const std::vector<Lifting<T>>& liftings,
                                          T tol = ScalarTraits<T>::vertex_tol()) {
    detail::check_same_dimension(supports);
    detail::check_liftings(supports, liftings);
    const std::size_t count = supports.size();
    const std::size_t dim = supports.front().dim();

    std::vector<std::vector<std::size_t>> candidates(count);
    for (std::size_t k = 0; k < count; ++k)
        candidates[k] = envelope_vertices(supports[k], liftings[k], tol).vertex_indices;

    std::vector<Cell<T>> cells;
    std::vector<std::size_t> label(count);
    Vec<Vec<T>> rows;
    Vec<T> rhs;

    std::function<void(std::size_t)> descend = [&](std::size_t k) {
        for (std::size_t idx : candidates[k]) {
            const std::size_t keep = rows.size();
            detail::append_exposure_rows(supports[k], liftings[k], idx, rows, rhs);
            label[k] = idx;
            T delta;
            Vec<T> witness;
            try {
                std::tie(delta, witness) = lp::max_slack(rows, rhs, dim);
            } catch (const lp::LpError& e) {
                throw GeometryError(std::string("cell LP failed: ") + e.what());
            }
            if (delta > tol) {
                if (k + 1 == count) {
                    Cell<T> cell;
                    cell.label.indices = label;
                    for (std::size_t r = 0; r < rows.size(); ++r) cell.inequalities.push_back({rows[r], rhs[r]});
                    cell.margin = delta;
                    cell.full_dimensional = true;
                    cell.witness = std::move(witness);
                    cells.push_back(std::move(cell));
                } else {
                    descend(k + 1);
                }
            }
            rows.resize(keep);
            rhs.resize(keep);
        }
    };
    descend(0);
    return cells;
}

/// Number of vertices of the Minkowski sum of the upper envelopes.
template <class T>
std::size_t minkowski_sum_vertex_count(const std::vector<Support<T>>& supports,
                                       const std::vector<Lifting<T>>& liftings,
                                       T tol = ScalarTraits<T>::vertex_tol()) {
    return enumerate_full_cells(supports, liftings, tol).size();
}

/// True when every equation picks the same exponent vector.
template <class T>
bool is_diagonal(const CellLabel& label, const std::vector<Support<T>>& supports) {
    for (std::size_t k = 1; k < label.indices.size(); ++k)
        if (supports[k][label.indices[k]] != supports[0][label.indices[0]]) return false;
    return true;
}

template <class To, class From>
Support<To> convert_support(const Support<From>& s) {
    Vec<Vec<To>> out;
    for (const auto& e : s.exponents()) {
        Vec<To> v;
        for (const auto& x : e) {
            if constexpr (std::is_same_v<To, From>) {
                v.push_back(x);
            } else if constexpr (std::is_same_v<To, double>) {
                v.push_back(to_double(x));
            } else {
                v.push_back(ScalarTraits<To>::from_double(to_double(x)));
            }
        }
        out.push_back(std::move(v));
    }
    return Support<To>(s.dim(), std::move(out));
}

}  // namespace fewzeros
