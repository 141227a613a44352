#pragma once

// Dense tableau simplex for small LPs over free variables:
//
//     maximize  c·x   subject to   rows[i]·x <= rhs[i],   x in R^d
//
// Templated on the scalar so that the same code runs over exact rationals
// (Bland's rule, zero tolerances, guaranteed termination) and over doubles
// (same rule, small pivot tolerances, iteration cap).

#include "fewzeros/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace fewzeros::lp {

enum class Status { optimal, infeasible, unbounded };

template <class T>
struct Result {
    Status status = Status::infeasible;
    T value{};
    Vec<T> point;  // optimal x when status == optimal
};

class LpError : public std::runtime_error {
public:
    explicit LpError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

template <class T>
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : a_(rows, Vec<T>(cols)), b_(rows), obj_(cols), basis_(rows) {}

    Vec<Vec<T>>& a() { return a_; }
    Vec<T>& b() { return b_; }
    Vec<T>& obj() { return obj_; }
    T& obj_rhs() { return obj_rhs_; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::vector<bool>& banned() { return banned_; }

    void pivot(std::size_t r, std::size_t c) {
        const T piv = a_[r][c];
        for (auto& v : a_[r]) v /= piv;
        b_[r] /= piv;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (i == r) continue;
            const T f = a_[i][c];
            if (is_zero(f)) continue;
            for (std::size_t j = 0; j < a_[i].size(); ++j) a_[i][j] -= f * a_[r][j];
            b_[i] -= f * b_[r];
            if constexpr (!ScalarTraits<T>::exact) a_[i][c] = T(0);
        }
        const T f = obj_[c];
        if (!is_zero(f)) {
            for (std::size_t j = 0; j < obj_.size(); ++j) obj_[j] -= f * a_[r][j];
            obj_rhs_ -= f * b_[r];
            if constexpr (!ScalarTraits<T>::exact) obj_[c] = T(0);
        }
        basis_[r] = c;
    }

    // Runs Bland's rule to optimality. Returns false when unbounded.
    bool optimise(std::size_t max_iterations) {
        const T eps = ScalarTraits<T>::pivot_eps();
        for (std::size_t iter = 0;; ++iter) {
            if (iter > max_iterations) throw LpError("simplex iteration limit exceeded");
            std::optional<std::size_t> enter;
            for (std::size_t j = 0; j < obj_.size(); ++j) {
                if (!banned_.empty() && banned_[j]) continue;
                if (obj_[j] < -eps) {
                    enter = j;
                    break;
                }
            }
            if (!enter) return true;
            const std::size_t c = *enter;
            std::optional<std::size_t> leave;
            T best{};
            for (std::size_t i = 0; i < a_.size(); ++i) {
                if (!(a_[i][c] > eps)) continue;
                T ratio = b_[i] / a_[i][c];
                if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (!leave) return false;
            pivot(*leave, c);
            if constexpr (!ScalarTraits<T>::exact) {
                if (!std::isfinite(obj_rhs_)) throw LpError("non-finite objective during pivoting");
            }
        }
    }

    static bool is_zero(const T& v) {
        if constexpr (ScalarTraits<T>::exact) {
            return v == 0;
        } else {
            return v == 0.0;
        }
    }

private:
    Vec<Vec<T>> a_;
    Vec<T> b_;
    Vec<T> obj_;
    T obj_rhs_{};
    std::vector<std::size_t> basis_;
    std::vector<bool> banned_;
};

template <class T>
T abs_value(const T& v) {
    return v < 0 ? T(-v) : v;
}

}  // namespace detail

template <class T>
Result<T> maximize(const Vec<T>& objective, const Vec<Vec<T>>& rows, const Vec<T>& rhs) {
    const std::size_t d = objective.size();
    const std::size_t m = rows.size();
    if (rhs.size() != m) throw std::invalid_argument("lp: rhs size does not match row count");
    for (const auto& r : rows)
        if (r.size() != d) throw std::invalid_argument("lp: row dimension mismatch");

    // columns: x+ (d), x- (d), slack (m), auxiliary (1)
    const std::size_t aux = 2 * d + m;
    const std::size_t cols = aux + 1;
    detail::Tableau<T> tab(m, cols);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            tab.a()[i][j] = rows[i][j];
            tab.a()[i][d + j] = -rows[i][j];
        }
        tab.a()[i][2 * d + i] = T(1);
        tab.a()[i][aux] = T(-1);
        tab.b()[i] = rhs[i];
        tab.basis()[i] = 2 * d + i;
    }
    tab.banned().assign(cols, false);
    const std::size_t max_iter = 200 * (cols + m + 1);

    const T eps = ScalarTraits<T>::pivot_eps();
    std::size_t worst = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (tab.b()[i] < tab.b()[worst]) worst = i;

    if (m > 0 && tab.b()[worst] < 0) {
        // Phase 1: maximise -aux starting from the pivot that makes every row feasible.
        tab.obj().assign(cols, T(0));
        tab.obj()[aux] = T(1);
        tab.obj_rhs() = T(0);
        tab.pivot(worst, aux);
        tab.optimise(max_iter);
        T feas_tol{};
        if constexpr (!ScalarTraits<T>::exact) {
            double scale = 1.0;
            for (const auto& v : rhs) scale = std::max(scale, std::abs(v));
            feas_tol = 1e-9 * scale;
        }
        if (tab.obj_rhs() < -feas_tol) return {Status::infeasible, T{}, {}};
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis()[i] != aux) continue;
            std::optional<std::size_t> col;
            for (std::size_t j = 0; j < aux; ++j) {
                if (detail::abs_value(tab.a()[i][j]) > eps) {
                    col = j;
                    break;
                }
            }
            if (col) {
                tab.pivot(i, *col);
            } else {
                // redundant row: only the auxiliary column is nonzero
                for (auto& v : tab.a()[i]) v = T(0);
                tab.a()[i][aux] = T(1);
                tab.b()[i] = T(0);
            }
        }
    }
    tab.banned()[aux] = true;

    // Phase 2
    tab.obj().assign(cols, T(0));
    tab.obj_rhs() = T(0);
    for (std::size_t j = 0; j < d; ++j) {
        tab.obj()[j] = -objective[j];
        tab.obj()[d + j] = objective[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t bi = tab.basis()[i];
        const T f = tab.obj()[bi];
        if (detail::Tableau<T>::is_zero(f)) continue;
        for (std::size_t j = 0; j < cols; ++j) tab.obj()[j] -= f * tab.a()[i][j];
        tab.obj_rhs() -= f * tab.b()[i];
    }
    if (!tab.optimise(max_iter)) return {Status::unbounded, T{}, {}};

    Result<T> out;
    out.status = Status::optimal;
    out.value = tab.obj_rhs();
    Vec<T> full(cols, T(0));
    for (std::size_t i = 0; i < m; ++i) full[tab.basis()[i]] = tab.b()[i];
    out.point.resize(d);
    for (std::size_t j = 0; j < d; ++j) out.point[j] = full[j] - full[d + j];
    return out;
}

/// Bounded-slack exposure LP: maximise delta subject to rows[i]·z + delta <= rhs[i]
/// and delta <= 1. Always feasible and bounded; returns (delta*, witness z).
template <class T>
std::pair<T, Vec<T>> max_slack(const Vec<Vec<T>>& rows, const Vec<T>& rhs, std::size_t dim) {
    Vec<Vec<T>> ext;
    ext.reserve(rows.size() + 1);
    for (const auto& r : rows) {
        Vec<T> e(r);
        e.push_back(T(1));
        ext.push_back(std::move(e));
    }
    Vec<T> cap(dim + 1, T(0));
    cap[dim] = T(1);
    ext.push_back(cap);
    Vec<T> b(rhs);
    b.push_back(T(1));
    Vec<T> objective(dim + 1, T(0));
    objective[dim] = T(1);
    auto res = maximize(objective, ext, b);
    if (res.status != Status::optimal) throw LpError("bounded-slack LP did not reach an optimum");
    T delta = res.point[dim];
    res.point.pop_back();
    return {delta, res.point};
}

}  // namespace fewzeros::lp
