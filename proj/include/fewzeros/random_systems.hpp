#pragma once

#include "fewzeros/rng.hpp"
#include "fewzeros/system_spec.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace fewzeros {

/// A concrete fewnomial system: a spec plus one real coefficient per monomial.
struct FewnomialSystem {
    SystemSpec spec;
    std::vector<std::vector<double>> coefficients;
    std::vector<std::vector<std::vector<double>>> exponents;  // double copy of spec supports

    std::size_t n() const { return spec.n; }

    static FewnomialSystem make(SystemSpec spec, std::vector<std::vector<double>> coefficients) {
        spec.validate();
        if (coefficients.size() != spec.n) throw std::invalid_argument("need one coefficient list per equation");
        for (std::size_t k = 0; k < spec.n; ++k)
            if (coefficients[k].size() != spec.equations[k].support.size())
                throw std::invalid_argument("coefficient list " + std::to_string(k) + " does not match its support");
        FewnomialSystem sys;
        sys.exponents = spec.exponents_double();
        sys.spec = std::move(spec);
        sys.coefficients = std::move(coefficients);
        return sys;
    }
};

/// Independent centred Gaussians with the spec's variances. Deterministic in
/// the stream: equation-major, exponent-minor draw order.
inline FewnomialSystem sample_system(const SystemSpec& spec, RngStream& stream) {
    const auto variances = spec.variances_double();
    std::vector<std::vector<double>> coeffs(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k)
        for (double v : variances[k]) coeffs[k].push_back(std::sqrt(v) * stream.normal());
    return FewnomialSystem::make(spec, std::move(coeffs));
}

/// f_k(x) for x in the positive orthant, each monomial as exp(alpha·ln x).
inline std::vector<double> eval_positive(const FewnomialSystem& sys, const std::vector<double>& x) {
    if (x.size() != sys.n()) throw std::invalid_argument("point has wrong dimension");
    std::vector<double> logx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0)) throw std::domain_error("eval_positive needs strictly positive coordinates");
        logx[i] = std::log(x[i]);
    }
    std::vector<double> out(sys.n(), 0.0);
    for (std::size_t k = 0; k < sys.n(); ++k) {
        for (std::size_t a = 0; a < sys.exponents[k].size(); ++a) {
            double e = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) e += sys.exponents[k][a][i] * logx[i];
            out[k] += sys.coefficients[k][a] * std::exp(e);
        }
    }
    return out;
}

/// Values and Jacobian of the exponential sums g_k(y) = f_k(exp y), each
/// row divided by exp(log_scale[k]) where log_scale[k] is the largest
/// alpha·y + ln|f_{k,alpha}| of that equation. Scaling rows does not move zeros.
struct LogEvaluation {
    Eigen::VectorXd values;
    Eigen::MatrixXd jacobian;
    std::vector<double> log_scale;

    double unscaled_value(std::size_t k) const { return values[static_cast<Eigen::Index>(k)] * std::exp(log_scale[k]); }
};

inline LogEvaluation eval_log(const FewnomialSystem& sys, const std::vector<double>& y) {
    const std::size_t n = sys.n();
    if (y.size() != n) throw std::invalid_argument("point has wrong dimension");
    LogEvaluation out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)),
                      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                      std::vector<double>(n, -std::numeric_limits<double>::infinity())};
    for (std::size_t k = 0; k < n; ++k) {
        const auto& ex = sys.exponents[k];
        std::vector<double> logs(ex.size());
        for (std::size_t a = 0; a < ex.size(); ++a) {
            double e = 0.0;
            for (std::size_t i = 0; i < n; ++i) e += ex[a][i] * y[i];
            const double c = sys.coefficients[k][a];
            logs[a] = c == 0.0 ? -std::numeric_limits<double>::infinity() : e + std::log(std::abs(c));
            out.log_scale[k] = std::max(out.log_scale[k], logs[a]);
        }
        if (!std::isfinite(out.log_scale[k])) {
            out.log_scale[k] = 0.0;
            continue;
        }
        for (std::size_t a = 0; a < ex.size(); ++a) {
            const double c = sys.coefficients[k][a];
            if (c == 0.0) continue;
            const double term = std::copysign(std::exp(logs[a] - out.log_scale[k]), c);
            out.values[static_cast<Eigen::Index>(k)] += term;
            for (std::size_t i = 0; i < n; ++i)
                out.jacobian(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) += term * ex[a][i];
        }
    }
    return out;
}

/// n two-term equations a_k exp(gamma_k·x + s_k) + b_k.
struct BinomialSystem {
    Eigen::MatrixXd gammas;  // row k is gamma_k
    Eigen::VectorXd shifts;
    Eigen::VectorXd a;
    Eigen::VectorXd b;

    std::size_t n() const { return static_cast<std::size_t>(gammas.rows()); }
};

struct BinomialSolution {
    int count = 0;      // zeros in B = {x : gamma_k·x + s_k <= 0 for all k}
    int count_all = 0;  // zeros anywhere in R^n
    std::optional<Eigen::VectorXd> point;  // the zero, whether or not it lies in B
    bool singular = false;
};

/// Exact zero count of a binomial system inside B.
inline BinomialSolution binomial_solve(const BinomialSystem& sys) {
    const auto n = sys.gammas.rows();
    if (sys.gammas.cols() != n || sys.shifts.size() != n || sys.a.size() != n || sys.b.size() != n)
        throw std::invalid_argument("binomial system has inconsistent dimensions");
    BinomialSolution out;
    Eigen::VectorXd log_ratio(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        // a zero coefficient counts as "same sign": no solution
        if (!(sys.a[k] * sys.b[k] < 0.0)) return out;
        log_ratio[k] = std::log(-sys.b[k] / sys.a[k]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.gammas);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) {
        out.singular = true;
        return out;
    }
    out.count_all = 1;
    out.point = lu.solve(log_ratio - sys.shifts);
    if ((log_ratio.array() <= 0.0).all()) out.count = 1;
    return out;
}

/// Binomial system with the given exponents and shifts and standard Gaussian a, b.
inline BinomialSystem sample_binomial(const Eigen::MatrixXd& gammas, const Eigen::VectorXd& shifts,
                                      RngStream& stream) {
    BinomialSystem sys{gammas, shifts, Eigen::VectorXd(gammas.rows()), Eigen::VectorXd(gammas.rows())};
    for (Eigen::Index k = 0; k < gammas.rows(); ++k) {
        sys.a[k] = stream.normal();
        sys.b[k] = stream.normal();
    }
    return sys;
}

/// Coefficient vector of a binomial system seen as a fewnomial system in log
/// coordinates: equation k has exponents {0, gamma_k} with coefficients
/// b_k and a_k e^{s_k}.
inline FewnomialSystem binomial_as_fewnomial(const BinomialSystem& sys) {
    const std::size_t n = sys.n();
    std::vector<std::vector<std::vector<double>>> supports(n);
    std::vector<std::vector<double>> variances(n, std::vector<double>{1.0, 1.0});
    std::vector<std::vector<double>> coeffs(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> gamma(n);
        for (std::size_t i = 0; i < n; ++i) gamma[i] = sys.gammas(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
        supports[k] = {std::vector<double>(n, 0.0), gamma};
        const auto kk = static_cast<Eigen::Index>(k);
        coeffs[k] = {sys.b[kk], sys.a[kk] * std::exp(sys.shifts[kk])};
    }
    return FewnomialSystem::make(SystemSpec::from_doubles(n, supports, variances), std::move(coeffs));
}

}  // namespace fewzeros
