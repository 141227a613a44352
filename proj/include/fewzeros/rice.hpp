#pragma once

// Kac-Rice densities for zeros of random exponential sums, in log
// coordinates y. Everything is scale-free in phi, so each equation's term
// vector is stored divided by its largest entry.

#include "fewzeros/quadrature.hpp"
#include "fewzeros/rng.hpp"
#include "fewzeros/system_spec.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fewzeros {

/// phi_k(y) = (exp(alpha·y + lifting_k(alpha)))_alpha for one equation, and
/// the derived quantities of the normalised map psi_k = phi_k / |phi_k|.
struct EquationFrame {
    Eigen::VectorXd phi;   // divided by exp(log_scale)
    double log_scale = 0;  // true phi = exp(log_scale) * phi
    double norm = 0;       // |phi| in the same scaling
    Eigen::VectorXd psi;
    Eigen::MatrixXd dphi;  // row alpha: phi_alpha * alpha^T (scaled)
    Eigen::MatrixXd dpsi;  // (1/|phi|)(I - psi psi^T) dphi
};

struct EvaluationFrame {
    std::vector<double> y;
    std::vector<EquationFrame> equations;

    std::size_t n() const { return y.size(); }
};

inline EquationFrame make_equation_frame(const std::vector<double>& y, const std::vector<std::vector<double>>& support,
                                         const std::vector<double>& lifting) {
    const std::size_t t = support.size(), n = y.size();
    if (lifting.size() != t) throw std::invalid_argument("lifting length differs from support size");
    EquationFrame f;
    std::vector<double> u(t);
    f.log_scale = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < t; ++a) {
        if (support[a].size() != n) throw std::invalid_argument("exponent has wrong dimension");
        u[a] = lifting[a];
        for (std::size_t i = 0; i < n; ++i) u[a] += support[a][i] * y[i];
        f.log_scale = std::max(f.log_scale, u[a]);
    }
    const auto tt = static_cast<Eigen::Index>(t), nn = static_cast<Eigen::Index>(n);
    f.phi.resize(tt);
    f.dphi.resize(tt, nn);
    for (std::size_t a = 0; a < t; ++a) {
        const auto ai = static_cast<Eigen::Index>(a);
        f.phi[ai] = std::exp(u[a] - f.log_scale);
        for (std::size_t i = 0; i < n; ++i) f.dphi(ai, static_cast<Eigen::Index>(i)) = f.phi[ai] * support[a][i];
    }
    f.norm = f.phi.norm();
    f.psi = f.phi / f.norm;
    f.dpsi = (f.dphi - f.psi * (f.psi.transpose() * f.dphi)) / f.norm;
    return f;
}

inline EvaluationFrame make_frame(const std::vector<double>& y,
                                  const std::vector<std::vector<std::vector<double>>>& supports,
                                  const std::vector<std::vector<double>>& liftings) {
    if (supports.size() != y.size() || liftings.size() != y.size())
        throw std::invalid_argument("need n supports and liftings for a point in R^n");
    EvaluationFrame fr{y, {}};
    for (std::size_t k = 0; k < supports.size(); ++k) fr.equations.push_back(make_equation_frame(y, supports[k], liftings[k]));
    return fr;
}

/// Frame with the variance liftings 0.5 ln v.
inline EvaluationFrame make_frame(const std::vector<double>& y, const SystemSpec& spec) {
    std::vector<std::vector<double>> lift;
    for (const auto& vs : spec.variances_double()) {
        std::vector<double> l;
        for (double v : vs) l.push_back(0.5 * std::log(v));
        lift.push_back(std::move(l));
    }
    return make_frame(y, spec.exponents_double(), lift);
}

/// Standard Gaussian in the orthogonal complement of the unit vector psi.
inline Eigen::VectorXd gaussian_in_orthocomplement(const Eigen::VectorXd& psi, RngStream& stream) {
    if (std::abs(psi.norm() - 1.0) > 1e-9) throw std::invalid_argument("gaussian_in_orthocomplement needs a unit vector");
    Eigen::VectorXd g(psi.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = stream.normal();
    g -= psi.dot(g) * psi;
    g -= psi.dot(g) * psi;  // second pass removes the round-off left by the first
    return g;
}

struct MonteCarloEstimate {
    double mean = 0;
    double stderr_ = 0;
    std::size_t samples = 0;
};

/// (2 pi)^{-n/2} E |det(a_k^T D psi_k)| with a_k Gaussian in psi_k^perp: the
/// Kac-Rice density of zeros at the frame's point.
inline MonteCarloEstimate rice_integrand_mc(const EvaluationFrame& frame, std::size_t samples, RngStream& stream) {
    if (samples == 0) throw std::invalid_argument("need at least one sample");
    const auto n = static_cast<Eigen::Index>(frame.n());
    const double c = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(n));
    Eigen::MatrixXd m(n, n);
    double sum = 0, sum_sq = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& eq = frame.equations[static_cast<std::size_t>(k)];
            const Eigen::VectorXd a = gaussian_in_orthocomplement(eq.psi, stream);
            m.row(k) = a.transpose() * eq.dpsi;
        }
        const double v = c * std::abs(m.determinant());
        sum += v;
        sum_sq += v * v;
    }
    MonteCarloEstimate est;
    est.samples = samples;
    est.mean = sum / static_cast<double>(samples);
    if (samples > 1) {
        const double var = std::max(0.0, (sum_sq - sum * est.mean) / static_cast<double>(samples - 1));
        est.stderr_ = std::sqrt(var / static_cast<double>(samples));
    }
    return est;
}

/// Keeps sampling in batches until the standard error is below rel_err of the
/// mean (at least min_samples, at most max_samples).
inline MonteCarloEstimate rice_integrand_mc_target(const EvaluationFrame& frame, RngStream& stream,
                                                   double rel_err = 0.01, std::size_t min_samples = 1000,
                                                   std::size_t max_samples = 1000000) {
    double sum = 0, sum_sq = 0;
    std::size_t done = 0;
    MonteCarloEstimate est;
    std::size_t batch = min_samples;
    while (true) {
        const auto b = rice_integrand_mc(frame, batch, stream);
        // recombine batch moments
        const double bs = b.mean * static_cast<double>(batch);
        const double bvar = b.stderr_ * b.stderr_ * static_cast<double>(batch);
        sum += bs;
        sum_sq += bvar * static_cast<double>(batch - 1) + bs * b.mean;
        done += batch;
        est.samples = done;
        est.mean = sum / static_cast<double>(done);
        est.stderr_ = std::sqrt(std::max(0.0, (sum_sq - sum * est.mean) / static_cast<double>(done - 1)) /
                                static_cast<double>(done));
        if (est.mean == 0.0 || est.stderr_ <= rel_err * est.mean || done >= max_samples) break;
        batch = std::min(done, max_samples - done);
    }
    return est;
}

/// n = 1 density (1/pi) sqrt(|phi|^2 |phi'|^2 - <phi, phi'>^2) / |phi|^4, written
/// through Lagrange's identity as a sum over pairs so it stays accurate when
/// one term dominates.
inline double ek_density(double y, const std::vector<double>& support, const std::vector<double>& variances) {
    const std::size_t t = support.size();
    if (variances.size() != t) throw std::invalid_argument("need one variance per exponent");
    if (t < 2) return 0.0;
    std::vector<double> u(t);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < t; ++j) {
        if (!(variances[j] > 0)) throw std::invalid_argument("variances must be positive");
        u[j] = support[j] * y + 0.5 * std::log(variances[j]);
        m = std::max(m, u[j]);
    }
    std::vector<double> w2(t);
    double norm2 = 0;
    for (std::size_t j = 0; j < t; ++j) {
        w2[j] = std::exp(2.0 * (u[j] - m));
        norm2 += w2[j];
    }
    double gram = 0;
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = i + 1; j < t; ++j) {
            const double d = support[i] - support[j];
            gram += w2[i] * w2[j] * d * d;
        }
    return std::sqrt(gram) / (std::numbers::pi * norm2);
}

struct UnivariateRice {
    double value = 0;
    double error = 0;       // quadrature estimate plus both tail bounds
    double tail_bound = 0;  // mass provably outside [lo, hi]
    double lo = 0, hi = 0;
    bool converged = true;
};

/// Expected number of positive zeros for n = 1: the density integrated over
/// the line. Outside [lo, hi] the density is bounded by (D/pi)(S + S^2/2),
/// S the sum of term ratios to the extreme term, which integrates in closed form.
inline UnivariateRice expected_zeros_univariate(const std::vector<double>& support, const std::vector<double>& variances,
                                                double quad_tol) {
    if (!(quad_tol > 0)) throw std::invalid_argument("quad_tol must be positive");
    UnivariateRice out;
    const std::size_t t = support.size();
    if (t < 2) return out;
    std::vector<double> u(t);
    for (std::size_t j = 0; j < t; ++j) u[j] = 0.5 * std::log(variances[j]);
    const auto top = static_cast<std::size_t>(std::max_element(support.begin(), support.end()) - support.begin());
    const auto bot = static_cast<std::size_t>(std::min_element(support.begin(), support.end()) - support.begin());
    const double spread = support[top] - support[bot];

    // tail mass beyond L, measured from extreme term e in direction dir (+1 up, -1 down)
    auto tail = [&](std::size_t e, double dir, double l) {
        double s1 = 0, s2 = 0;
        for (std::size_t j = 0; j < t; ++j) {
            if (j == e) continue;
            const double rate = dir * (support[e] - support[j]);  // > 0
            s1 += std::exp((support[j] - support[e]) * l + u[j] - u[e]) / rate;
            for (std::size_t i = 0; i < t; ++i) {
                if (i == e) continue;
                const double r2 = dir * (2 * support[e] - support[i] - support[j]);
                s2 += std::exp((support[i] + support[j] - 2 * support[e]) * l + u[i] + u[j] - 2 * u[e]) / r2;
            }
        }
        return spread / std::numbers::pi * (s1 + 0.5 * s2);
    };

    std::vector<double> breaks;
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = i + 1; j < t; ++j) breaks.push_back((u[i] - u[j]) / (support[j] - support[i]));
    std::sort(breaks.begin(), breaks.end());
    const double budget = quad_tol / 10.0;
    double hi = breaks.back() + 1.0, lo = breaks.front() - 1.0;
    for (double step = 1.0; tail(top, 1.0, hi) > budget / 2; step *= 2.0) hi += step;
    for (double step = 1.0; tail(bot, -1.0, lo) > budget / 2; step *= 2.0) lo -= step;
    out.lo = lo;
    out.hi = hi;
    out.tail_bound = tail(top, 1.0, hi) + tail(bot, -1.0, lo);

    // panel breaks at the envelope breakpoints, plus extra splits around them
    // scaled to the steepness of the density there
    std::vector<double> cuts;
    for (double b : breaks) {
        const double w = 1.0 / std::max(1.0, spread);
        for (double d : {-4 * w, -w, 0.0, w, 4 * w})
            if (b + d > lo && b + d < hi) cuts.push_back(b + d);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const auto q = integrate_adaptive([&](double y) { return ek_density(y, support, variances); }, lo, hi,
                                      quad_tol - out.tail_bound, cuts);
    out.value = q.value;
    out.error = q.error + out.tail_bound;
    out.converged = q.converged;
    return out;
}

/// (1/pi^n) prod_k e^{u_k} / (1 + e^{2 u_k}) |det Gamma|, u_k = gamma_k·y + s_k.
inline double binomial_density(const Eigen::VectorXd& y, const Eigen::MatrixXd& gammas, const Eigen::VectorXd& shifts) {
    const auto n = gammas.rows();
    if (gammas.cols() != n || y.size() != n || shifts.size() != n)
        throw std::invalid_argument("binomial_density: inconsistent dimensions");
    const double det = std::abs(gammas.determinant());
    if (det == 0.0) return 0.0;
    double p = det;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double u = gammas.row(k).dot(y) + shifts[k];
        p *= 1.0 / (2.0 * std::cosh(u) * std::numbers::pi);  // e^u / (1 + e^{2u}) = 1 / (2 cosh u)
    }
    return p;
}

struct QuadratureValue {
    double value = 0;
    double error = 0;
};

/// Integral of binomial_density over B = {gamma_k·y + s_k <= 0} (in_b) or over
/// all of R^n. The substitution u = Gamma y + s turns it into a product of
/// one-dimensional integrals of 1/(2 pi cosh u).
inline QuadratureValue binomial_density_integral(const Eigen::MatrixXd& gammas, bool in_b, double quad_tol) {
    const auto n = gammas.rows();
    if (std::abs(gammas.determinant()) == 0.0) return {};
    // tail beyond |u| = L is at most e^{-L} / pi
    const double l = std::log(1.0 / (std::numbers::pi * quad_tol / 10.0)) + 1.0;
    const auto f = [](double u) { return 1.0 / (2.0 * std::cosh(u) * std::numbers::pi); };
    const auto half = integrate_adaptive(f, -l, 0.0, quad_tol / (4.0 * static_cast<double>(n)));
    const double one = in_b ? half.value : 2.0 * half.value;
    const double one_err = (in_b ? 1.0 : 2.0) * (half.error + std::exp(-l) / std::numbers::pi);
    QuadratureValue out{std::pow(one, static_cast<double>(n)), 0.0};
    out.error = static_cast<double>(n) * std::pow(one, static_cast<double>(n - 1)) * one_err;
    return out;
}

enum class Prop32Method { closed, quadrature };

/// 4^{-n}, either in closed form or as ((1/pi) int_0^1 dt / (1 + t^2))^n.
inline QuadratureValue prop32_value(unsigned n, Prop32Method method, double quad_tol = 1e-12) {
    if (n == 0) throw std::invalid_argument("n must be positive");
    if (method == Prop32Method::closed) return {std::pow(0.25, static_cast<double>(n)), 0.0};
    const auto q = integrate_adaptive([](double t) { return 1.0 / (std::numbers::pi * (1.0 + t * t)); }, 0.0, 1.0,
                                      quad_tol / (4.0 * static_cast<double>(n)));
    const double nn = static_cast<double>(n);
    return {std::pow(q.value, nn), nn * std::pow(q.value, nn - 1.0) * q.error};
}

/// The per-equation integrand inequality used to reduce a cell to the
/// binomial case. Exponents and lifting are first translated so the cell's
/// label term becomes (0, 0); with u = phi_beta it reads
///   sqrt(|phi|^2 - u^2) / |phi|^2 <= 1 / (1 + u^2).
/// Returns right-hand side minus left-hand side.
inline double integrand_bound_slack(const std::vector<double>& y, const std::vector<std::vector<double>>& support,
                                    const std::vector<double>& lifting, std::size_t label, std::size_t beta) {
    const std::size_t t = support.size();
    std::vector<double> phi(t);
    for (std::size_t a = 0; a < t; ++a) {
        double e = lifting[a] - lifting[label];
        for (std::size_t i = 0; i < y.size(); ++i) e += (support[a][i] - support[label][i]) * y[i];
        phi[a] = std::exp(e);
    }
    double norm2 = 0;
    for (double p : phi) norm2 += p * p;
    const double u = phi[beta];
    const double lhs = std::sqrt(std::max(0.0, norm2 - u * u)) / norm2;
    const double rhs = 1.0 / (1.0 + u * u);
    return rhs - lhs;
}

}  // namespace fewzeros
