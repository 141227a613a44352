#include "fewzeros/rice.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace fewzeros;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> half_logs(const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v) out.push_back(0.5 * std::log(x));
    return out;
}

}  // namespace

TEST(Quadrature, PolynomialAndBreaks) {
    const auto q = integrate_adaptive([](double x) { return x * x; }, 0, 3, 1e-12);
    EXPECT_TRUE(q.converged);
    EXPECT_NEAR(q.value, 9.0, 1e-12);
    const auto kink = integrate_adaptive([](double x) { return std::abs(x - 0.3); }, 0, 1, 1e-12, {0.3});
    EXPECT_NEAR(kink.value, 0.5 * (0.09 + 0.49), 1e-12);
    const auto capped = integrate_adaptive([](double x) { return 1 / std::sqrt(x); }, 0, 1, 1e-15, {}, 20);
    EXPECT_FALSE(capped.converged);
}

TEST(Frame, Invariants) {
    const auto f = make_frame({0.3, -0.2}, {{{0, 0}, {1, 0}, {0, 2}}, {{0, 0}, {1, 1}}}, {{0, 0.1, -0.4}, {0.2, 0}});
    for (const auto& eq : f.equations) {
        EXPECT_NEAR(eq.psi.norm(), 1.0, 1e-12);
        EXPECT_NEAR(eq.psi.dot(eq.dpsi.col(0)), 0.0, 1e-12);
    }
    // D phi row alpha equals phi_alpha alpha^T
    EXPECT_NEAR(f.equations[0].dphi(2, 1), 2 * f.equations[0].phi[2], 1e-15);
    EXPECT_EQ(f.equations[0].dphi(0, 0), 0.0);
}

TEST(Frame, DpsiMatchesFiniteDifference) {
    const std::vector<std::vector<double>> sup{{0, 0}, {1.5, 0}, {0, 1}, {1, 2}};
    const std::vector<double> lift{0, 0.3, -0.2, 0.1};
    const std::vector<double> y{0.2, -0.4};
    const auto f = make_equation_frame(y, sup, lift);
    const double h = 1e-6;
    for (std::size_t i = 0; i < 2; ++i) {
        auto yp = y, ym = y;
        yp[i] += h;
        ym[i] -= h;
        const Eigen::VectorXd fd =
            (make_equation_frame(yp, sup, lift).psi - make_equation_frame(ym, sup, lift).psi) / (2 * h);
        EXPECT_LT((fd - f.dpsi.col(static_cast<Eigen::Index>(i))).norm(), 1e-8);
    }
}

TEST(Orthocomplement, Properties) {
    Eigen::VectorXd psi(4);
    psi << 1, 2, -1, 0.5;
    psi.normalize();
    RngStream s(3, 0);
    const int m = 100000;
    double sq = 0, sq2 = 0;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < m; ++i) {
        const auto a = gaussian_in_orthocomplement(psi, s);
        EXPECT_LT(std::abs(a.dot(psi)), 1e-10);
        sq += a.squaredNorm();
        sq2 += a.squaredNorm() * a.squaredNorm();
        cov += a * a.transpose();
    }
    const double mean = sq / m, var = sq2 / m - mean * mean;
    EXPECT_NEAR(mean, 3.0, 5 * std::sqrt(var / m));
    cov /= m;
    const Eigen::MatrixXd target = Eigen::MatrixXd::Identity(4, 4) - psi * psi.transpose();
    EXPECT_LT((cov - target).cwiseAbs().maxCoeff(), 0.02);
    Eigen::VectorXd not_unit = Eigen::VectorXd::Ones(3);
    EXPECT_THROW(gaussian_in_orthocomplement(not_unit, s), std::invalid_argument);
}

TEST(EkDensity, Examples) {
    EXPECT_NEAR(ek_density(0.0, {0, 1}, {1, 1}), 1 / (2 * kPi), 1e-15);
    // A = {0, 1}: rho(y) = (1/pi) e^y / (1 + e^{2y})
    for (double y : {-3.0, -0.5, 1.0, 4.0}) EXPECT_NEAR(ek_density(y, {0, 1}, {1, 1}), std::exp(y) / (kPi * (1 + std::exp(2 * y))), 1e-15);
    EXPECT_EQ(ek_density(1.0, {3}, {2}), 0.0);
    EXPECT_TRUE(std::isfinite(ek_density(500.0, {0, 1, 9}, {1, 1, 1})));
}

TEST(EkDensity, MatchesDirectFormula) {
    // (1/pi) sqrt(|phi|^2 |phi'|^2 - <phi,phi'>^2) / |phi|^2 evaluated naively at moderate y
    const std::vector<double> a{0, 1, 2.5, 4}, v{1, 3, 0.5, 2};
    for (double y = -2; y <= 2; y += 0.25) {
        double p2 = 0, d2 = 0, pd = 0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double phi = std::sqrt(v[j]) * std::exp(a[j] * y);
            p2 += phi * phi;
            d2 += a[j] * a[j] * phi * phi;
            pd += a[j] * phi * phi;
        }
        EXPECT_NEAR(ek_density(y, a, v), std::sqrt(p2 * d2 - pd * pd) / (kPi * p2), 1e-12);
    }
}

TEST(RiceMc, MatchesClosedFormsAndIgnoresScale) {
    RngStream s(5, 0);
    const std::vector<double> a{0, 1, 3}, v{1, 2, 0.5};
    const auto f1 = make_frame({0.3}, {{{0}, {1}, {3}}}, {half_logs(v)});
    const auto m1 = rice_integrand_mc(f1, 100000, s);
    EXPECT_NEAR(m1.mean, ek_density(0.3, a, v), 3 * m1.stderr_);

    Eigen::MatrixXd g(2, 2);
    g << 1, 2, -3, 1;
    Eigen::VectorXd sh(2), y(2);
    sh << 0.1, 0.3;
    y << 0.2, -0.4;
    const auto fb = make_frame({0.2, -0.4}, {{{0, 0}, {1, 2}}, {{0, 0}, {-3, 1}}}, {{0, 0.1}, {0, 0.3}});
    const auto mb = rice_integrand_mc(fb, 100000, s);
    EXPECT_NEAR(mb.mean, binomial_density(y, g, sh), 3 * mb.stderr_);

    // shifting one lifting vector by a constant rescales phi_1 only
    const auto shifted = make_frame({0.2, -0.4}, {{{0, 0}, {1, 2}}, {{0, 0}, {-3, 1}}}, {{2.0, 2.1}, {0, 0.3}});
    const auto ms = rice_integrand_mc(shifted, 100000, s);
    EXPECT_NEAR(ms.mean, mb.mean, 3 * std::hypot(ms.stderr_, mb.stderr_));

    // proportional rows: two equations with the same one-dimensional support direction
    const auto dep = make_frame({0.1, 0.2}, {{{0, 0}, {1, 1}}, {{0, 0}, {2, 2}}}, {{0, 0}, {0, 0}});
    EXPECT_NEAR(rice_integrand_mc(dep, 1000, s).mean, 0.0, 1e-12);
}

TEST(RiceMc, TargetedPrecision) {
    RngStream s(6, 0);
    const auto f = make_frame({0.0}, {{{0}, {1}}}, {{0, 0}});
    const auto m = rice_integrand_mc_target(f, s, 0.01);
    EXPECT_GE(m.samples, 1000u);
    EXPECT_LE(m.stderr_, 0.01 * m.mean * 1.0001);
    EXPECT_NEAR(m.mean, 1 / (2 * kPi), 4 * m.stderr_);
}

TEST(ExpectedZeros, UnivariateExamples) {
    for (double d : {1.0, 7.0, 100.0}) {
        const auto r = expected_zeros_univariate({0, d}, {1, 1}, 1e-10);
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.value, 0.5, 1e-10) << d;
        EXPECT_LE(r.error, 1e-10);
    }
    EXPECT_EQ(expected_zeros_univariate({0}, {1}, 1e-10).value, 0.0);
    for (int t = 2; t <= 10; ++t) {
        std::vector<double> a, v(static_cast<std::size_t>(t), 1.0);
        for (int j = 0; j < t; ++j) a.push_back(j);
        EXPECT_LE(expected_zeros_univariate(a, v, 1e-9).value, (t - 1) / 2.0);
    }
}

TEST(ExpectedZeros, KostlanEnsemble) {
    // binomial-coefficient variances: expected positive roots sqrt(d)/2
    for (int d : {2, 5, 16}) {
        std::vector<double> a, v;
        for (int j = 0; j <= d; ++j) {
            a.push_back(j);
            v.push_back(std::tgamma(d + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(d - j + 1.0)));
        }
        EXPECT_NEAR(expected_zeros_univariate(a, v, 1e-9).value, std::sqrt(d) / 2, 1e-9);
    }
}

TEST(ExpectedZeros, TailBoundDominatesTruncatedMass) {
    // compare the certified tail bound with the mass beyond [lo, hi] found by
    // integrating much further out
    const std::vector<double> a{0, 1, 2, 5}, v{1, 0.2, 3, 1};
    const auto r = expected_zeros_univariate(a, v, 1e-6);
    auto rho = [&](double y) { return ek_density(y, a, v); };
    const double beyond = integrate_adaptive(rho, r.hi, r.hi + 60, 1e-14).value +
                          integrate_adaptive(rho, r.lo - 60, r.lo, 1e-14).value;
    EXPECT_LE(beyond, r.tail_bound * (1 + 1e-6) + 1e-14);
    EXPECT_LE(r.tail_bound, 1e-7);
}

TEST(BinomialDensity, Examples) {
    for (int n = 1; n <= 3; ++n) {
        const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
        EXPECT_NEAR(binomial_density(Eigen::VectorXd::Zero(n), g, Eigen::VectorXd::Zero(n)), std::pow(0.5 / kPi, n), 1e-15);
    }
    Eigen::MatrixXd sing(2, 2);
    sing << 1, 2, 2, 4;
    EXPECT_EQ(binomial_density(Eigen::VectorXd::Ones(2), sing, Eigen::VectorXd::Zero(2)), 0.0);
}

TEST(BinomialDensity, IntegralsOverBAndWholeSpace) {
    for (int n = 1; n <= 3; ++n) {
        const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n) + 0.5 * Eigen::MatrixXd::Ones(n, n);
        const auto b = binomial_density_integral(g, true, 1e-11);
        const auto all = binomial_density_integral(g, false, 1e-11);
        EXPECT_NEAR(b.value, std::pow(0.25, n), 1e-10);
        EXPECT_NEAR(all.value, std::pow(0.5, n), 1e-10);
    }
}

// Independent of the substitution: nested quadrature of the density in y for n = 2.
TEST(BinomialDensity, NestedQuadratureOverB) {
    Eigen::MatrixXd g(2, 2);
    g << 1, 0, 0, 1;
    const Eigen::VectorXd s = Eigen::VectorXd::Zero(2);
    auto inner = [&](double y1) {
        return integrate_adaptive(
                   [&](double y2) {
                       Eigen::VectorXd y(2);
                       y << y1, y2;
                       return binomial_density(y, g, s);
                   },
                   -40, 0, 1e-13)
            .value;
    };
    const auto outer = integrate_adaptive(inner, -40, 0, 1e-12);
    EXPECT_NEAR(outer.value, 0.0625, 1e-10);
}

TEST(Prop32, Values) {
    EXPECT_DOUBLE_EQ(prop32_value(2, Prop32Method::closed).value, 0.0625);
    EXPECT_DOUBLE_EQ(prop32_value(4, Prop32Method::closed).value, 1.0 / 256);
    EXPECT_NEAR(prop32_value(1, Prop32Method::quadrature, 1e-10).value, 0.25, 1e-10);
    for (unsigned n = 1; n <= 5; ++n)
        EXPECT_NEAR(prop32_value(n, Prop32Method::quadrature, 1e-12).value, std::pow(0.25, n), 1e-12);
    EXPECT_THROW(prop32_value(0, Prop32Method::closed), std::invalid_argument);
}

TEST(IntegrandBound, HoldsWhereLabelDominates) {
    RngStream rng(9, 0);
    for (int trial = 0; trial < 2000; ++trial) {
        // label term 0 at the origin with zero lifting; others dominated at y = 0
        std::vector<std::vector<double>> sup{{0.0, 0.0}};
        std::vector<double> lift{0.0};
        for (int j = 0; j < 4; ++j) {
            sup.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3)});
            lift.push_back(-rng.uniform(0, 3));
        }
        for (std::size_t beta = 1; beta < sup.size(); ++beta)
            EXPECT_GE(integrand_bound_slack({0.0, 0.0}, sup, lift, 0, beta), -1e-12);
    }
    // outside the cell the inequality can fail: one term far above the label
    EXPECT_LT(integrand_bound_slack({0.0}, {{0.0}, {1.0}, {2.0}}, {0.0, 3.0, 3.0}, 0, 1), 0.0);
}
