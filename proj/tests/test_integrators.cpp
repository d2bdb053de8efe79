#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "phiquad/integrators.hpp"
#include "phiquad/oracle.hpp"

using namespace phiquad;
using Catch::Approx;

namespace {

/// Least-squares slope of log(err) against log(tau).
double fitted_order(const std::vector<double>& taus, const std::vector<double>& errs) {
    const std::size_t n = taus.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(taus[i]);
        const double y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Sums the coefficients of one phi order across a list of terms.
double coeff_sum(const std::vector<PhiTerm>& terms, int k) {
    double s = 0.0;
    for (const auto& t : terms) {
        if (t.k == k) s += t.c;
    }
    return s;
}

DenseMatrix laplace1d(int n) {
    DenseMatrix t(n, n);
    const double h = 1.0 / (n + 1);
    for (int i = 0; i < n; ++i) {
        t(i, i) = 2.0 / (h * h);
        if (i > 0) t(i, i - 1) = -1.0 / (h * h);
        if (i + 1 < n) t(i, i + 1) = -1.0 / (h * h);
    }
    return t;
}

} // namespace

TEST_CASE("homogeneous step reduces to the matrix exponential") {
    KroneckerSum a({laplace1d(8)});
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u01(-1.0, 1.0);
    std::vector<double> u0(8);
    for (double& x : u0) x = u01(rng);

    const double tau = 0.05;
    SourceFn zero = [](double, const std::vector<double>& u) {
        return std::vector<double>(u.size(), 0.0);
    };
    const auto res = integrate(a, zero, u0, 0.0, tau, 1, exp_euler_tableau());

    auto dense = assemble_dense(a);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) dense(i, j) *= -tau;
    const auto want = matvec(expm(dense), u0);

    double num = 0.0, den = 0.0;
    for (int i = 0; i < 8; ++i) {
        num = std::max(num, std::abs(res.u[i] - want[i]));
        den = std::max(den, std::abs(want[i]));
    }
    REQUIRE(num <= 1e-13 * den);
}

TEST_CASE("all three schemes solve the homogeneous problem exactly per step") {
    // With no source every stage correction vanishes and each scheme
    // reduces to the pure exponential propagator.
    KroneckerSum a({laplace1d(6)});
    std::vector<double> u0(6, 1.0);
    SourceFn zero = [](double, const std::vector<double>& u) {
        return std::vector<double>(u.size(), 0.0);
    };
    auto dense = assemble_dense(a);
    for (int i = 0; i < 36; ++i) dense.data()[i] *= -0.02;
    const auto want = matvec(expm(dense), u0);
    for (const auto& tab : {exp_euler_tableau(), exp_rk2_tableau(), exp_rk3_tableau()}) {
        const auto res = integrate(a, zero, u0, 0.0, 0.02, 1, tab);
        for (int i = 0; i < 6; ++i) REQUIRE(res.u[i] == Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("empirical convergence orders on a stiff scalar problem") {
    // u' = -2u + sin(u) + g(t) with g chosen so that u(t) = exp(-t).
    KroneckerSum a({DenseMatrix(1, 1, {2.0})});
    SourceFn f = [](double t, const std::vector<double>& u) {
        const double e = std::exp(-t);
        return std::vector<double>{std::sin(u[0]) + e - std::sin(e)};
    };
    const std::vector<double> u0{1.0};
    const double exact = std::exp(-1.0);

    struct Scheme {
        ExpRKTableau tab;
        double order;
    };
    const std::vector<Scheme> schemes{{exp_euler_tableau(), 1.0},
                                      {exp_rk2_tableau(), 2.0},
                                      {exp_rk3_tableau(), 3.0}};
    for (const auto& s : schemes) {
        std::vector<double> taus, errs;
        for (int m : {8, 16, 32, 64, 128}) {
            const auto res = integrate(a, f, u0, 0.0, 1.0, m, s.tab);
            taus.push_back(1.0 / m);
            errs.push_back(std::abs(res.u[0] - exact));
        }
        const double slope = fitted_order(taus, errs);
        REQUIRE(slope == Approx(s.order).margin(0.25));
    }
}

TEST_CASE("one engine application per distinct matrix argument") {
    KroneckerSum a({laplace1d(5)});
    std::vector<double> u0(5, 0.5);
    SourceFn f = [](double t, const std::vector<double>& u) {
        std::vector<double> out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = 1.0 / (1.0 + u[i] * u[i]) + t;
        return out;
    };
    const int m = 7;
    REQUIRE(integrate(a, f, u0, 0.0, 0.7, m, exp_euler_tableau()).phi_calls == m);
    REQUIRE(integrate(a, f, u0, 0.0, 0.7, m, exp_rk2_tableau()).phi_calls == 2 * m);
    REQUIRE(integrate(a, f, u0, 0.0, 0.7, m, exp_rk3_tableau()).phi_calls == 3 * m);
}

TEST_CASE("tableau structure and consistency conditions") {
    SECTION("first order") {
        const auto t = exp_euler_tableau();
        REQUIRE(t.stages == 1);
        REQUIRE(t.order == 1);
        REQUIRE(coeff_sum(t.b[0], 1) == Approx(1.0));
    }
    SECTION("second order") {
        const auto t = exp_rk2_tableau();
        REQUIRE(t.stages == 2);
        REQUIRE(t.c[1] == Approx(0.5));
        // Row sum of stage coefficients carries the stage abscissa.
        REQUIRE(coeff_sum(t.a[1][0], 1) == Approx(t.c[1]));
        // Weights: the phi_1 coefficients sum to one.
        double b1 = 0.0;
        for (int i = 0; i < 2; ++i) b1 += coeff_sum(t.b[i], 1);
        REQUIRE(b1 == Approx(1.0));
        // Classical second-order condition at vanishing stiffness.
        double sum_bc = 0.0;
        for (int i = 0; i < 2; ++i) {
            double bi = 0.0;
            for (const auto& term : t.b[i]) {
                double phi0 = 1.0;
                for (int k = 1; k <= term.k; ++k) phi0 /= k;
                bi += term.c * phi0;
            }
            sum_bc += bi * t.c[i];
        }
        REQUIRE(sum_bc == Approx(0.5));
    }
    SECTION("third order") {
        const auto t = exp_rk3_tableau();
        REQUIRE(t.stages == 3);
        REQUIRE(t.c[1] == Approx(1.0 / 3.0));
        REQUIRE(t.c[2] == Approx(2.0 / 3.0));
        // Stage row sums carry the abscissae in the phi_1 coefficient and
        // cancel in the higher ones.
        REQUIRE(coeff_sum(t.a[1][0], 1) == Approx(t.c[1]));
        double row3_phi1 = coeff_sum(t.a[2][0], 1) + coeff_sum(t.a[2][1], 1);
        double row3_phi2 = coeff_sum(t.a[2][0], 2) + coeff_sum(t.a[2][1], 2);
        REQUIRE(row3_phi1 == Approx(t.c[2]));
        REQUIRE(row3_phi2 == Approx(0.0).margin(1e-15));
        // Weights: phi_1 total one, phi_2 total zero, second stage unused.
        double b_phi1 = 0.0, b_phi2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            b_phi1 += coeff_sum(t.b[i], 1);
            b_phi2 += coeff_sum(t.b[i], 2);
        }
        REQUIRE(b_phi1 == Approx(1.0));
        REQUIRE(b_phi2 == Approx(0.0).margin(1e-15));
        REQUIRE(t.b[1].empty());
        // Spot values of the defining coefficients.
        REQUIRE(coeff_sum(t.a[2][1], 2) == Approx(4.0 / (9.0 * t.c[1])));
        REQUIRE(coeff_sum(t.b[2], 2) == Approx(1.5));
    }
    SECTION("abscissa overrides") {
        const auto t2 = exp_rk2_tableau(0.75);
        REQUIRE(t2.c[1] == Approx(0.75));
        REQUIRE(coeff_sum(t2.a[1][0], 1) == Approx(0.75));
        REQUIRE(coeff_sum(t2.b[1], 1) == Approx(1.0 / 1.5));
        const auto t3 = exp_rk3_tableau(0.25);
        REQUIRE(coeff_sum(t3.a[2][1], 2) == Approx(4.0 / (9.0 * 0.25)));
        REQUIRE_THROWS_AS(exp_rk2_tableau(0.0), std::invalid_argument);
        REQUIRE_THROWS_AS(exp_rk2_tableau(1.5), std::invalid_argument);
    }
}

TEST_CASE("engine reuses plans across steps and counts applications") {
    KroneckerSum a({laplace1d(4)});
    PhiEngine eng(a, 0.1, PhiRequest{});
    REQUIRE(eng.calls() == 0);
    std::vector<std::vector<double>> bs{std::vector<double>(4, 1.0)};
    eng.apply(0.5, 2, bs);
    eng.apply(0.5, 2, bs);
    eng.apply(1.0, 1, bs);
    REQUIRE(eng.calls() == 3);
    REQUIRE(eng.tau() == Approx(0.1));
}

TEST_CASE("engine application matches the dense reference") {
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> u01(-1.0, 1.0);
    KroneckerSum a({laplace1d(5)});
    const double tau = 0.02;
    PhiEngine eng(a, tau, PhiRequest{});

    std::vector<double> b(5);
    for (double& x : b) x = u01(rng);
    std::vector<std::vector<double>> bs{b};
    const auto cols = eng.apply(0.5, 2, bs);

    auto dense = assemble_dense(a);
    for (int i = 0; i < 25; ++i) dense.data()[i] *= -0.5 * tau;
    const auto want = phi_dense_oracle(dense, b, 2);
    for (int j = 1; j <= 2; ++j) {
        const auto& ref = want[static_cast<size_t>(j - 1)];
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < 5; ++i) {
            num = std::max(num, std::abs(cols[0].col(j)[i] - ref[i]));
            den = std::max(den, std::abs(ref[i]));
        }
        REQUIRE(num <= 1e-12 * std::max(den, 1.0));
    }
}

TEST_CASE("validation") {
    KroneckerSum a({laplace1d(3)});
    SourceFn zero = [](double, const std::vector<double>& u) {
        return std::vector<double>(u.size(), 0.0);
    };
    REQUIRE_THROWS_AS(integrate(a, zero, std::vector<double>(3, 0.0), 0.0, 1.0, 0,
                                exp_euler_tableau()),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(integrate(a, zero, std::vector<double>(3, 0.0), 1.0, 1.0, 4,
                                exp_euler_tableau()),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(integrate(a, zero, std::vector<double>(2, 0.0), 0.0, 1.0, 4,
                                exp_euler_tableau()),
                      std::invalid_argument);
    SourceFn bad = [](double, const std::vector<double>&) { return std::vector<double>(1, 0.0); };
    REQUIRE_THROWS_AS(integrate(a, bad, std::vector<double>(3, 0.0), 0.0, 1.0, 2,
                                exp_euler_tableau()),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(PhiEngine(a, 0.0, PhiRequest{}), std::invalid_argument);
}
