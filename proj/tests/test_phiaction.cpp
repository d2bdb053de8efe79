#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"
#include "phiquad/kron.hpp"
#include "phiquad/oracle.hpp"
#include "phiquad/phiaction.hpp"

using namespace phiquad;
using Catch::Approx;

namespace {

std::vector<double> random_vector(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

DenseMatrix random_matrix(std::mt19937& rng, int n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = u(rng);
    return m;
}

KroneckerSum laplace2d(int nx, int ny) {
    auto second_diff = [](int n) {
        DenseMatrix t(n, n);
        const double h = 1.0 / (n + 1);
        for (int i = 0; i < n; ++i) {
            t(i, i) = -2.0 / (h * h);
            if (i > 0) t(i, i - 1) = 1.0 / (h * h);
            if (i + 1 < n) t(i, i + 1) = 1.0 / (h * h);
        }
        return t;
    };
    return KroneckerSum({second_diff(nx), second_diff(ny)});
}

double column_rel_err(const PhiColumns& got, const std::vector<std::vector<double>>& want,
                      int j) {
    double num = 0.0, den = 0.0;
    const auto& col = got.col(j);
    const auto& ref = want[static_cast<size_t>(j - 1)];
    for (size_t i = 0; i < ref.size(); ++i) {
        num = std::max(num, std::abs(col[i] - ref[i]));
        den = std::max(den, std::abs(ref[i]));
    }
    return den == 0.0 ? num : num / den;
}

} // namespace

TEST_CASE("zero matrix: exact factorial columns") {
    KroneckerSum a({DenseMatrix(3, 3), DenseMatrix(2, 2)});
    std::mt19937 rng(11);
    const auto b = random_vector(rng, 6);
    const auto cols = phi_fixed(a, b, 5, cached_rule(QuadKind::gauss_legendre, 8));
    double fact = 1.0;
    for (int j = 1; j <= 5; ++j) {
        fact *= j;
        for (int i = 0; i < 6; ++i)
            REQUIRE(cols.col(j)[i] == Approx(b[i] / fact).margin(1e-15));
    }
}

TEST_CASE("scalar closed forms") {
    // phi_1(1) = e - 1, phi_1(2) = (e^2-1)/2, phi_2(2) = (e^2-3)/4.
    KroneckerSum one({DenseMatrix(1, 1, {1.0})});
    KroneckerSum two({DenseMatrix(1, 1, {2.0})});
    const std::vector<double> b{1.0};
    const auto& rule = cached_rule(QuadKind::gauss_legendre, 40);
    REQUIRE(phi_fixed(one, b, 1, rule).col(1)[0] == Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    const auto c2 = phi_fixed(two, b, 2, rule);
    REQUIRE(c2.col(1)[0] == Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-13));
    REQUIRE(c2.col(2)[0] == Approx((std::exp(2.0) - 3.0) / 4.0).epsilon(1e-13));
}

TEST_CASE("fixed-rule sweep agrees with the augmented-matrix reference") {
    std::mt19937 rng(303);
    for (int trial = 0; trial < 8; ++trial) {
        KroneckerSum a({random_matrix(rng, 3, 0.7), random_matrix(rng, 4, 0.7)});
        const auto b = random_vector(rng, 12);
        const int p = 1 + trial % 6;
        const auto cols = phi_fixed(a, b, p, cached_rule(QuadKind::gauss_legendre, 40));
        const auto want = phi_dense_oracle(a, b, p);
        for (int j = 1; j <= p; ++j) REQUIRE(column_rel_err(cols, want, j) < 1e-12);
    }
}

TEST_CASE("adaptive sweep lands bitwise on its final fixed rule") {
    std::mt19937 rng(404);
    KroneckerSum a({random_matrix(rng, 4, 0.5), random_matrix(rng, 3, 0.5)});
    const auto b = random_vector(rng, 12);
    int points = 0;
    const auto adaptive = phi_adaptive(a, b, 4, 1e-13, 1, &points);
    REQUIRE(points >= 13);
    // Nested refinement reuses every coarse node value, so the converged
    // answer coincides bit for bit with a one-shot sweep of the final rule.
    const auto fixed = phi_fixed(a, b, 4, cached_rule(QuadKind::clenshaw_curtis, points));
    for (int j = 1; j <= 4; ++j)
        for (int i = 0; i < 12; ++i) REQUIRE(adaptive.col(j)[i] == fixed.col(j)[i]);
}

TEST_CASE("adaptive sweep matches the reference at tight tolerance") {
    std::mt19937 rng(505);
    for (int trial = 0; trial < 5; ++trial) {
        KroneckerSum a({random_matrix(rng, 3, 1.0), random_matrix(rng, 3, 1.0)});
        const auto b = random_vector(rng, 9);
        const auto cols = phi_adaptive(a, b, 5, 1e-13);
        const auto want = phi_dense_oracle(a, b, 5);
        for (int j = 1; j <= 5; ++j) REQUIRE(column_rel_err(cols, want, j) < 1e-11);
    }
}

TEST_CASE("adaptive sweep refuses an unreachable tolerance") {
    KroneckerSum a({DenseMatrix(1, 1, {30.0})});
    REQUIRE_THROWS_AS(phi_adaptive(a, std::vector<double>{1.0}, 1, 1e-30), ConvergenceError);
}

TEST_CASE("argument doubling: fixed point at zero") {
    // With A = 0 the doubling identity must hold exactly: columns stay b/j!.
    KroneckerSum a({DenseMatrix(2, 2), DenseMatrix(2, 2)});
    std::mt19937 rng(21);
    const auto b = random_vector(rng, 4);
    auto cols = phi_fixed(a, b, 3, cached_rule(QuadKind::gauss_legendre, 6));
    const std::vector<DenseMatrix> exps{expm(DenseMatrix(2, 2)), expm(DenseMatrix(2, 2))};
    squaring_step(cols, exps, a.shape());
    double fact = 1.0;
    for (int j = 1; j <= 3; ++j) {
        fact *= j;
        for (int i = 0; i < 4; ++i) REQUIRE(cols.col(j)[i] == Approx(b[i] / fact).margin(1e-13));
    }
}

TEST_CASE("argument doubling agrees with the reference on the doubled matrix") {
    std::mt19937 rng(606);
    const auto ax = random_matrix(rng, 3, 0.4);
    const auto ay = random_matrix(rng, 3, 0.4);
    KroneckerSum half({ax, ay});
    auto full_ax = ax;
    auto full_ay = ay;
    for (int i = 0; i < 9; ++i) {
        full_ax.data()[i] *= 2.0;
        full_ay.data()[i] *= 2.0;
    }
    KroneckerSum full({full_ax, full_ay});

    const auto b = random_vector(rng, 9);
    auto cols = phi_fixed(half, b, 4, cached_rule(QuadKind::gauss_legendre, 40));
    squaring_step(cols, {expm(ax), expm(ay)}, half.shape());
    const auto want = phi_dense_oracle(full, b, 4);
    for (int j = 1; j <= 4; ++j) REQUIRE(column_rel_err(cols, want, j) < 1e-11);
}

TEST_CASE("planned evaluation matches the reference for both rules") {
    std::mt19937 rng(707);
    KroneckerSum a = laplace2d(5, 4);
    auto scaled = a.scaled(-0.01);
    const auto b = random_vector(rng, 20);
    const auto want = phi_dense_oracle(scaled, b, 6);

    for (QuadKind kind : {QuadKind::gauss_legendre, QuadKind::clenshaw_curtis}) {
        PhiRequest req;
        req.p = 6;
        req.eps = 1e-14;
        req.mode = kind;
        PhiInfo info;
        const auto cols = phiquadmv(scaled, b, req, &info);
        REQUIRE(info.planned);
        for (int j = 1; j <= 6; ++j) REQUIRE(column_rel_err(cols, want, j) < 1e-11);
    }
}

TEST_CASE("explicit scaling level overrides the planner") {
    std::mt19937 rng(808);
    KroneckerSum a = laplace2d(4, 4);
    auto scaled = a.scaled(-0.005);
    const auto b = random_vector(rng, 16);
    const auto want = phi_dense_oracle(scaled, b, 3);

    PhiRequest req;
    req.p = 3;
    req.mode = QuadKind::gauss_legendre;
    req.l = 2;
    PhiInfo info;
    const auto cols = phiquadmv(scaled, b, req, &info);
    REQUIRE(info.l == 2);
    REQUIRE_FALSE(info.planned);
    for (int j = 1; j <= 3; ++j) REQUIRE(column_rel_err(cols, want, j) < 1e-11);
}

TEST_CASE("scaling invariance: adjacent levels agree") {
    std::mt19937 rng(909);
    KroneckerSum a = laplace2d(5, 5);
    auto scaled = a.scaled(-0.02);
    const auto b = random_vector(rng, 25);

    PhiRequest req;
    req.p = 4;
    req.mode = QuadKind::gauss_legendre;
    req.l = 1;
    const auto lo = phiquadmv(scaled, b, req);
    req.l = 2;
    const auto hi = phiquadmv(scaled, b, req);
    for (int j = 1; j <= 4; ++j) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 25; ++i) {
            num = std::max(num, std::abs(lo.col(j)[i] - hi.col(j)[i]));
            den = std::max(den, std::abs(hi.col(j)[i]));
        }
        REQUIRE(num <= 1e-10 * std::max(den, 1.0));
    }
}

TEST_CASE("linear combination equals the weighted column sum") {
    std::mt19937 rng(111);
    KroneckerSum a({random_matrix(rng, 3, 0.6), random_matrix(rng, 3, 0.6)});
    std::vector<std::vector<double>> bs;
    for (int j = 0; j < 4; ++j) bs.push_back(random_vector(rng, 9));
    const auto& rule = cached_rule(QuadKind::gauss_legendre, 30);

    const auto combo = phi_lincomb(a, bs, rule);

    std::vector<double> want(9, 0.0);
    for (int j = 1; j <= 4; ++j) {
        const auto cols = phi_fixed(a, bs[j - 1], j, rule);
        for (int i = 0; i < 9; ++i) want[i] += cols.col(j)[i];
    }
    for (int i = 0; i < 9; ++i) REQUIRE(combo[i] == Approx(want[i]).margin(1e-12));
}

TEST_CASE("thread count never changes the bits") {
    std::mt19937 rng(222);
    KroneckerSum a = laplace2d(6, 5);
    auto scaled = a.scaled(-0.03);
    const auto b = random_vector(rng, 30);

    PhiRequest req1;
    req1.p = 5;
    req1.mode = QuadKind::clenshaw_curtis;
    req1.threads = 1;
    PhiRequest req4 = req1;
    req4.threads = 4;

    const auto r1 = phiquadmv(scaled, b, req1);
    const auto r4 = phiquadmv(scaled, b, req4);
    const auto r1b = phiquadmv(scaled, b, req1);
    for (int j = 1; j <= 5; ++j)
        for (int i = 0; i < 30; ++i) {
            REQUIRE(r1.col(j)[i] == r4.col(j)[i]);
            REQUIRE(r1.col(j)[i] == r1b.col(j)[i]);
        }
}

TEST_CASE("multi right-hand-side form matches the single form per slot") {
    std::mt19937 rng(333);
    KroneckerSum a({random_matrix(rng, 3, 0.5), random_matrix(rng, 3, 0.5)});
    std::vector<std::vector<double>> bs{random_vector(rng, 9), random_vector(rng, 9)};

    PhiRequest req;
    req.p = 3;
    const auto multi = phiquadmv_multi(a, bs, req);
    REQUIRE(multi.size() == 2);
    // A shared plan is used across slots; compare against a joint call with
    // the same request rather than per-slot replans.
    for (std::size_t s = 0; s < 2; ++s)
        for (int j = 1; j <= 3; ++j) {
            const auto want = phi_dense_oracle(a, bs[s], 3);
            REQUIRE(column_rel_err(multi[s], want, j) < 1e-11);
        }
}

TEST_CASE("input validation") {
    KroneckerSum a({DenseMatrix(2, 2)});
    REQUIRE_THROWS_AS(phi_fixed(a, std::vector<double>{1.0}, 1,
                                cached_rule(QuadKind::gauss_legendre, 4)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(phi_fixed(a, std::vector<double>(2, 0.0), 0,
                                cached_rule(QuadKind::gauss_legendre, 4)),
                      std::invalid_argument);
    PhiColumns cols;
    cols.dim = 2;
    cols.cols = {{1.0, 2.0}};
    REQUIRE_THROWS_AS(cols.col(2), std::out_of_range);
}
