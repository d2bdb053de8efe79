// Minimal usage example: apply phi_1..phi_4 of a 2D Laplace-type Kronecker
// sum to a vector with an automatically planned Gauss rule, then check the
// result against the dense reference.

#include <cstdio>
#include <random>

#include "phiquad/phiquad.hpp"

int main() {
    using namespace phiquad;

    // -tau * (A_x (+) A_y) with 16 elements per direction.
    const double tau = 0.125;
    DenseMatrix a1 = fe_laplacian_1d(16);
    const KroneckerSum a = KroneckerSum({a1, a1}).scaled(-tau);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> b(static_cast<size_t>(a.dim()));
    for (auto& v : b) v = u(rng);

    PhiRequest req;
    req.p = 4;
    req.eps = 1e-14;
    PhiInfo info;
    const PhiColumns y = phiquadmv(a, b, req, &info);

    std::printf("dim = %d, ||A||_inf = %.6g\n", a.dim(), info.alpha);
    std::printf("plan: l = %d, n = %d (%d quadrature points, rule %s)\n", info.l, info.n,
                info.points, quad_kind_name(info.mode));

    const auto ref = phi_dense_oracle(a, b, 4);
    for (int j = 1; j <= 4; ++j)
        std::printf("  phi_%d(A)b: rel err vs dense reference = %.3e\n", j,
                    relative_error_inf(y.col(j), ref[static_cast<size_t>(j - 1)]));
    return 0;
}
