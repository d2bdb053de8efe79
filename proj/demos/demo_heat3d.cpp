// Integrates the homogeneous 3D heat equation u' = -A u on the unit cube
// with one exponential Euler step. The initial state is the lowest discrete
// eigenmode, so the semidiscrete solution decays exactly like
// exp(-3 lambda_1 T) and the step reproduces it to quadrature accuracy.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "phiquad/phiquad.hpp"

int main() {
    using namespace phiquad;

    const int r = 4;
    auto prob = make_problem1(r);

    const double T = 0.125;
    const SourceFn zero = [](double, const std::vector<double>& u) {
        return std::vector<double>(u.size(), 0.0);
    };
    const auto res = integrate(prob.a, zero, prob.b, 0.0, T, 1, exp_euler_tableau());

    const int ne = 1 << r;
    const double h = 1.0 / ne;
    const double lambda1 =
        4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2.0), 2);
    std::vector<double> exact = prob.b;
    for (auto& v : exact) v *= std::exp(-3.0 * lambda1 * T);

    std::printf("dim = %d, lambda_1 = %.9g, phi evaluations = %d\n", prob.a.dim(), lambda1,
                res.phi_calls);
    std::printf("||u(T) - exact||_inf / ||exact||_inf = %.3e\n",
                relative_error_inf(res.u, exact));
    return 0;
}
