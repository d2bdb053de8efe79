#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "phiquad/dense.hpp"
#include "phiquad/integrators.hpp"
#include "phiquad/kron.hpp"

namespace phiquad {

/// 1D mesh as its node coordinates, ascending.
struct Mesh1D {
    std::vector<double> nodes;

    int elements() const { return static_cast<int>(nodes.size()) - 1; }
    double h(int e) const { return nodes[static_cast<size_t>(e + 1)] - nodes[static_cast<size_t>(e)]; }
};

inline Mesh1D uniform_mesh(int n_elem, double a, double b) {
    if (n_elem < 1) throw std::invalid_argument("uniform_mesh: need at least one element");
    if (!(b > a)) throw std::invalid_argument("uniform_mesh: need b > a");
    Mesh1D m;
    m.nodes.resize(static_cast<size_t>(n_elem) + 1);
    for (int i = 0; i <= n_elem; ++i)
        m.nodes[static_cast<size_t>(i)] = a + (b - a) * (static_cast<double>(i) / n_elem);
    m.nodes.front() = a;
    m.nodes.back() = b;
    return m;
}

/// Piecewise-uniform layer-adapted mesh on (-1, 0): half the elements on the
/// coarse part (-1, -sigma), half clustered in (-sigma, 0) to resolve a
/// boundary layer of width ~eps_diff at the right end. Without an explicit
/// transition, sigma = min(1/2, 2 eps_diff ln(n_elem)).
inline Mesh1D shishkin_mesh(int n_elem, double eps_diff,
                            std::optional<double> transition = std::nullopt) {
    if (n_elem < 2 || n_elem % 2 != 0)
        throw std::invalid_argument("shishkin_mesh: need an even element count >= 2");
    if (!(eps_diff > 0.0)) throw std::invalid_argument("shishkin_mesh: need eps_diff > 0");
    const double sigma =
        transition ? *transition : std::min(0.5, 2.0 * eps_diff * std::log(static_cast<double>(n_elem)));
    if (!(sigma > 0.0 && sigma < 1.0))
        throw std::invalid_argument("shishkin_mesh: transition must lie in (0,1)");
    const int half = n_elem / 2;
    Mesh1D m;
    m.nodes.resize(static_cast<size_t>(n_elem) + 1);
    for (int i = 0; i <= half; ++i)
        m.nodes[static_cast<size_t>(i)] = -1.0 + (1.0 - sigma) * (static_cast<double>(i) / half);
    for (int i = 1; i <= half; ++i)
        m.nodes[static_cast<size_t>(half + i)] = -sigma + sigma * (static_cast<double>(i) / half);
    m.nodes.back() = 0.0;
    return m;
}

/// Uniform p1 elements on (a, b), homogeneous Dirichlet ends, diagonally
/// lumped mass: the classical (1/h^2) tridiag(-1, 2, -1) on the n_elem - 1
/// interior nodes.
inline DenseMatrix fe_laplacian_1d(int n_elem, double a = 0.0, double b = 1.0) {
    if (n_elem < 2) throw std::invalid_argument("fe_laplacian_1d: need at least two elements");
    const double h = (b - a) / n_elem;
    const int n = n_elem - 1;
    DenseMatrix m(n, n);
    const double s = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 2.0 * s;
        if (i > 0) m(i, i - 1) = -s;
        if (i + 1 < n) m(i, i + 1) = -s;
    }
    return m;
}

enum class BC { dirichlet, neumann };

/// p1 Galerkin discretization of -eps u'' + gamma u' on a 1D mesh with a
/// diagonally lumped mass matrix, one boundary condition per end; Dirichlet
/// degrees of freedom are removed from the returned operator.
inline DenseMatrix fe_advdiff_1d(const Mesh1D& mesh, double eps_diff, double gamma, BC left,
                                 BC right) {
    const int ne = mesh.elements();
    if (ne < 2) throw std::invalid_argument("fe_advdiff_1d: need at least two elements");
    if (!(eps_diff > 0.0)) throw std::invalid_argument("fe_advdiff_1d: need eps_diff > 0");
    const int nn = ne + 1;

    // Assemble K + C and the lumped mass over all nodes first.
    DenseMatrix kc(nn, nn);
    std::vector<double> lump(static_cast<size_t>(nn), 0.0);
    for (int e = 0; e < ne; ++e) {
        const double h = mesh.h(e);
        const double kd = eps_diff / h;
        // element stiffness [kd, -kd; -kd, kd], element advection
        // gamma * [-1/2, 1/2; -1/2, 1/2], element lumped mass h/2 per node
        kc(e, e) += kd - gamma / 2.0;
        kc(e, e + 1) += -kd + gamma / 2.0;
        kc(e + 1, e) += -kd - gamma / 2.0;
        kc(e + 1, e + 1) += kd + gamma / 2.0;
        lump[static_cast<size_t>(e)] += h / 2.0;
        lump[static_cast<size_t>(e + 1)] += h / 2.0;
    }

    std::vector<int> keep;
    for (int i = 0; i < nn; ++i) {
        const bool boundary = i == 0 || i == nn - 1;
        const BC bc = i == 0 ? left : right;
        if (boundary && bc == BC::dirichlet) continue;
        keep.push_back(i);
    }
    const int n = static_cast<int>(keep.size());
    DenseMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = kc(keep[static_cast<size_t>(i)], keep[static_cast<size_t>(j)]) / lump[static_cast<size_t>(keep[static_cast<size_t>(i)])];
    return a;
}

/// A Kronecker-sum operator with nodal data: u' = -a u (+ source).
struct TensorProblem {
    KroneckerSum a;
    std::vector<double> b;
};

/// 3D Laplacian on the unit cube, 2^r uniform elements per direction,
/// homogeneous Dirichlet; b samples sin(pi x) sin(pi y) sin(pi z) at the
/// interior nodes (leftmost factor slowest).
inline TensorProblem make_problem1(int r) {
    if (r < 1 || r > 12) throw std::invalid_argument("make_problem1: need 1 <= r <= 12");
    const int ne = 1 << r;
    const int n = ne - 1;
    const double h = 1.0 / ne;
    DenseMatrix a1 = fe_laplacian_1d(ne);
    std::vector<double> s(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = std::sin(std::numbers::pi * (i + 1) * h);
    std::vector<double> b(static_cast<size_t>(n) * n * n);
    size_t t = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                b[t++] = s[static_cast<size_t>(i)] * s[static_cast<size_t>(j)] * s[static_cast<size_t>(k)];
    return TensorProblem{KroneckerSum({a1, a1, a1}), std::move(b)};
}

/// 2D advection-diffusion on (-1,0) x (-0.5,0.5) with a right boundary layer:
/// x uses a layer-adapted mesh (2^r elements, transition 1/16, Neumann left,
/// Dirichlet right), y a uniform diffusion-only mesh (2^r elements, Dirichlet
/// ends); eps = 1e-2, unit advection along x. b holds the nodal values of
///   u0(x,y) = 10 x (y^2 - 1/4) + (e^{r1 x} - e^{r2 x})/(e^{-r1} - e^{-r2}) cos(pi y)
/// with r1,2 = (1 +- sqrt(1 + 4 pi^2 eps^2)) / (2 eps).
inline TensorProblem make_problem2(int r) {
    if (r < 2 || r > 14) throw std::invalid_argument("make_problem2: need 2 <= r <= 14");
    const int ne = 1 << r;
    const double eps = 1e-2;
    const double gamma = 1.0;

    const Mesh1D mx = shishkin_mesh(ne, eps, 1.0 / 16.0);
    DenseMatrix ax = fe_advdiff_1d(mx, eps, gamma, BC::neumann, BC::dirichlet);
    const Mesh1D my = uniform_mesh(ne, -0.5, 0.5);
    DenseMatrix ay = fe_advdiff_1d(my, eps, 0.0, BC::dirichlet, BC::dirichlet);

    const int nx = ax.rows(); // nodes 0 .. ne-1 (right Dirichlet node removed)
    const int ny = ay.rows(); // nodes 1 .. ne-1

    const double disc = std::sqrt(1.0 + 4.0 * std::numbers::pi * std::numbers::pi * eps * eps);
    const double r1 = (1.0 + disc) / (2.0 * eps);
    const double r2 = (1.0 - disc) / (2.0 * eps);
    const double den = std::exp(-r1) - std::exp(-r2);

    std::vector<double> b(static_cast<size_t>(nx) * ny);
    size_t t = 0;
    for (int i = 0; i < nx; ++i) {
        const double x = mx.nodes[static_cast<size_t>(i)];
        const double layer = (std::exp(r1 * x) - std::exp(r2 * x)) / den;
        for (int j = 0; j < ny; ++j) {
            const double y = my.nodes[static_cast<size_t>(j + 1)];
            b[t++] = 10.0 * x * (y * y - 0.25) + layer * std::cos(std::numbers::pi * y);
        }
    }
    return TensorProblem{KroneckerSum({ax, ay}), std::move(b)};
}

/// Semilinear parabolic test problem with a known exact solution.
struct SemilinearProblem {
    KroneckerSum a;
    std::vector<double> u0;
    SourceFn f;
    std::function<std::vector<double>(double)> exact;
};

/// 2D heat equation on the unit square with the nonlinear source 1/(1+u^2)
/// and a manufactured forcing chosen so the exact solution is
/// u(x,y,t) = x(1-x) y(1-y) e^t; homogeneous Dirichlet, 2^r uniform elements
/// per direction.
inline SemilinearProblem make_problem3(int r) {
    if (r < 1 || r > 12) throw std::invalid_argument("make_problem3: need 1 <= r <= 12");
    const int ne = 1 << r;
    const int n = ne - 1;
    const double h = 1.0 / ne;
    DenseMatrix a1 = fe_laplacian_1d(ne);

    std::vector<double> w(static_cast<size_t>(n) * n), quad(static_cast<size_t>(n) * n);
    size_t t = 0;
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1) * h;
        for (int j = 0; j < n; ++j) {
            const double y = (j + 1) * h;
            w[t] = x * (1.0 - x) * y * (1.0 - y);
            quad[t] = 2.0 * (x * (1.0 - x) + y * (1.0 - y));
            ++t;
        }
    }

    SemilinearProblem p{KroneckerSum({a1, a1}), w, nullptr, nullptr};
    p.f = [w, quad](double time, const std::vector<double>& u) {
        const double et = std::exp(time);
        std::vector<double> out(u.size());
        for (size_t k = 0; k < u.size(); ++k) {
            const double ue = w[k] * et;
            out[k] = 1.0 / (1.0 + u[k] * u[k]) + ue + quad[k] * et - 1.0 / (1.0 + ue * ue);
        }
        return out;
    };
    p.exact = [w](double time) {
        const double et = std::exp(time);
        std::vector<double> out(w.size());
        for (size_t k = 0; k < w.size(); ++k) out[k] = w[k] * et;
        return out;
    };
    return p;
}

/// Infinity-norm relative error of `approx` against `ref`; falls back to the
/// absolute error when the reference vanishes.
inline double relative_error_inf(const std::vector<double>& approx,
                                 const std::vector<double>& ref) {
    if (approx.size() != ref.size())
        throw std::invalid_argument("relative_error_inf: length mismatch");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < approx.size(); ++i) {
        num = std::max(num, std::abs(approx[i] - ref[i]));
        den = std::max(den, std::abs(ref[i]));
    }
    return den == 0.0 ? num : num / den;
}

} // namespace phiquad
