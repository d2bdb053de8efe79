#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "phiquad/quadrature.hpp"
#include "phiquad/roots.hpp"
#include "phiquad/util.hpp"

namespace phiquad {

/// Inputs of the a-priori quadrature error bound for one integrand: the rule
/// family, the node parameter n (real-valued so the planner can relax it),
/// the integrand's monomial degree p (phi_{p+1} has degree p), alpha =
/// ||A||_inf (or an upper bound) and beta = ||b||.
struct BoundQuery {
    double n = 0.0;
    int p = 0;
    double alpha = 0.0;
    double beta = 1.0;
    QuadKind kind = QuadKind::gauss_legendre;
};

/// Work model C(n, l, p) = c1*d*n + c2*(n + l*p): c1 weighs the per-node 1-D
/// exponentials, c2 the Kronecker-action sweeps (quadrature plus squaring).
struct CostModel {
    double c1 = 0.0;
    double c2 = 1.0;
    int d = 1;

    double cost(double n, int l, int p) const {
        return c1 * d * n + c2 * (n + static_cast<double>(l) * p);
    }
};

struct QuadraturePlan {
    int l = 0;
    int n = 0;
    double cost = 0.0;
};

namespace detail {

/// Clenshaw-Curtis admits the sharper even-n form: an even integer n is
/// promoted to n+1 throughout (coefficients and decay exponent); an odd
/// integer stays. Non-integer n (planner relaxation) extends the even branch
/// continuously.
inline double cc_effective_n(double n) {
    const double r = std::round(n);
    if (std::abs(n - r) < 1e-9) {
        const long long k = static_cast<long long>(r);
        return (k % 2 == 0) ? n + 1.0 : n;
    }
    return n + 1.0;
}

inline double bound_exponent_n(const BoundQuery& q) {
    return q.kind == QuadKind::gauss_legendre ? q.n : cc_effective_n(q.n);
}

} // namespace detail

/// Log of the ellipse-parameter error bound at a fixed rho > 1:
///   (144/35) * M(rho) * rho^{-2n} / (rho^2 - 1)        (Gauss-Legendre)
///   (144/35) * M(rho) * rho^{1-n} / (rho^2 - 1)        (Clenshaw-Curtis)
/// with M(rho) = g^p / (2^{p+1} p!) * exp(g*alpha/2) * beta, g = (rho+1)^2/(2 rho).
inline double log_bound_at_rho(const BoundQuery& q, double rho) {
    if (!(rho > 1.0)) throw std::invalid_argument("log_bound_at_rho: need rho > 1");
    if (!(q.alpha > 0.0)) throw std::invalid_argument("log_bound_at_rho: need alpha > 0");
    if (q.p < 0) throw std::invalid_argument("log_bound_at_rho: need p >= 0");
    if (q.beta < 0.0) throw std::invalid_argument("log_bound_at_rho: need beta >= 0");
    if (q.beta == 0.0) return -std::numeric_limits<double>::infinity();
    const double g = (rho + 1.0) * (rho + 1.0) / (2.0 * rho);
    const double log_m = q.p * std::log(g) - (q.p + 1.0) * std::numbers::ln2 -
                         std::lgamma(q.p + 1.0) + 0.5 * g * q.alpha + std::log(q.beta);
    const double ne = detail::bound_exponent_n(q);
    const double decay = q.kind == QuadKind::gauss_legendre ? -2.0 * q.n * std::log(rho)
                                                            : (1.0 - ne) * std::log(rho);
    return std::log(144.0 / 35.0) + log_m + decay - std::log(rho * rho - 1.0);
}

/// Coefficients of the monic quartic whose roots > 1 are the stationary
/// points of the bound in rho.
inline MonicQuartic bound_quartic(const BoundQuery& q) {
    const double a = q.alpha;
    MonicQuartic poly;
    poly.a2 = -(2.0 + 8.0 * q.p / a);
    poly.a0 = 1.0;
    if (q.kind == QuadKind::gauss_legendre) {
        poly.a3 = -4.0 / a * (2.0 * (q.n + 1.0) - q.p);
        poly.a1 = 4.0 / a * (2.0 * q.n + q.p);
    } else {
        const double ne = detail::cc_effective_n(q.n);
        poly.a3 = -4.0 / a * (ne + 1.0 - q.p);
        poly.a1 = 4.0 / a * (ne - 1.0 + q.p);
    }
    return poly;
}

/// Log of the sharp bound: evaluates the bound at every admissible
/// stationary rho > 1 and keeps the minimum. The quartic always has such a
/// root (its value at 1 is -8/alpha < 0).
inline double theorem_bound(const BoundQuery& q) {
    if (!(q.alpha > 0.0)) throw std::invalid_argument("theorem_bound: need alpha > 0");
    if (q.beta == 0.0) return -std::numeric_limits<double>::infinity();
    const auto roots = real_roots_greater_one(bound_quartic(q));
    if (roots.empty()) throw ConvergenceError("theorem_bound: no stationary rho > 1 found");
    double best = std::numeric_limits<double>::infinity();
    for (double rho : roots) best = std::min(best, log_bound_at_rho(q, rho));
    return best;
}

/// Log of the closed-form bound, valid once n clears the stated threshold:
///   Gauss: beta/(2^{p+1} p!) * ((2n-p)/(e*alpha/2))^{-(2n-p)},
///          n >= max(2, ceil((1+sqrt 2)/4*alpha + p/2))
///   CC:    exponent (n-p) with even n (odd n drops to n-1),
///          n >= max(4, ceil((1+sqrt 2)/2*alpha + p))
inline double corollary_bound(const BoundQuery& q) {
    if (!(q.alpha > 0.0)) throw std::invalid_argument("corollary_bound: need alpha > 0");
    if (q.beta == 0.0) return -std::numeric_limits<double>::infinity();
    const double sqrt2 = std::numbers::sqrt2;
    double expo;
    if (q.kind == QuadKind::gauss_legendre) {
        const double n_min = std::max(2.0, std::ceil((1.0 + sqrt2) / 4.0 * q.alpha + 0.5 * q.p));
        if (q.n < n_min) throw std::invalid_argument("corollary_bound: n below validity threshold");
        expo = 2.0 * q.n - q.p;
    } else {
        const double n_min = std::max(4.0, std::ceil((1.0 + sqrt2) / 2.0 * q.alpha + q.p));
        if (q.n < n_min) throw std::invalid_argument("corollary_bound: n below validity threshold");
        double n_even = q.n;
        const double r = std::round(q.n);
        if (std::abs(q.n - r) < 1e-9 && static_cast<long long>(r) % 2 != 0) n_even = q.n - 1.0;
        expo = n_even - q.p;
    }
    const double log_pref =
        std::log(q.beta) - (q.p + 1.0) * std::numbers::ln2 - std::lgamma(q.p + 1.0);
    return log_pref - expo * std::log(expo / (std::numbers::e * q.alpha / 2.0));
}

/// Log of the worst-case bound over the p integrands phi_1..phi_p at node
/// parameter n (phi_q has monomial degree q-1). Decreasing in n.
inline double quaderr(double n, int p, double alpha, double beta, QuadKind kind) {
    if (p < 1) throw std::invalid_argument("quaderr: need p >= 1");
    double worst = -std::numeric_limits<double>::infinity();
    for (int q = 1; q <= p; ++q) {
        BoundQuery query{n, q - 1, alpha, beta, kind};
        worst = std::max(worst, theorem_bound(query));
    }
    return worst;
}

/// Smallest integer node parameter with quaderr <= log(eps): doubles n until
/// the bound clears the target, then sharpens by a continuous-n root solve on
/// the bracket. The n+1-point rule is an upper bound on what is needed.
inline int quadnodes(double eps, int p, double alpha, double beta, QuadKind kind) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("quadnodes: need 0 < eps < 1");
    if (p < 1) throw std::invalid_argument("quadnodes: need p >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("quadnodes: need alpha > 0");
    const double target = std::log(eps);
    int n = kind == QuadKind::gauss_legendre ? 2 : 4;
    double err = quaderr(n, p, alpha, beta, kind);
    if (err <= target) return n; // degenerate bracket: smallest n already passes
    while (err > target) {
        if (n > (1 << 20)) throw ConvergenceError("quadnodes: node count diverged");
        n *= 2;
        err = quaderr(n, p, alpha, beta, kind);
    }
    const double lo = n / 2.0, hi = n;
    const double root = find_root_monotone(
        [&](double x) { return quaderr(x, p, alpha, beta, kind) - target; }, lo, hi, 1e-6);
    int result = static_cast<int>(std::ceil(root - 1e-9));
    if (kind == QuadKind::gauss_legendre &&
        quaderr(result, p, alpha, beta, kind) > target + 1e-12)
        ++result;
    return result;
}

/// Joint choice of scaling level l and node parameter n: scans l from
/// ceil(log2 alpha) down to 0, prices each candidate with the cost model and
/// stops at the first cost increase (the profile is unimodal in l).
inline QuadraturePlan setup_quadrature(double eps, int p, double alpha, double beta,
                                       QuadKind kind, const CostModel& cost = CostModel{}) {
    if (!(alpha > 0.0)) throw std::invalid_argument("setup_quadrature: need alpha > 0");
    int l_max = 0;
    if (alpha > 1.0) l_max = static_cast<int>(std::ceil(std::log2(alpha) - 1e-12));
    QuadraturePlan best;
    bool have = false;
    for (int l = l_max; l >= 0; --l) {
        const double alpha_l = std::ldexp(alpha, -l);
        const int n = quadnodes(eps, p, alpha_l, beta, kind);
        const double c = cost.cost(n, l, p);
        if (!have || c < best.cost) {
            best = QuadraturePlan{l, n, c};
            have = true;
        } else if (c > best.cost) {
            // Cost is convex in l, so the first strict increase past the
            // incumbent ends the search. Plateaus keep scanning: the minimum
            // can sit just beyond a tie.
            break;
        }
    }
    return best;
}

} // namespace phiquad
