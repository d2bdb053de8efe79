#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace phiquad {

/// Monic quartic rho^4 + a3 rho^3 + a2 rho^2 + a1 rho + a0; the error-bound
/// polynomials always have a0 = 1.
struct MonicQuartic {
    double a3 = 0.0;
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 1.0;

    template <class T>
    T eval(T x) const {
        return (((x + a3) * x + a2) * x + a1) * x + a0;
    }

    template <class T>
    T deriv(T x) const {
        return ((4.0 * x + 3.0 * a3) * x + 2.0 * a2) * x + a1;
    }
};

/// All four roots by Durand-Kerner from perturbed unit-circle starts (at most
/// 200 sweeps), then a short Newton polish per root. Coefficients are
/// magnitude-balanced first so widely scaled roots stay reachable.
inline std::array<std::complex<double>, 4> quartic_roots(const MonicQuartic& q) {
    using cd = std::complex<double>;

    double scale = 1.0;
    scale = std::max(scale, std::abs(q.a3));
    scale = std::max(scale, std::sqrt(std::abs(q.a2)));
    scale = std::max(scale, std::cbrt(std::abs(q.a1)));
    scale = std::max(scale, std::pow(std::abs(q.a0), 0.25));

    // Balanced polynomial p(z) = q(scale*z)/scale^4 keeps roots within a
    // modest disk so the unit-circle start converges quickly.
    MonicQuartic p{q.a3 / scale, q.a2 / (scale * scale), q.a1 / (scale * scale * scale),
                   q.a0 / (scale * scale * scale * scale)};

    std::array<cd, 4> z;
    const cd seed(0.4, 0.9);
    cd w(1.0, 0.0);
    for (int k = 0; k < 4; ++k) {
        w *= seed;
        z[static_cast<size_t>(k)] = w;
    }

    for (int it = 0; it < 200; ++it) {
        double step = 0.0;
        for (int k = 0; k < 4; ++k) {
            cd denom(1.0, 0.0);
            for (int j = 0; j < 4; ++j)
                if (j != k) denom *= z[static_cast<size_t>(k)] - z[static_cast<size_t>(j)];
            if (denom == cd(0.0, 0.0)) denom = cd(1e-300, 0.0);
            cd d = p.eval(z[static_cast<size_t>(k)]) / denom;
            z[static_cast<size_t>(k)] -= d;
            step = std::max(step, std::abs(d) / (1.0 + std::abs(z[static_cast<size_t>(k)])));
        }
        if (step < 1e-15) break;
    }

    for (auto& r : z) {
        r *= scale;
        for (int it = 0; it < 4; ++it) {
            cd d = q.deriv(r);
            if (std::abs(d) == 0.0) break;
            cd step = q.eval(r) / d;
            if (!std::isfinite(std::abs(step))) break;
            r -= step;
        }
    }
    return z;
}

/// Real roots strictly greater than one, deduplicated and ascending.
/// A root counts as real when |Im| <= 1e-8 * (1 + |Re|). A multiple root
/// surfaces from the solver as a tight cluster (its sqrt(eps) conditioning
/// limits each copy to ~1e-8 accuracy), so clusters narrower than 1e-6
/// relative collapse to their mean.
inline std::vector<double> real_roots_greater_one(const MonicQuartic& q) {
    std::vector<double> cand;
    for (const auto& z : quartic_roots(q)) {
        if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z.real()))) continue;
        double r = z.real();
        // Polish on the real axis; Durand-Kerner leaves conjugate dust.
        for (int it = 0; it < 8; ++it) {
            double d = q.deriv(r);
            if (d == 0.0) break;
            double step = q.eval(r) / d;
            if (!std::isfinite(step)) break;
            r -= step;
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(r))) break;
        }
        if (r > 1.0) cand.push_back(r);
    }
    std::sort(cand.begin(), cand.end());
    std::vector<double> out;
    size_t i = 0;
    while (i < cand.size()) {
        size_t j = i + 1;
        double sum = cand[i];
        while (j < cand.size() && cand[j] - cand[j - 1] <= 1e-6 * (1.0 + std::abs(cand[j]))) {
            sum += cand[j];
            ++j;
        }
        out.push_back(sum / static_cast<double>(j - i));
        i = j;
    }
    return out;
}

/// Root of a monotone f on a bracketing interval [lo, hi] via the Illinois
/// variant of regula falsi; falls back to bisection when the secant point
/// leaves the bracket. Stops once the bracket width is below tol.
template <class F>
double find_root_monotone(F&& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("find_root_monotone: empty interval");
    double fa = f(lo), fb = f(hi);
    if (fa == 0.0) return lo;
    if (fb == 0.0) return hi;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("find_root_monotone: endpoints do not bracket a root");
    double a = lo, b = hi;
    int last = 0; // which side was replaced last: -1 = a, +1 = b
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        double m = b - fb * (b - a) / (fb - fa);
        if (!(m > a && m < b) || !std::isfinite(m)) m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
            if (last == -1) fb *= 0.5; // Illinois damping
            last = -1;
        } else {
            b = m;
            fb = fm;
            if (last == +1) fa *= 0.5;
            last = +1;
        }
    }
    return 0.5 * (a + b);
}

} // namespace phiquad
