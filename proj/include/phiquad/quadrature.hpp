#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace phiquad {

enum class QuadKind { gauss_legendre, clenshaw_curtis };

inline const char* quad_kind_name(QuadKind k) {
    return k == QuadKind::gauss_legendre ? "gauss" : "cc";
}

/// Quadrature rule on [0, 1] with strictly increasing nodes.
struct QuadratureRule {
    QuadKind kind = QuadKind::gauss_legendre;
    std::vector<double> nodes;
    std::vector<double> weights;

    int points() const { return static_cast<int>(nodes.size()); }
};

/// m-point Gauss-Legendre rule mapped to [0, 1]. Nodes are Newton-refined
/// roots of the Legendre polynomial from Chebyshev-angle initial guesses.
inline QuadratureRule gauss_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
    QuadratureRule rule;
    rule.kind = QuadKind::gauss_legendre;
    rule.nodes.resize(static_cast<size_t>(m));
    rule.weights.resize(static_cast<size_t>(m));
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Three-term recurrence for P_m(x) and P'_m(x).
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < m; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            dp = m * (x * p0 - p1) / (x * x - 1.0);
            double step = p0 / dp;
            x -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x descends from +1 as i grows; store ascending on [0, 1].
        rule.nodes[static_cast<size_t>(i)] = 0.5 * (1.0 - x);
        rule.weights[static_cast<size_t>(i)] = 0.5 * w;
        rule.nodes[static_cast<size_t>(m - 1 - i)] = 0.5 * (1.0 + x);
        rule.weights[static_cast<size_t>(m - 1 - i)] = 0.5 * w;
    }
    return rule;
}

/// m-point Clenshaw-Curtis rule mapped to [0, 1] (m >= 2). Nodes are mapped
/// Chebyshev extrema; doubling the panel count (m -> 2m-1) nests: old node i
/// reappears as new node 2i. Weights use the direct cosine-sum formula.
inline QuadratureRule clenshaw_curtis(int m) {
    if (m < 2) throw std::invalid_argument("clenshaw_curtis: need at least two points");
    QuadratureRule rule;
    rule.kind = QuadKind::clenshaw_curtis;
    rule.nodes.resize(static_cast<size_t>(m));
    rule.weights.resize(static_cast<size_t>(m));
    const int nseg = m - 1;
    for (int j = 0; j < m; ++j) {
        const double theta = std::numbers::pi * j / nseg;
        rule.nodes[static_cast<size_t>(j)] = 0.5 * (1.0 - std::cos(theta));
        double s = 0.0;
        for (int k = 1; k <= nseg / 2; ++k) {
            const double bk = (2 * k == nseg) ? 1.0 : 2.0;
            s += bk / (4.0 * k * k - 1.0) * std::cos(2.0 * k * theta);
        }
        const double cj = (j == 0 || j == nseg) ? 1.0 : 2.0;
        rule.weights[static_cast<size_t>(j)] = 0.5 * cj / nseg * (1.0 - s);
    }
    return rule;
}

/// Shared rule cache; rebuilding Gauss nodes per call would dominate small
/// runs. Returned references stay valid for the program lifetime.
inline const QuadratureRule& cached_rule(QuadKind kind, int m) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(static_cast<int>(kind), m);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto rule = std::make_unique<QuadratureRule>(
            kind == QuadKind::gauss_legendre ? gauss_legendre(m) : clenshaw_curtis(m));
        it = cache.emplace(key, std::move(rule)).first;
    }
    return *it->second;
}

} // namespace phiquad
