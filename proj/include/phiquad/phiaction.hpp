#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "phiquad/bounds.hpp"
#include "phiquad/dense.hpp"
#include "phiquad/kron.hpp"
#include "phiquad/quadrature.hpp"
#include "phiquad/util.hpp"

namespace phiquad {

/// Result bundle: cols[j-1] approximates phi_j(A) b for j = 1..p.
struct PhiColumns {
    int dim = 0;
    std::vector<std::vector<double>> cols;

    int p() const { return static_cast<int>(cols.size()); }

    const std::vector<double>& col(int j) const {
        if (j < 1 || j > p()) throw std::out_of_range("PhiColumns::col: index out of range");
        return cols[static_cast<size_t>(j - 1)];
    }
};

/// How phiquadmv runs: tolerance, rule family, optional fixed scaling level
/// (planned when absent) and the planner's work model. Thread count bounds
/// node-level parallelism; outputs are bitwise identical for any value.
struct PhiRequest {
    int p = 1;
    double eps = 1e-14;
    QuadKind mode = QuadKind::gauss_legendre;
    std::optional<int> l;
    CostModel cost;
    int threads = 1;
};

/// What phiquadmv actually did, for reporting.
struct PhiInfo {
    int l = 0;
    int n = 0;          // Gauss: node parameter of the planned rule
    int points = 0;     // rule size evaluated (CC: after adaptation)
    QuadKind mode = QuadKind::gauss_legendre;
    double alpha = 0.0;
    double beta = 0.0;
    bool planned = false;
    double plan_cost = 0.0;
};

namespace detail {

inline std::vector<double> inverse_factorials(int count) {
    std::vector<double> inv(static_cast<size_t>(count), 1.0);
    double f = 1.0;
    for (int k = 1; k < count; ++k) {
        f *= k;
        inv[static_cast<size_t>(k)] = 1.0 / f;
    }
    return inv;
}

/// Shared quadrature sweep: accumulates, for every right-hand side m and
/// every column j, sum_i w_i x_i^{j-1}/(j-1)! e^{(1-x_i)A} b_m over the node
/// range [i_begin, i_end). Nodes are reduced in ascending order regardless of
/// thread count; node_values (when given) captures e^{(1-x_i)A} b_m for reuse.
inline void accumulate_nodes(const KroneckerSum& a,
                             const std::vector<std::vector<double>>& bs, int p,
                             const QuadratureRule& rule, int i_begin, int i_end, int threads,
                             std::vector<std::vector<std::vector<double>>>* node_values,
                             std::vector<std::vector<std::vector<double>>>& acc) {
    const auto shape = a.shape();
    const int d = a.order();
    const int nb = static_cast<int>(bs.size());
    const int count = i_end - i_begin;
    if (count <= 0) return;

    // Per-node work is independent; results land in per-node slots.
    std::vector<std::vector<std::vector<double>>> slot(static_cast<size_t>(count));
    parallel_for(count, threads, [&](int k) {
        const int i = i_begin + k;
        const double theta = rule.nodes[static_cast<size_t>(i)];
        std::vector<DenseMatrix> es;
        es.reserve(static_cast<size_t>(d));
        for (int f = 0; f < d; ++f) es.push_back(expm(scaled(a.factor(f), 1.0 - theta)));
        auto& vs = slot[static_cast<size_t>(k)];
        vs.reserve(static_cast<size_t>(nb));
        for (int m = 0; m < nb; ++m) vs.push_back(mode_apply(es, shape, bs[static_cast<size_t>(m)]));
    });

    for (int k = 0; k < count; ++k) {
        const int i = i_begin + k;
        const double theta = rule.nodes[static_cast<size_t>(i)];
        const double w = rule.weights[static_cast<size_t>(i)];
        for (int m = 0; m < nb; ++m) {
            const auto& v = slot[static_cast<size_t>(k)][static_cast<size_t>(m)];
            double coeff = w; // w * theta^{j-1}/(j-1)!
            for (int j = 1; j <= p; ++j) {
                auto& y = acc[static_cast<size_t>(m)][static_cast<size_t>(j - 1)];
                for (size_t t = 0; t < v.size(); ++t) y[t] += coeff * v[t];
                coeff *= theta / j;
            }
        }
        if (node_values)
            (*node_values)[static_cast<size_t>(i)] = std::move(slot[static_cast<size_t>(k)]);
    }
}

inline std::vector<PhiColumns> wrap_columns(std::vector<std::vector<std::vector<double>>>&& acc,
                                            int dim) {
    std::vector<PhiColumns> out;
    out.reserve(acc.size());
    for (auto& cols : acc) out.push_back(PhiColumns{dim, std::move(cols)});
    return out;
}

inline std::vector<std::vector<std::vector<double>>> zero_acc(int nb, int p, int dim) {
    return std::vector<std::vector<std::vector<double>>>(
        static_cast<size_t>(nb),
        std::vector<std::vector<double>>(static_cast<size_t>(p),
                                         std::vector<double>(static_cast<size_t>(dim), 0.0)));
}

} // namespace detail

/// Fixed-rule quadrature for phi_1..phi_p of one Kronecker-sum argument
/// applied to several right-hand sides at once (the factor exponentials per
/// node are shared across all of them).
inline std::vector<PhiColumns> phi_fixed_multi(const KroneckerSum& a,
                                               const std::vector<std::vector<double>>& bs, int p,
                                               const QuadratureRule& rule, int threads = 1) {
    if (p < 1) throw std::invalid_argument("phi_fixed: need p >= 1");
    const int dim = a.dim();
    for (const auto& b : bs)
        if (static_cast<int>(b.size()) != dim)
            throw std::invalid_argument("phi_fixed: vector length mismatch");
    auto acc = detail::zero_acc(static_cast<int>(bs.size()), p, dim);
    detail::accumulate_nodes(a, bs, p, rule, 0, rule.points(), threads, nullptr, acc);
    return detail::wrap_columns(std::move(acc), dim);
}

inline PhiColumns phi_fixed(const KroneckerSum& a, const std::vector<double>& b, int p,
                            const QuadratureRule& rule, int threads = 1) {
    return std::move(phi_fixed_multi(a, {b}, p, rule, threads).front());
}

/// Adaptive Clenshaw-Curtis ladder: starts from the 7-point rule and doubles
/// the panel count (7 -> 13 -> 25 -> ...), recomputing only the freshly
/// inserted nodes; terminates once the relative change of every column drops
/// to eps. Fails once the node parameter exceeds 2^14.
inline std::vector<PhiColumns> phi_adaptive_multi(const KroneckerSum& a,
                                                  const std::vector<std::vector<double>>& bs,
                                                  int p, double eps, int threads = 1,
                                                  int* points_used = nullptr) {
    if (p < 1) throw std::invalid_argument("phi_adaptive: need p >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("phi_adaptive: need eps > 0");
    const int dim = a.dim();
    const int nb = static_cast<int>(bs.size());
    for (const auto& b : bs)
        if (static_cast<int>(b.size()) != dim)
            throw std::invalid_argument("phi_adaptive: vector length mismatch");

    int n = 3;
    const QuadratureRule* rule = &cached_rule(QuadKind::clenshaw_curtis, 2 * n + 1);
    std::vector<std::vector<std::vector<double>>> node_values(
        static_cast<size_t>(rule->points()));
    auto acc = detail::zero_acc(nb, p, dim);
    detail::accumulate_nodes(a, bs, p, *rule, 0, rule->points(), threads, &node_values, acc);

    while (true) {
        const auto prev = acc;
        const int n_next = 2 * n;
        if (n_next > (1 << 14))
            throw ConvergenceError("phi_adaptive: no convergence within the node budget");
        const QuadratureRule& fine = cached_rule(QuadKind::clenshaw_curtis, 2 * n_next + 1);

        // Old node i coincides with new node 2i; only odd slots are new.
        std::vector<std::vector<std::vector<double>>> fine_values(
            static_cast<size_t>(fine.points()));
        for (int i = 0; i < rule->points(); ++i)
            fine_values[static_cast<size_t>(2 * i)] = std::move(node_values[static_cast<size_t>(i)]);

        const int fresh = fine.points() / 2;
        std::vector<std::vector<std::vector<double>>> slot(static_cast<size_t>(fresh));
        const auto shape = a.shape();
        parallel_for(fresh, threads, [&](int k) {
            const int i = 2 * k + 1;
            const double theta = fine.nodes[static_cast<size_t>(i)];
            std::vector<DenseMatrix> es;
            es.reserve(static_cast<size_t>(a.order()));
            for (int f = 0; f < a.order(); ++f)
                es.push_back(expm(scaled(a.factor(f), 1.0 - theta)));
            auto& vs = slot[static_cast<size_t>(k)];
            vs.reserve(static_cast<size_t>(nb));
            for (int m = 0; m < nb; ++m)
                vs.push_back(mode_apply(es, shape, bs[static_cast<size_t>(m)]));
        });
        for (int k = 0; k < fresh; ++k)
            fine_values[static_cast<size_t>(2 * k + 1)] = std::move(slot[static_cast<size_t>(k)]);

        acc = detail::zero_acc(nb, p, dim);
        for (int i = 0; i < fine.points(); ++i) {
            const double theta = fine.nodes[static_cast<size_t>(i)];
            const double w = fine.weights[static_cast<size_t>(i)];
            for (int m = 0; m < nb; ++m) {
                const auto& v = fine_values[static_cast<size_t>(i)][static_cast<size_t>(m)];
                double coeff = w;
                for (int j = 1; j <= p; ++j) {
                    auto& y = acc[static_cast<size_t>(m)][static_cast<size_t>(j - 1)];
                    for (size_t t = 0; t < v.size(); ++t) y[t] += coeff * v[t];
                    coeff *= theta / j;
                }
            }
        }

        n = n_next;
        rule = &fine;
        node_values = std::move(fine_values);

        double err = 0.0;
        for (int m = 0; m < nb; ++m) {
            for (int j = 0; j < p; ++j) {
                const auto& y = acc[static_cast<size_t>(m)][static_cast<size_t>(j)];
                const auto& yp = prev[static_cast<size_t>(m)][static_cast<size_t>(j)];
                double diff = 0.0, norm = 0.0;
                for (size_t t = 0; t < y.size(); ++t) {
                    diff = std::max(diff, std::abs(y[t] - yp[t]));
                    norm = std::max(norm, std::abs(y[t]));
                }
                if (diff == 0.0) continue;
                err = std::max(err, norm == 0.0 ? std::numeric_limits<double>::infinity()
                                                : diff / norm);
            }
        }
        if (err <= eps) break;
    }

    if (points_used) *points_used = rule->points();
    return detail::wrap_columns(std::move(acc), dim);
}

inline PhiColumns phi_adaptive(const KroneckerSum& a, const std::vector<double>& b, int p,
                               double eps, int threads = 1, int* points_used = nullptr) {
    return std::move(phi_adaptive_multi(a, {b}, p, eps, threads, points_used).front());
}

/// Doubling relation: given phi_j(A) b for j = 1..p and the factor
/// exponentials of e^A, rewrites the columns in place to phi_j(2A) b:
///   phi_i(2A) b = 2^{-i} ( e^A phi_i(A) b + sum_{j=1}^{i} phi_j(A) b / (i-j)! ).
inline void squaring_step(PhiColumns& y, const std::vector<DenseMatrix>& exps,
                          const std::vector<int>& shape) {
    const int p = y.p();
    const auto inv_fact = detail::inverse_factorials(p);
    std::vector<std::vector<double>> fresh(static_cast<size_t>(p));
    for (int i = 1; i <= p; ++i) {
        std::vector<double> t = mode_apply(exps, shape, y.cols[static_cast<size_t>(i - 1)]);
        for (int j = 1; j <= i; ++j) {
            const double c = inv_fact[static_cast<size_t>(i - j)];
            const auto& yj = y.cols[static_cast<size_t>(j - 1)];
            for (size_t k = 0; k < t.size(); ++k) t[k] += c * yj[k];
        }
        const double s = std::ldexp(1.0, -i);
        for (double& v : t) v *= s;
        fresh[static_cast<size_t>(i - 1)] = std::move(t);
    }
    y.cols = std::move(fresh);
}

/// Full pipeline on an explicit plan: quadrature on 2^{-l} A followed by l
/// doubling sweeps. For Gauss the rule has n+1 points; CC adapts and reports
/// its final size through points_used.
inline std::vector<PhiColumns> phi_with_plan(const KroneckerSum& a,
                                             const std::vector<std::vector<double>>& bs, int p,
                                             int l, int n, QuadKind mode, double eps,
                                             int threads = 1, int* points_used = nullptr) {
    if (l < 0) throw std::invalid_argument("phi_with_plan: need l >= 0");
    const KroneckerSum a_scaled = a.scaled(std::ldexp(1.0, -l));
    std::vector<PhiColumns> ys;
    if (mode == QuadKind::gauss_legendre) {
        const QuadratureRule& rule = cached_rule(mode, n + 1);
        ys = phi_fixed_multi(a_scaled, bs, p, rule, threads);
        if (points_used) *points_used = rule.points();
    } else {
        ys = phi_adaptive_multi(a_scaled, bs, p, eps, threads, points_used);
    }
    if (l == 0) return ys;

    const auto shape = a.shape();
    std::vector<DenseMatrix> exps;
    exps.reserve(static_cast<size_t>(a.order()));
    for (int d = 0; d < a.order(); ++d) exps.push_back(expm(a_scaled.factor(d)));
    for (int k = 0; k < l; ++k) {
        for (auto& y : ys) squaring_step(y, exps, shape);
        if (k < l - 1)
            for (auto& e : exps) e = e * e;
    }
    return ys;
}

/// phi_1..phi_p of a Kronecker-sum argument applied to b, with automatic
/// scaling/step planning from the a-priori bound when no level is pinned.
inline std::vector<PhiColumns> phiquadmv_multi(const KroneckerSum& a,
                                               const std::vector<std::vector<double>>& bs,
                                               const PhiRequest& req, PhiInfo* info = nullptr) {
    if (req.p < 1) throw std::invalid_argument("phiquadmv: need p >= 1");
    const double alpha = infnorm_bound(a);
    double beta = 0.0;
    for (const auto& b : bs) beta = std::max(beta, inf_norm(b));

    CostModel cost = req.cost;
    cost.d = a.order();

    int l = 0, n = 0;
    bool planned = false;
    double plan_cost = 0.0;
    if (req.l.has_value()) {
        l = *req.l;
        if (l < 0) throw std::invalid_argument("phiquadmv: need l >= 0");
        if (alpha > 0.0 && beta > 0.0)
            n = quadnodes(req.eps, req.p, std::ldexp(alpha, -l), beta, req.mode);
        else
            n = req.mode == QuadKind::gauss_legendre ? 2 : 4;
        plan_cost = cost.cost(n, l, req.p);
    } else if (alpha > 0.0 && beta > 0.0) {
        const QuadraturePlan plan = setup_quadrature(req.eps, req.p, alpha, beta, req.mode, cost);
        l = plan.l;
        n = plan.n;
        plan_cost = plan.cost;
        planned = true;
    } else {
        l = 0;
        n = req.mode == QuadKind::gauss_legendre ? 2 : 4;
        plan_cost = cost.cost(n, l, req.p);
        planned = true;
    }

    int points = 0;
    auto ys = phi_with_plan(a, bs, req.p, l, n, req.mode, req.eps, req.threads, &points);
    if (info) *info = PhiInfo{l, n, points, req.mode, alpha, beta, planned, plan_cost};
    return ys;
}

inline PhiColumns phiquadmv(const KroneckerSum& a, const std::vector<double>& b,
                            const PhiRequest& req, PhiInfo* info = nullptr) {
    return std::move(phiquadmv_multi(a, {b}, req, info).front());
}

/// Single-pass linear combination sum_j phi_j(A) b_j (one quadrature sweep,
/// no scaling/squaring: the combined integrand does not survive doubling).
inline std::vector<double> phi_lincomb(const KroneckerSum& a,
                                       const std::vector<std::vector<double>>& bs,
                                       const QuadratureRule& rule, int threads = 1) {
    const int p = static_cast<int>(bs.size());
    if (p < 1) throw std::invalid_argument("phi_lincomb: need at least one vector");
    const int dim = a.dim();
    for (const auto& b : bs)
        if (static_cast<int>(b.size()) != dim)
            throw std::invalid_argument("phi_lincomb: vector length mismatch");
    const auto shape = a.shape();
    const int count = rule.points();
    std::vector<std::vector<double>> slot(static_cast<size_t>(count));
    parallel_for(count, threads, [&](int i) {
        const double theta = rule.nodes[static_cast<size_t>(i)];
        std::vector<double> mix(static_cast<size_t>(dim), 0.0);
        double coeff = 1.0; // theta^{j-1}/(j-1)!
        for (int j = 1; j <= p; ++j) {
            const auto& b = bs[static_cast<size_t>(j - 1)];
            for (size_t t = 0; t < mix.size(); ++t) mix[t] += coeff * b[t];
            coeff *= theta / j;
        }
        std::vector<DenseMatrix> es;
        es.reserve(static_cast<size_t>(a.order()));
        for (int f = 0; f < a.order(); ++f)
            es.push_back(expm(scaled(a.factor(f), 1.0 - theta)));
        slot[static_cast<size_t>(i)] = mode_apply(es, shape, mix);
    });
    std::vector<double> y(static_cast<size_t>(dim), 0.0);
    for (int i = 0; i < count; ++i) {
        const double w = rule.weights[static_cast<size_t>(i)];
        const auto& v = slot[static_cast<size_t>(i)];
        for (size_t t = 0; t < y.size(); ++t) y[t] += w * v[t];
    }
    return y;
}

} // namespace phiquad
