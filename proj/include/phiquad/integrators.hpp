#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phiquad/bounds.hpp"
#include "phiquad/kron.hpp"
#include "phiquad/phiaction.hpp"

namespace phiquad {

/// Source term of the semilinear problem u' = -A u + f(t, u).
using SourceFn = std::function<std::vector<double>(double, const std::vector<double>&)>;

/// One coefficient c * phi_k(.) of a tableau entry.
struct PhiTerm {
    int k = 1;
    double c = 0.0;
};

/// Exponential Runge-Kutta tableau in increment form. Row i of `a` holds the
/// stage couplings a_{ij} as phi-term sums evaluated at -c_i tau A; the
/// weights b_i are evaluated at -tau A. Row sums satisfy
/// sum_j a_{ij} = c_i phi_1 and sum_i b_i = phi_1, which makes the update
///   U_i = u + tau sum_j a_{ij} D_j,  u+ = u + tau sum_i b_i D_i,
///   D_j = f(t + c_j tau, U_j) - A u   (A u at the step's base point)
/// equivalent to the usual exponential form with e^{-c_i tau A} u propagation.
struct ExpRKTableau {
    int stages = 1;
    int order = 1;
    std::vector<double> c;
    std::vector<std::vector<std::vector<PhiTerm>>> a;
    std::vector<std::vector<PhiTerm>> b;
};

/// Exponential Euler: u+ = u + tau phi_1(-tau A)(f(t,u) - A u).
inline ExpRKTableau exp_euler_tableau() {
    ExpRKTableau t;
    t.stages = 1;
    t.order = 1;
    t.c = {0.0};
    t.a = {{}};
    t.b = {{PhiTerm{1, 1.0}}};
    return t;
}

/// Two-stage second-order method with free node c2 (midpoint by default).
inline ExpRKTableau exp_rk2_tableau(double c2 = 0.5) {
    if (!(c2 > 0.0 && c2 <= 1.0)) throw std::invalid_argument("exp_rk2_tableau: need c2 in (0,1]");
    ExpRKTableau t;
    t.stages = 2;
    t.order = 2;
    t.c = {0.0, c2};
    t.a = {{}, {{PhiTerm{1, c2}}}};
    t.b = {{PhiTerm{1, 1.0 - 1.0 / (2.0 * c2)}}, {PhiTerm{1, 1.0 / (2.0 * c2)}}};
    return t;
}

/// Three-stage third-order method with free node c2 and c3 = 2/3.
inline ExpRKTableau exp_rk3_tableau(double c2 = 1.0 / 3.0) {
    if (!(c2 > 0.0 && c2 <= 1.0)) throw std::invalid_argument("exp_rk3_tableau: need c2 in (0,1]");
    ExpRKTableau t;
    t.stages = 3;
    t.order = 3;
    const double q = 4.0 / (9.0 * c2);
    t.c = {0.0, c2, 2.0 / 3.0};
    t.a = {{},
           {{PhiTerm{1, c2}}},
           {{PhiTerm{1, 2.0 / 3.0}, PhiTerm{2, -q}}, {PhiTerm{2, q}}}};
    t.b = {{PhiTerm{1, 1.0}, PhiTerm{2, -1.5}}, {}, {{PhiTerm{2, 1.5}}}};
    return t;
}

/// Computes phi-function actions of -sigma tau A on batches of vectors,
/// planning the quadrature once per distinct (sigma, p) and reusing the plan
/// for every step (plans use a unit beta so they are step-independent).
class PhiEngine {
public:
    PhiEngine(KroneckerSum a, double tau, PhiRequest base)
        : a_(std::move(a)), tau_(tau), base_(std::move(base)) {
        if (!(tau_ > 0.0)) throw std::invalid_argument("PhiEngine: need tau > 0");
    }

    const KroneckerSum& matrix() const { return a_; }
    double tau() const { return tau_; }
    int calls() const { return calls_; }

    /// phi_1..phi_p of -sigma tau A applied to each vector of bs in one
    /// quadrature sweep (the per-node factor exponentials are shared).
    std::vector<PhiColumns> apply(double sigma, int p, const std::vector<std::vector<double>>& bs) {
        const QuadraturePlan& plan = plan_for(sigma, p);
        const KroneckerSum arg = a_.scaled(-sigma * tau_);
        ++calls_;
        return phi_with_plan(arg, bs, p, plan.l, plan.n, base_.mode, base_.eps, base_.threads);
    }

private:
    const QuadraturePlan& plan_for(double sigma, int p) {
        const auto key = std::make_pair(sigma, p);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        const double alpha = std::abs(sigma) * tau_ * infnorm_bound(a_);
        CostModel cost = base_.cost;
        cost.d = a_.order();
        QuadraturePlan plan;
        if (base_.l.has_value()) {
            plan.l = *base_.l;
            plan.n = alpha > 0.0
                         ? quadnodes(base_.eps, p, std::ldexp(alpha, -plan.l), 1.0, base_.mode)
                         : (base_.mode == QuadKind::gauss_legendre ? 2 : 4);
            plan.cost = cost.cost(plan.n, plan.l, p);
        } else if (alpha > 0.0) {
            plan = setup_quadrature(base_.eps, p, alpha, 1.0, base_.mode, cost);
        } else {
            plan.l = 0;
            plan.n = base_.mode == QuadKind::gauss_legendre ? 2 : 4;
            plan.cost = cost.cost(plan.n, plan.l, p);
        }
        return plans_.emplace(key, plan).first->second;
    }

    KroneckerSum a_;
    double tau_;
    PhiRequest base_;
    std::map<std::pair<double, int>, QuadraturePlan> plans_;
    int calls_ = 0;
};

namespace detail {

inline void axpy(std::vector<double>& y, double c, const std::vector<double>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

/// Accumulates tau * sum over the given tableau terms into `u`, evaluating
/// every needed phi index at the same matrix argument with one engine call.
inline void apply_phi_group(PhiEngine& eng, double sigma,
                            const std::vector<std::vector<PhiTerm>>& rows,
                            const std::vector<std::vector<double>>& d, std::vector<double>& u) {
    int kmax = 0;
    for (const auto& terms : rows)
        for (const auto& term : terms) kmax = std::max(kmax, term.k);
    if (kmax == 0) return;
    std::vector<std::vector<double>> g(static_cast<size_t>(kmax),
                                       std::vector<double>(u.size(), 0.0));
    for (size_t j = 0; j < rows.size(); ++j)
        for (const auto& term : rows[j]) axpy(g[static_cast<size_t>(term.k - 1)], term.c, d[j]);
    const auto cols = eng.apply(sigma, kmax, g);
    const double tau = eng.tau();
    for (int k = 1; k <= kmax; ++k) axpy(u, tau, cols[static_cast<size_t>(k - 1)].col(k));
}

} // namespace detail

/// One step of an exponential Runge-Kutta method from (t, u).
inline std::vector<double> erk_step(PhiEngine& eng, const SourceFn& f, double t,
                                    const std::vector<double>& u, const ExpRKTableau& tab) {
    const double tau = eng.tau();
    const std::vector<double> au = kron_matvec(eng.matrix(), u);
    std::vector<std::vector<double>> d;
    d.reserve(static_cast<size_t>(tab.stages));
    {
        std::vector<double> d1 = f(t, u);
        if (d1.size() != u.size()) throw std::invalid_argument("erk_step: source length mismatch");
        detail::axpy(d1, -1.0, au);
        d.push_back(std::move(d1));
    }
    for (int i = 1; i < tab.stages; ++i) {
        std::vector<double> ui = u;
        detail::apply_phi_group(eng, tab.c[static_cast<size_t>(i)], tab.a[static_cast<size_t>(i)],
                                d, ui);
        std::vector<double> di = f(t + tab.c[static_cast<size_t>(i)] * tau, ui);
        if (di.size() != u.size()) throw std::invalid_argument("erk_step: source length mismatch");
        detail::axpy(di, -1.0, au);
        d.push_back(std::move(di));
    }
    std::vector<double> next = u;
    detail::apply_phi_group(eng, 1.0, tab.b, d, next);
    return next;
}

struct IntegrationResult {
    std::vector<double> u;
    int steps = 0;
    int phi_calls = 0;
};

/// Integrates u' = -A u + f(t, u) from t0 to t_end with m equal steps.
inline IntegrationResult integrate(const KroneckerSum& a, const SourceFn& f,
                                   std::vector<double> u, double t0, double t_end, int m,
                                   const ExpRKTableau& tab, const PhiRequest& base = PhiRequest{}) {
    if (m < 1) throw std::invalid_argument("integrate: need at least one step");
    if (!(t_end > t0)) throw std::invalid_argument("integrate: need t_end > t0");
    const double tau = (t_end - t0) / m;
    PhiEngine eng(a, tau, base);
    for (int s = 0; s < m; ++s) u = erk_step(eng, f, t0 + s * tau, u, tab);
    return IntegrationResult{std::move(u), m, eng.calls()};
}

} // namespace phiquad
