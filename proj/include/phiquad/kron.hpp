#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phiquad/dense.hpp"

namespace phiquad {

/// Kronecker sum A = A1 (+) A2 (+) ... = sum_d I x..x A_d x..x I over one to
/// three square factors. Vectors follow row-major (vec) order: the leftmost
/// factor's index varies slowest.
class KroneckerSum {
public:
    explicit KroneckerSum(std::vector<DenseMatrix> factors) : factors_(std::move(factors)) {
        if (factors_.empty() || factors_.size() > 3)
            throw std::invalid_argument("KroneckerSum: need one to three factors");
        for (const auto& f : factors_) {
            if (!f.square() || f.rows() == 0)
                throw std::invalid_argument("KroneckerSum: factors must be square and nonempty");
        }
    }

    int order() const { return static_cast<int>(factors_.size()); }

    int dim() const {
        long long d = 1;
        for (const auto& f : factors_) d *= f.rows();
        return static_cast<int>(d);
    }

    std::vector<int> shape() const {
        std::vector<int> s;
        for (const auto& f : factors_) s.push_back(f.rows());
        return s;
    }

    const DenseMatrix& factor(int d) const { return factors_[static_cast<size_t>(d)]; }

    /// Same structure with every factor scaled by s (A -> s*A scales the sum).
    KroneckerSum scaled(double s) const {
        std::vector<DenseMatrix> fs;
        fs.reserve(factors_.size());
        for (const auto& f : factors_) fs.push_back(phiquad::scaled(f, s));
        return KroneckerSum(std::move(fs));
    }

private:
    std::vector<DenseMatrix> factors_;
};

namespace detail {

inline long long shape_product(const std::vector<int>& shape) {
    long long p = 1;
    for (int n : shape) p *= n;
    return p;
}

/// y = (I x..x M x..x I) x at position `mode`, accumulated into out (+=).
/// The tensor block structure reduces to small row-major GEMMs.
inline void accumulate_mode_apply(const DenseMatrix& m, const std::vector<double>& x,
                                  const std::vector<int>& shape, int mode,
                                  std::vector<double>& out) {
    const int q = static_cast<int>(shape.size());
    long long inner = 1;
    for (int k = mode + 1; k < q; ++k) inner *= shape[static_cast<size_t>(k)];
    long long outer = 1;
    for (int k = 0; k < mode; ++k) outer *= shape[static_cast<size_t>(k)];
    const int nm = shape[static_cast<size_t>(mode)];
    for (long long o = 0; o < outer; ++o) {
        const double* xb = x.data() + o * nm * inner;
        double* yb = out.data() + o * nm * inner;
        for (int i = 0; i < nm; ++i) {
            double* yi = yb + static_cast<long long>(i) * inner;
            for (int j = 0; j < nm; ++j) {
                const double mij = m(i, j);
                if (mij == 0.0) continue;
                const double* xj = xb + static_cast<long long>(j) * inner;
                for (long long t = 0; t < inner; ++t) yi[t] += mij * xj[t];
            }
        }
    }
}

} // namespace detail

/// Applies one matrix per mode: y = (M1 x M2 x ...) x in vec order.
inline std::vector<double> mode_apply(const std::vector<DenseMatrix>& ms,
                                      const std::vector<int>& shape,
                                      const std::vector<double>& x) {
    if (ms.size() != shape.size()) throw std::invalid_argument("mode_apply: rank mismatch");
    if (static_cast<long long>(x.size()) != detail::shape_product(shape))
        throw std::invalid_argument("mode_apply: vector length mismatch");
    std::vector<double> cur = x;
    std::vector<double> next(x.size());
    for (int d = 0; d < static_cast<int>(ms.size()); ++d) {
        if (ms[static_cast<size_t>(d)].rows() != shape[static_cast<size_t>(d)])
            throw std::invalid_argument("mode_apply: factor extent mismatch");
        std::fill(next.begin(), next.end(), 0.0);
        detail::accumulate_mode_apply(ms[static_cast<size_t>(d)], cur, shape, d, next);
        std::swap(cur, next);
    }
    return cur;
}

/// y = A x without assembling: one mode product per factor, summed.
inline std::vector<double> kron_matvec(const KroneckerSum& a, const std::vector<double>& x) {
    const auto shape = a.shape();
    if (static_cast<long long>(x.size()) != detail::shape_product(shape))
        throw std::invalid_argument("kron_matvec: vector length mismatch");
    std::vector<double> y(x.size(), 0.0);
    for (int d = 0; d < a.order(); ++d)
        detail::accumulate_mode_apply(a.factor(d), x, shape, d, y);
    return y;
}

/// Action of e^A on b: exponentiate each small factor, then apply the
/// Kronecker-product identity as successive mode products.
inline std::vector<double> exp_action(const KroneckerSum& a, const std::vector<double>& b) {
    std::vector<DenseMatrix> es;
    es.reserve(static_cast<size_t>(a.order()));
    for (int d = 0; d < a.order(); ++d) es.push_back(expm(a.factor(d)));
    return mode_apply(es, a.shape(), b);
}

/// Upper bound (here: exact value) sum_d ||A_d||_inf >= ||A||_inf.
inline double infnorm_bound(const KroneckerSum& a) {
    double s = 0.0;
    for (int d = 0; d < a.order(); ++d) s += inf_norm(a.factor(d));
    return s;
}

/// Explicit dense assembly for cross-checks only; guarded against runaway
/// dimensions.
inline DenseMatrix assemble_dense(const KroneckerSum& a, int dim_guard = 10000) {
    const int n = a.dim();
    if (n > dim_guard) throw std::invalid_argument("assemble_dense: dimension guard exceeded");
    const auto shape = a.shape();
    const int q = a.order();
    DenseMatrix m(n, n);
    std::vector<long long> stride(static_cast<size_t>(q), 1);
    for (int d = q - 2; d >= 0; --d)
        stride[static_cast<size_t>(d)] =
            stride[static_cast<size_t>(d + 1)] * shape[static_cast<size_t>(d + 1)];
    for (int d = 0; d < q; ++d) {
        const DenseMatrix& f = a.factor(d);
        const long long sd = stride[static_cast<size_t>(d)];
        const int nd = shape[static_cast<size_t>(d)];
        for (int row = 0; row < n; ++row) {
            const int id = static_cast<int>((row / sd) % nd);
            const long long base = row - static_cast<long long>(id) * sd;
            for (int jd = 0; jd < nd; ++jd) {
                const double v = f(id, jd);
                if (v == 0.0) continue;
                m(row, static_cast<int>(base + static_cast<long long>(jd) * sd)) += v;
            }
        }
    }
    return m;
}

} // namespace phiquad
