#pragma once

#include <stdexcept>
#include <vector>

#include "phiquad/dense.hpp"
#include "phiquad/kron.hpp"

namespace phiquad {

/// Dense reference for phi_1(A)b .. phi_p(A)b via one exponential of the
/// augmented matrix [[A, B], [0, J]] where B has b in its first column and J
/// is the p x p superdiagonal shift: column N+j-1 of the exponential then
/// holds phi_j(A) b in its leading N entries. Cubic in N + p, so guarded.
inline std::vector<std::vector<double>> phi_dense_oracle(const DenseMatrix& a,
                                                         const std::vector<double>& b, int p,
                                                         int dim_guard = 1000) {
    if (a.rows() != a.cols()) throw std::invalid_argument("phi_dense_oracle: square matrix required");
    const int n = a.rows();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("phi_dense_oracle: vector length mismatch");
    if (p < 1) throw std::invalid_argument("phi_dense_oracle: need p >= 1");
    if (n + p > dim_guard) throw std::invalid_argument("phi_dense_oracle: dimension guard exceeded");

    const int m = n + p;
    DenseMatrix aug(m, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    for (int i = 0; i < n; ++i) aug(i, n) = b[static_cast<size_t>(i)];
    for (int j = 1; j < p; ++j) aug(n + j - 1, n + j) = 1.0;

    const DenseMatrix e = expm(aug);
    std::vector<std::vector<double>> cols(static_cast<size_t>(p),
                                          std::vector<double>(static_cast<size_t>(n)));
    for (int j = 1; j <= p; ++j)
        for (int i = 0; i < n; ++i) cols[static_cast<size_t>(j - 1)][static_cast<size_t>(i)] = e(i, n + j - 1);
    return cols;
}

/// Same oracle for a Kronecker-sum argument (assembles the dense sum first).
inline std::vector<std::vector<double>> phi_dense_oracle(const KroneckerSum& a,
                                                         const std::vector<double>& b, int p,
                                                         int dim_guard = 1000) {
    return phi_dense_oracle(assemble_dense(a, dim_guard), b, p, dim_guard);
}

} // namespace phiquad
