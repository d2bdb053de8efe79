#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phiquad {

/// Dense row-major matrix of doubles. Row-major is also the vec() convention
/// used throughout: the leftmost Kronecker factor's index varies slowest.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("DenseMatrix: negative extent");
    }

    /// Entries are validated: construction from data rejects NaN/Inf.
    DenseMatrix(int rows, int cols, std::vector<double> data)
        : rows_(rows), cols_(cols), a_(std::move(data)) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("DenseMatrix: negative extent");
        if (a_.size() != static_cast<size_t>(rows) * cols)
            throw std::invalid_argument("DenseMatrix: data size mismatch");
        for (double v : a_)
            if (!std::isfinite(v)) throw std::invalid_argument("DenseMatrix: non-finite entry");
    }

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }
    const std::vector<double>& raw() const { return a_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

inline DenseMatrix operator+(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument("matrix add: shape mismatch");
    DenseMatrix r(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) r(i, j) = x(i, j) + y(i, j);
    return r;
}

inline DenseMatrix operator-(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument("matrix sub: shape mismatch");
    DenseMatrix r(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) r(i, j) = x(i, j) - y(i, j);
    return r;
}

inline DenseMatrix scaled(const DenseMatrix& x, double s) {
    DenseMatrix r(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) r(i, j) = s * x(i, j);
    return r;
}

/// C = A * B, accumulation in a fixed i,l,j order (deterministic).
inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dim mismatch");
    const int m = a.rows(), k = a.cols(), n = b.cols();
    DenseMatrix c(m, n);
    for (int i = 0; i < m; ++i) {
        double* ci = c.data() + static_cast<size_t>(i) * n;
        for (int l = 0; l < k; ++l) {
            const double ail = a(i, l);
            if (ail == 0.0) continue;
            const double* bl = b.data() + static_cast<size_t>(l) * n;
            for (int j = 0; j < n; ++j) ci[j] += ail * bl[j];
        }
    }
    return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix r(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
    return r;
}

inline std::vector<double> matvec(const DenseMatrix& a, const std::vector<double>& x) {
    if (a.cols() != static_cast<int>(x.size()))
        throw std::invalid_argument("matvec: dim mismatch");
    std::vector<double> y(static_cast<size_t>(a.rows()), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        const double* ai = a.data() + static_cast<size_t>(i) * a.cols();
        for (int j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
        y[static_cast<size_t>(i)] = s;
    }
    return y;
}

/// Maximum absolute row sum.
inline double inf_norm(const DenseMatrix& a) {
    double best = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        if (s > best) best = s;
    }
    return best;
}

/// Maximum absolute column sum.
inline double one_norm(const DenseMatrix& a) {
    std::vector<double> s(static_cast<size_t>(a.cols()), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s[static_cast<size_t>(j)] += std::abs(a(i, j));
    double best = 0.0;
    for (double v : s)
        if (v > best) best = v;
    return best;
}

inline double inf_norm(const std::vector<double>& v) {
    double best = 0.0;
    for (double x : v) {
        double a = std::abs(x);
        if (a > best) best = a;
    }
    return best;
}

/// Solves A X = B by LU with partial pivoting; A and B are consumed.
inline DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b) {
    if (!a.square() || a.rows() != b.rows())
        throw std::invalid_argument("lu_solve: shape mismatch");
    const int n = a.rows(), m = b.cols();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) throw std::runtime_error("lu_solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (int j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
        }
        const double akk = a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / akk;
            if (f == 0.0) continue;
            a(i, k) = f;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            for (int j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        const double akk = a(k, k);
        for (int j = 0; j < m; ++j) {
            double s = b(k, j);
            for (int l = k + 1; l < n; ++l) s -= a(k, l) * b(l, j);
            b(k, j) = s / akk;
        }
    }
    return b;
}

/// Matrix exponential: scaling and squaring with the degree-13 diagonal Pade
/// approximant; the argument is halved until its 1-norm is below theta_13.
inline DenseMatrix expm(const DenseMatrix& a) {
    if (!a.square()) throw std::invalid_argument("expm: matrix not square");
    const int n = a.rows();
    if (n == 0) return a;
    static const double b[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const double theta13 = 5.371920351148152;

    const double nrm = one_norm(a);
    int s = 0;
    if (nrm > theta13) s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    DenseMatrix as = scaled(a, std::ldexp(1.0, -s));

    const DenseMatrix eye = DenseMatrix::identity(n);
    const DenseMatrix a2 = as * as;
    const DenseMatrix a4 = a2 * a2;
    const DenseMatrix a6 = a2 * a4;

    DenseMatrix w = scaled(a6, b[13]) + scaled(a4, b[11]) + scaled(a2, b[9]);
    w = a6 * w;
    w = w + scaled(a6, b[7]) + scaled(a4, b[5]) + scaled(a2, b[3]) + scaled(eye, b[1]);
    const DenseMatrix u = as * w;

    DenseMatrix z = scaled(a6, b[12]) + scaled(a4, b[10]) + scaled(a2, b[8]);
    z = a6 * z;
    const DenseMatrix v = z + scaled(a6, b[6]) + scaled(a4, b[4]) + scaled(a2, b[2]) + scaled(eye, b[0]);

    DenseMatrix x = lu_solve(v - u, v + u);
    for (int i = 0; i < s; ++i) x = x * x;
    return x;
}

/// Text format: first line "rows cols", then row-major entries, 17
/// significant digits, whitespace separated.
inline void write_matrix_text(std::ostream& os, const DenseMatrix& a) {
    os << a.rows() << ' ' << a.cols() << '\n';
    char buf[64];
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            os << buf << (j + 1 == a.cols() ? "" : " ");
        }
        os << '\n';
    }
}

inline DenseMatrix read_matrix_text(std::istream& is) {
    long long r = 0, c = 0;
    if (!(is >> r >> c) || r < 0 || c < 0)
        throw std::invalid_argument("read_matrix_text: bad header");
    std::vector<double> data;
    data.reserve(static_cast<size_t>(r * c));
    for (long long i = 0; i < r * c; ++i) {
        double v;
        if (!(is >> v)) throw std::invalid_argument("read_matrix_text: truncated data");
        data.push_back(v);
    }
    return DenseMatrix(static_cast<int>(r), static_cast<int>(c), std::move(data));
}

} // namespace phiquad
