#pragma once

// Dense symmetric linear algebra for small dimensions (n <= 16): vectors,
// row-major matrices, a cyclic Jacobi eigensolver, Householder completion
// of a unit normal to a hyperplane basis, and the sign canonicalization
// rule used to give projective objects a unique representative.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "reflecta/errors.hpp"

namespace reflecta {

using Vec = std::vector<double>;

inline constexpr int kMaxDim = 16;

inline void require_dim(int n, const char* where) {
    if (n < 2 || n > kMaxDim)
        throw ContractViolation(std::string(where) + ": dimension must be in [2, 16], got " +
                                std::to_string(n));
}

// ---------------------------------------------------------------------------
// Vector helpers

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vec scaled(std::span<const double> a, double s) {
    Vec r(a.begin(), a.end());
    for (double& x : r) x *= s;
    return r;
}

inline Vec add(std::span<const double> a, std::span<const double> b) {
    Vec r(a.begin(), a.end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    Vec r(a.begin(), a.end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline Vec normalized(std::span<const double> a) {
    double n = norm(a);
    if (n == 0.0) throw ContractViolation("normalized: zero vector");
    return scaled(a, 1.0 / n);
}

// Index of the largest-magnitude component, ties broken by lowest index.
inline int dominant_index(std::span<const double> v) {
    int best = 0;
    double mag = std::abs(v[0]);
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (std::abs(v[i]) > mag) {
            mag = std::abs(v[i]);
            best = i;
        }
    }
    return best;
}

// Canonical sign rule: the largest-magnitude component (lowest index on
// ties) is made positive.  Applied to every unit vector we hand out, so a
// projective line or hyperplane has a unique representative.
inline void canonicalize_sign(Vec& v) {
    if (v[dominant_index(v)] < 0.0)
        for (double& x : v) x = -x;
}

// Component of v orthogonal to the unit vector u.
inline Vec project_off(std::span<const double> v, std::span<const double> u) {
    const double c = dot(v, u);
    Vec r(v.begin(), v.end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * u[i];
    return r;
}

// ---------------------------------------------------------------------------
// Matrix

class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<const double> row(int i) const {
        return {a_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)};
    }

    Vec col(int j) const {
        Vec c(rows_);
        for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_col(int j, std::span<const double> v) {
        for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    const double* data() const { return a_.data(); }

    friend bool operator==(const Mat&, const Mat&) = default;

private:
    int rows_, cols_;
    std::vector<double> a_;
};

inline Vec mat_vec(const Mat& m, std::span<const double> v) {
    Vec r(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i) r[i] = dot(m.row(i), v);
    return r;
}

// y = M^T v
inline Vec mat_tvec(const Mat& m, std::span<const double> v) {
    Vec r(m.cols(), 0.0);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r[j] += m(i, j) * v[i];
    return r;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    Mat r(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

inline Mat transpose(const Mat& m) {
    Mat r(m.cols(), m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(j, i) = m(i, j);
    return r;
}

inline double max_abs(const Mat& m) {
    double r = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
    return r;
}

inline double frobenius_norm(const Mat& m) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
    double r = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) r = std::max(r, std::abs(a(i, j) - b(i, j)));
    return r;
}

// B^T A B for a column basis B.
inline Mat restrict_form(const Mat& a, const Mat& b) {
    Mat ab = matmul(a, b);
    Mat r = matmul(transpose(b), ab);
    // kill rounding asymmetry so the result satisfies the SymMatrix contract
    for (int i = 0; i < r.rows(); ++i)
        for (int j = i + 1; j < r.cols(); ++j) {
            const double s = 0.5 * (r(i, j) + r(j, i));
            r(i, j) = r(j, i) = s;
        }
    return r;
}

// Orthogonal projector B B^T onto the column span of B.
inline Mat projector(const Mat& b) {
    return matmul(b, transpose(b));
}

// ---------------------------------------------------------------------------
// Symmetric eigenproblem

inline void require_symmetric(const Mat& s, const char* where = "sym_eigen") {
    if (s.rows() != s.cols())
        throw ContractViolation(std::string(where) + ": matrix not square");
    const double scale = max_abs(s);
    const double tol = 1e-14 * scale;
    for (int i = 0; i < s.rows(); ++i)
        for (int j = i + 1; j < s.cols(); ++j)
            if (std::abs(s(i, j) - s(j, i)) > tol)
                throw ContractViolation(std::string(where) + ": matrix not symmetric");
}

struct EigenDecomposition {
    Vec values;   // ascending
    Mat vectors;  // orthonormal columns, vectors.col(i) pairs with values[i]
};

// Cyclic Jacobi sweeps; converges when the off-diagonal Frobenius norm
// drops below 1e-14 * ||S||_F.  Fixed sweep order and the canonical sign
// rule make the output bit-identical for identical input.
inline EigenDecomposition sym_eigen(const Mat& s_in) {
    require_symmetric(s_in);
    const int n = s_in.rows();
    Mat a = s_in;
    for (int i = 0; i < n; ++i)  // enforce exact symmetry of the working copy
        for (int j = i + 1; j < n; ++j) a(j, i) = a(i, j);
    Mat q = Mat::identity(n);

    const double snorm = frobenius_norm(a);
    if (snorm > 0.0) {
        const double conv = 1e-14 * snorm;
        const int max_sweeps = 64;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double off = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
            if (std::sqrt(off) <= conv) break;
            if (sweep == max_sweeps - 1)
                throw NumericalFailure("sym_eigen: Jacobi iteration did not converge");

            for (int p = 0; p < n - 1; ++p) {
                for (int r = p + 1; r < n; ++r) {
                    const double apr = a(p, r);
                    if (apr == 0.0) continue;
                    const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                    double t;
                    if (std::abs(theta) > 1e12) {
                        t = 1.0 / (2.0 * theta);
                    } else {
                        t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                        if (theta < 0.0) t = -t;
                    }
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;

                    const double app = a(p, p), arr = a(r, r);
                    a(p, p) = c * c * app - 2.0 * s * c * apr + s * s * arr;
                    a(r, r) = s * s * app + 2.0 * s * c * apr + c * c * arr;
                    a(p, r) = a(r, p) = 0.0;
                    for (int i = 0; i < n; ++i) {
                        if (i == p || i == r) continue;
                        const double aip = a(i, p), air = a(i, r);
                        a(i, p) = a(p, i) = c * aip - s * air;
                        a(i, r) = a(r, i) = s * aip + c * air;
                    }
                    for (int i = 0; i < n; ++i) {
                        const double qip = q(i, p), qir = q(i, r);
                        q(i, p) = c * qip - s * qir;
                        q(i, r) = s * qip + c * qir;
                    }
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenDecomposition d;
    d.values.resize(n);
    d.vectors = Mat(n, n);
    for (int k = 0; k < n; ++k) {
        d.values[k] = a(order[k], order[k]);
        Vec v = q.col(order[k]);
        canonicalize_sign(v);
        d.vectors.set_col(k, v);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Hyperplane basis

// Orthonormal basis of the hyperplane with the given unit normal, obtained
// by Householder completion: the reflector mapping the normal to +-e_1 is
// orthogonal and symmetric, so its remaining columns span normal^perp.
inline Mat hyperplane_basis(std::span<const double> normal) {
    const int n = static_cast<int>(normal.size());
    require_dim(n, "hyperplane_basis");
    if (std::abs(norm(normal) - 1.0) > 1e-12)
        throw ContractViolation("hyperplane_basis: normal is not a unit vector");

    const double alpha = normal[0] >= 0.0 ? 1.0 : -1.0;
    Vec w(normal.begin(), normal.end());
    w[0] += alpha;  // never cancels: ||w||^2 = 2 (1 + |normal_0|)
    const double wNormSq = 2.0 * (1.0 + alpha * normal[0]);

    Mat b(n, n - 1);
    Vec col(n);
    for (int j = 1; j < n; ++j) {
        const double f = 2.0 * w[j] / wNormSq;
        for (int i = 0; i < n; ++i) col[i] = (i == j ? 1.0 : 0.0) - f * w[i];
        canonicalize_sign(col);
        b.set_col(j - 1, col);
    }
    return b;
}

// Cholesky-based positive definiteness test for a symmetric matrix.
inline bool is_positive_definite(const Mat& s) {
    const int n = s.rows();
    Mat l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = s(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) return false;
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return true;
}

// Inverse of a symmetric positive definite matrix via Cholesky.
inline Mat spd_inverse(const Mat& s) {
    const int n = s.rows();
    Mat l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = s(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw NumericalFailure("spd_inverse: matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    // columns of the inverse by forward/back substitution
    Mat inv(n, n);
    Vec y(n), x(n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            double v = (i == c) ? 1.0 : 0.0;
            for (int k = 0; k < i; ++k) v -= l(i, k) * y[k];
            y[i] = v / l(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double v = y[i];
            for (int k = i + 1; k < n; ++k) v -= l(k, i) * x[k];
            x[i] = v / l(i, i);
        }
        for (int i = 0; i < n; ++i) inv(i, c) = x[i];
    }
    // symmetrize rounding noise
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = inv(j, i) = v;
        }
    return inv;
}

}  // namespace reflecta
