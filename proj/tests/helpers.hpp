#pragma once

// Shared generators and independent oracles for the test suites.  Oracles
// here deliberately avoid the library code paths they are used to check.

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "reflecta/linalg.hpp"
#include "reflecta/quadric.hpp"

namespace testutil {

using reflecta::Mat;
using reflecta::Vec;

inline std::mt19937_64 test_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Vec random_unit(std::mt19937_64& g, int n) {
    std::normal_distribution<double> nd;
    Vec v(n);
    double m = 0.0;
    do {
        for (double& x : v) x = nd(g);
        m = reflecta::norm(v);
    } while (m < 1e-8);
    for (double& x : v) x /= m;
    return v;
}

// Random rotation via Gram-Schmidt of a Gaussian matrix.
inline Mat random_rotation(std::mt19937_64& g, int n) {
    std::normal_distribution<double> nd;
    Mat q(n, n);
    for (int j = 0; j < n; ++j) {
        Vec v(n);
        for (double& x : v) x = nd(g);
        for (int p = 0; p < j; ++p) {
            const Vec col = q.col(p);
            const double c = reflecta::dot(v, col);
            for (int i = 0; i < n; ++i) v[i] -= c * col[i];
        }
        const double m = reflecta::norm(v);
        for (int i = 0; i < n; ++i) q(i, j) = v[i] / m;
    }
    return q;
}

// Symmetric matrix with the given eigenvalues in a random frame; exactly
// symmetric by construction.
inline Mat spd_with_eigenvalues(std::mt19937_64& g, const Vec& eigs) {
    const int n = static_cast<int>(eigs.size());
    const Mat q = random_rotation(g, n);
    Mat s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = 0.0;
            for (int k = 0; k < n; ++k) v += q(i, k) * eigs[k] * q(j, k);
            s(i, j) = s(j, i) = v;
        }
    return s;
}

inline Mat random_spd(std::mt19937_64& g, int n, double eig_lo = 0.2, double eig_hi = 3.0) {
    std::uniform_real_distribution<double> ud(eig_lo, eig_hi);
    Vec eigs(n);
    for (double& e : eigs) e = ud(g);
    return spd_with_eigenvalues(g, eigs);
}

inline Mat random_symmetric(std::mt19937_64& g, int n) {
    std::normal_distribution<double> nd;
    Mat s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) s(i, j) = s(j, i) = nd(g);
    return s;
}

// Independent chord oracle: endpoints of {base + t dir} cap {x^T A x <= 1}
// by plain bisection on the membership predicate.
inline std::optional<std::pair<Vec, Vec>> quadric_chord_oracle(const Mat& a, const Vec& base,
                                                               const Vec& dir, double span,
                                                               double tol = 1e-12) {
    const int n = static_cast<int>(base.size());
    const auto inside = [&](double t) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = base[i] + t * dir[i];
        return reflecta::dot(x, reflecta::mat_vec(a, x)) <= 1.0;
    };
    double t_in = 0.0;
    bool found = false;
    for (int i = 0; i <= 256 && !found; ++i) {
        const double t = span * (2.0 * i / 256.0 - 1.0);
        if (inside(t)) {
            t_in = t;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    double lo = t_in, out_lo = -span, hi = t_in, out_hi = span;
    while (lo - out_lo > tol) {
        const double m = 0.5 * (lo + out_lo);
        (inside(m) ? lo : out_lo) = m;
    }
    while (out_hi - hi > tol) {
        const double m = 0.5 * (hi + out_hi);
        (inside(m) ? hi : out_hi) = m;
    }
    Vec pa(n), pb(n);
    for (int i = 0; i < n; ++i) {
        pa[i] = base[i] + lo * dir[i];
        pb[i] = base[i] + hi * dir[i];
    }
    return std::make_pair(pa, pb);
}

}  // namespace testutil
