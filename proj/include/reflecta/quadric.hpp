#pragma once

// Reflection algebra of a centered ellipsoid {x : x^T A x <= 1}: mirrors,
// chord lengths, binormal/diagonal classification, the reflection matrix in
// a given direction, ground hyperplanes, and the spectrum partition by
// binormal length.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "reflecta/linalg.hpp"

namespace reflecta {

// A line through the origin, stored as a unit vector with canonical sign.
struct ProjLine {
    Vec dir;

    explicit ProjLine(Vec v) : dir(std::move(v)) {
        const double m = norm(dir);
        if (m == 0.0) throw ContractViolation("ProjLine: zero direction");
        for (double& x : dir) x /= m;
        canonicalize_sign(dir);
    }

    int n() const { return static_cast<int>(dir.size()); }
};

// A hyperplane through the origin, stored as a unit normal with canonical sign.
struct ProjHyperplane {
    Vec normal;

    explicit ProjHyperplane(Vec v) : normal(std::move(v)) {
        const double m = norm(normal);
        if (m == 0.0) throw ContractViolation("ProjHyperplane: zero normal");
        for (double& x : normal) x /= m;
        canonicalize_sign(normal);
    }

    int n() const { return static_cast<int>(normal.size()); }
};

// sin of the angle between two projective objects (0 when equal up to sign).
// Computed as ||a - (a.b) b||, which keeps full precision for nearly equal
// lines where 1 - (a.b)^2 would cancel.
inline double projective_distance(std::span<const double> a, std::span<const double> b) {
    const double c = dot(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - c * b[i];
        s += t * t;
    }
    return std::sqrt(s);
}

inline double projective_distance(const ProjLine& a, const ProjLine& b) {
    return projective_distance(a.dir, b.dir);
}

inline double projective_distance(const ProjHyperplane& a, const ProjHyperplane& b) {
    return projective_distance(a.normal, b.normal);
}

// ---------------------------------------------------------------------------

class Ellipsoid {
public:
    // {x : (x - center)^T form (x - center) <= 1}, form symmetric positive definite.
    Ellipsoid(Vec center, Mat form) : center_(std::move(center)), form_(std::move(form)) {
        require_dim(form_.rows(), "Ellipsoid");
        if (static_cast<int>(center_.size()) != form_.rows())
            throw ContractViolation("Ellipsoid: center/form dimension mismatch");
        require_symmetric(form_, "Ellipsoid");
        for (int i = 0; i < form_.rows(); ++i)
            for (int j = i + 1; j < form_.cols(); ++j) form_(j, i) = form_(i, j);
        if (!is_positive_definite(form_))
            throw ContractViolation("Ellipsoid: form is not positive definite");
    }

    static Ellipsoid centered(Mat form) {
        return Ellipsoid(Vec(form.rows(), 0.0), std::move(form));
    }

    int n() const { return form_.rows(); }
    const Vec& center() const { return center_; }
    const Mat& form() const { return form_; }

    bool is_centered() const {
        for (double c : center_)
            if (c != 0.0) return false;
        return true;
    }

    bool contains(std::span<const double> x) const {
        Vec d(x.begin(), x.end());
        for (int i = 0; i < n(); ++i) d[i] -= center_[i];
        return dot(d, mat_vec(form_, d)) <= 1.0;
    }

    // Largest semi-axis; equals the radius of the smallest origin-centered
    // bounding ball when the ellipsoid is centered.
    double max_semi_axis() const {
        return 1.0 / std::sqrt(sym_eigen(form_).values.front());
    }

private:
    Vec center_;
    Mat form_;
};

inline void require_centered(const Ellipsoid& e, const char* where) {
    if (!e.is_centered())
        throw ContractViolation(std::string(where) + ": ellipsoid must be centered");
}

inline void require_dim_match(const Ellipsoid& e, std::span<const double> v, const char* where) {
    if (static_cast<int>(v.size()) != e.n())
        throw ContractViolation(std::string(where) + ": dimension mismatch");
}

// ---------------------------------------------------------------------------
// Mirrors, chords, binormals

// Mirror hyperplane of the direction l: the midpoints of all chords of E
// parallel to l lie on it; its normal is A * dir.
inline ProjHyperplane mirror(const Ellipsoid& e, const ProjLine& l) {
    require_centered(e, "mirror");
    require_dim_match(e, l.dir, "mirror");
    return ProjHyperplane(mat_vec(e.form(), l.dir));
}

// Length of the central chord E cap l: 2 / sqrt(d^T A d).
inline double chord_length(const Ellipsoid& e, const ProjLine& l) {
    require_centered(e, "chord_length");
    require_dim_match(e, l.dir, "chord_length");
    return 2.0 / std::sqrt(dot(l.dir, mat_vec(e.form(), l.dir)));
}

// Angle between A*dir and dir; zero exactly on eigenvector directions.
inline double binormal_angle(const Ellipsoid& e, const ProjLine& l) {
    require_centered(e, "binormal_angle");
    require_dim_match(e, l.dir, "binormal_angle");
    const Vec w = mat_vec(e.form(), l.dir);
    const double along = dot(w, l.dir);  // > 0 by positive definiteness
    const double perp = norm(project_off(w, l.dir));
    return std::atan2(perp, along);
}

inline constexpr double kDefaultBinormalTol = 1e-9;

inline bool is_binormal(const Ellipsoid& e, const ProjLine& l,
                        double tol = kDefaultBinormalTol) {
    return binormal_angle(e, l) <= tol;
}

// ---------------------------------------------------------------------------
// Reflections

// An affine involution fixing the mirror hyperplane pointwise and inverting
// lines parallel to the direction.
struct Reflection {
    Mat linear;
    ProjLine direction;
    ProjHyperplane mirror;
    Vec center;  // fixed point on the mirror

    Vec apply(std::span<const double> x) const {
        Vec d(x.begin(), x.end());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= center[i];
        Vec r = mat_vec(linear, d);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += center[i];
        return r;
    }
};

// The unique reflection of E with direction l: R = I - 2 d a^T / (a^T d)
// with a = A d.  Satisfies R^2 = I, R^T A R = A, and R fixes the mirror.
inline Reflection reflection_in_direction(const Ellipsoid& e, const ProjLine& l) {
    require_centered(e, "reflection_in_direction");
    require_dim_match(e, l.dir, "reflection_in_direction");
    const int n = e.n();
    const Vec a = mat_vec(e.form(), l.dir);
    const double ad = dot(a, l.dir);
    Mat r = Mat::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) -= 2.0 * l.dir[i] * a[j] / ad;
    return Reflection{std::move(r), l, ProjHyperplane(a), Vec(n, 0.0)};
}

// Polarity: l2 lies in mirror(l1) iff the bilinear form vanishes on the
// pair, which is symmetric in the two lines.
inline bool polar_pair_check(const Ellipsoid& e, const ProjLine& l1, const ProjLine& l2,
                             double tol = 1e-10) {
    require_centered(e, "polar_pair_check");
    require_dim_match(e, l1.dir, "polar_pair_check");
    require_dim_match(e, l2.dir, "polar_pair_check");
    const double v = dot(l2.dir, mat_vec(e.form(), l1.dir));
    return std::abs(v) <= tol * max_abs(e.form());
}

// Ground hyperplane of the (non-orthogonal) reflection in direction l:
// (M(l) cap l^perp) + l, with normal proportional to the component of A*dir
// orthogonal to dir.  Binormal directions have no unique ground hyperplane.
inline ProjHyperplane ground(const Ellipsoid& e, const ProjLine& l,
                             double tol = kDefaultBinormalTol) {
    require_centered(e, "ground");
    require_dim_match(e, l.dir, "ground");
    const Vec w = mat_vec(e.form(), l.dir);
    if (binormal_angle(e, l) <= tol)
        throw BinormalDirection(
            "ground: direction is binormal; every hyperplane through it is a ground hyperplane");
    return ProjHyperplane(project_off(w, l.dir));
}

// ---------------------------------------------------------------------------
// Spectrum partition

struct SpectrumGroup {
    double eigenvalue;       // representative form eigenvalue alpha_i
    double binormal_length;  // lambda_i = 2 / sqrt(alpha_i)
    Mat basis;               // n x dim orthonormal columns spanning V_i
};

// Eigenvalue groups of the form matrix ordered by decreasing binormal
// length; V_1 + ... + V_k is the orthogonal eigenspace decomposition.
struct SpectrumPartition {
    std::vector<SpectrumGroup> groups;
    double grouping_tol = 0.0;

    int k() const { return static_cast<int>(groups.size()); }

    int dim() const {
        int d = 0;
        for (const auto& g : groups) d += g.basis.cols();
        return d;
    }

    // Norm of the orthogonal projection of v onto V_i.
    double projection_norm(int i, std::span<const double> v) const {
        return norm(mat_tvec(groups[i].basis, v));
    }
};

inline constexpr double kDefaultGroupingTol = 1e-8;

inline SpectrumPartition spectrum_partition(const Ellipsoid& e,
                                            double grouping_tol = kDefaultGroupingTol) {
    const EigenDecomposition d = sym_eigen(e.form());
    const int n = e.n();

    SpectrumPartition p;
    p.grouping_tol = grouping_tol;
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && d.values[end] - d.values[end - 1] <= grouping_tol * d.values[end - 1])
            ++end;
        if (d.values[end - 1] - d.values[start] > grouping_tol * d.values[start])
            throw AmbiguousGrouping(
                "spectrum_partition: eigenvalue chain spans more than the grouping tolerance");
        double mean = 0.0;
        for (int i = start; i < end; ++i) mean += d.values[i];
        mean /= (end - start);
        Mat basis(n, end - start);
        for (int i = start; i < end; ++i) basis.set_col(i - start, d.vectors.col(i));
        p.groups.push_back({mean, 2.0 / std::sqrt(mean), std::move(basis)});
        start = end;
    }
    // ascending eigenvalue == descending binormal length, which is the order
    // the groups were built in
    return p;
}

}  // namespace reflecta
