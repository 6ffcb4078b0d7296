#pragma once

// Built-in convex body oracles: ellipsoids, bodies of revolution with a
// concave piecewise-linear profile, superellipsoids, boxes, and bump-
// perturbed ellipsoids (convex one-sided cubic bumps that break every
// mirror symmetry).  Each has an exact, cheap membership predicate.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "reflecta/body.hpp"

namespace reflecta {

inline BodyOracle make_ellipsoid_body(const Ellipsoid& e, std::string label = "ellipsoid") {
    const int n = e.n();
    const double r = e.max_semi_axis();
    BodyOracle k;
    k.n = n;
    k.interior_point = e.center();
    k.bounding_radius = r;
    k.label = std::move(label);
    k.contains = [e](std::span<const double> x) { return e.contains(x); };
    return k;
}

// Profile (z, radius) pairs; radii concave in z so the body of revolution
// about the z-axis is convex.
struct RevolutionProfile {
    std::vector<std::pair<double, double>> points;  // sorted by z

    double radius_at(double z) const {
        if (z < points.front().first || z > points.back().first) return -1.0;
        auto it = std::upper_bound(points.begin(), points.end(), z,
                                   [](double v, const auto& p) { return v < p.first; });
        if (it == points.begin()) return points.front().second;
        if (it == points.end()) return points.back().second;
        const auto& [z1, r1] = *(it - 1);
        const auto& [z2, r2] = *it;
        const double t = (z - z1) / (z2 - z1);
        return r1 + t * (r2 - r1);
    }
};

inline RevolutionProfile validate_profile(std::vector<std::pair<double, double>> pts) {
    if (pts.size() < 3) throw ContractViolation("revolution profile: need at least 3 points");
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].first <= pts[i - 1].first)
            throw ContractViolation("revolution profile: z values must be strictly increasing");
    for (const auto& [z, r] : pts)
        if (r < 0.0) throw ContractViolation("revolution profile: negative radius");
    // concavity: slopes non-increasing
    for (std::size_t i = 2; i < pts.size(); ++i) {
        const double s1 = (pts[i - 1].second - pts[i - 2].second) /
                          (pts[i - 1].first - pts[i - 2].first);
        const double s2 = (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
        if (s2 > s1 + 1e-12)
            throw ContractViolation("revolution profile: radii are not concave in z");
    }
    bool positive = false;
    for (const auto& [z, r] : pts) positive |= r > 0.0;
    if (!positive) throw ContractViolation("revolution profile: all radii are zero");
    return RevolutionProfile{std::move(pts)};
}

// Body of revolution about the z-axis in R^3.
inline BodyOracle make_revolution_body(std::vector<std::pair<double, double>> profile,
                                       std::string label = "revolution") {
    RevolutionProfile p = validate_profile(std::move(profile));

    double best_r = 0.0, best_z = 0.0;
    double bound = 0.0;
    for (const auto& [z, r] : p.points) {
        if (r > best_r) {
            best_r = r;
            best_z = z;
        }
        bound = std::max(bound, std::sqrt(z * z + r * r));
    }
    // center the interior point inside the support interval
    const double zmid = 0.5 * (p.points.front().first + p.points.back().first);
    const double zint = p.radius_at(zmid) > 0.5 * best_r ? zmid : best_z;

    BodyOracle k;
    k.n = 3;
    k.interior_point = {0.0, 0.0, zint};
    k.bounding_radius = bound + std::abs(zint);
    k.label = std::move(label);
    k.contains = [p](std::span<const double> x) {
        const double rad = p.radius_at(x[2]);
        if (rad < 0.0) return false;
        return x[0] * x[0] + x[1] * x[1] <= rad * rad;
    };
    return k;
}

// sum_i |x_i / a_i|^p <= 1, p >= 1.
inline BodyOracle make_superellipsoid(Vec semi_axes, double exponent,
                                      std::string label = "superellipsoid") {
    const int n = static_cast<int>(semi_axes.size());
    require_dim(n, "make_superellipsoid");
    if (exponent < 1.0) throw ContractViolation("superellipsoid: exponent must be >= 1");
    for (double a : semi_axes)
        if (a <= 0.0) throw ContractViolation("superellipsoid: semi axes must be positive");

    const double bound = *std::max_element(semi_axes.begin(), semi_axes.end());
    BodyOracle k;
    k.n = n;
    k.interior_point = Vec(n, 0.0);
    k.bounding_radius = bound * std::pow(static_cast<double>(n), 1.0 / exponent);
    k.label = std::move(label);
    k.contains = [semi_axes = std::move(semi_axes), exponent](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += std::pow(std::abs(x[i] / semi_axes[i]), exponent);
        return s <= 1.0;
    };
    return k;
}

// |x_i| <= a_i.
inline BodyOracle make_box(Vec semi_sides, std::string label = "box") {
    const int n = static_cast<int>(semi_sides.size());
    require_dim(n, "make_box");
    for (double a : semi_sides)
        if (a <= 0.0) throw ContractViolation("box: semi sides must be positive");
    double b2 = 0.0;
    for (double a : semi_sides) b2 += a * a;

    BodyOracle k;
    k.n = n;
    k.interior_point = Vec(n, 0.0);
    k.bounding_radius = std::sqrt(b2);
    k.label = std::move(label);
    k.contains = [semi_sides = std::move(semi_sides)](std::span<const double> x) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i]) > semi_sides[i]) return false;
        return true;
    };
    return k;
}

struct Bump {
    Vec direction;  // unit
    double amplitude = 0.0;
};

// {x : (x-c)^T A (x-c) + sum_i amp_i * max(0, u_i . (x-c))^3 <= 1}.  Each
// bump term is convex, so the body stays convex; the one-sided cubics kill
// central symmetry and every mirror.
inline BodyOracle make_perturbed_body(const Ellipsoid& base, std::vector<Bump> bumps,
                                      std::string label = "perturbed") {
    for (auto& b : bumps) {
        if (static_cast<int>(b.direction.size()) != base.n())
            throw ContractViolation("perturbed body: bump dimension mismatch");
        if (b.amplitude < 0.0) throw ContractViolation("perturbed body: negative amplitude");
        b.direction = normalized(b.direction);
    }

    BodyOracle k;
    k.n = base.n();
    k.interior_point = base.center();
    k.bounding_radius = base.max_semi_axis();  // the body is inside the base ellipsoid
    k.label = std::move(label);
    k.contains = [base, bumps = std::move(bumps)](std::span<const double> x) {
        Vec d(x.begin(), x.end());
        for (int i = 0; i < base.n(); ++i) d[i] -= base.center()[i];
        double f = dot(d, mat_vec(base.form(), d));
        for (const Bump& b : bumps) {
            const double t = dot(b.direction, d);
            if (t > 0.0) f += b.amplitude * t * t * t;
        }
        return f <= 1.0;
    };
    return k;
}

// Deterministic default perturbation used by tests and the CLI.
inline std::vector<Bump> default_bumps(int n, int count, double amplitude, std::uint64_t seed) {
    std::vector<Bump> bumps;
    bumps.reserve(count);
    for (int i = 0; i < count; ++i) {
        std::mt19937_64 g = rng_for(seed ^ 0xb11ed5ULL, static_cast<std::uint64_t>(i));
        bumps.push_back({random_unit_vector(g, n), amplitude});
    }
    return bumps;
}

// Midpoint-closure spot check of the convexity contract.
inline bool convexity_spot_check(const BodyOracle& k, int pairs = 1000, std::uint64_t seed = 0) {
    require_body(k, "convexity_spot_check");
    std::uint64_t i = 0;
    const auto sample_contained = [&]() {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            std::mt19937_64 g = rng_for(seed ^ 0xc0471ULL, i++);
            const Vec p = add(k.interior_point, random_in_ball(g, k.n, k.bounding_radius));
            if (k.contains(p)) return p;
        }
        throw NumericalFailure("convexity_spot_check: could not sample contained points");
    };
    Vec mid(k.n);
    for (int done = 0; done < pairs; ++done) {
        const Vec a = sample_contained();
        const Vec b = sample_contained();
        for (int j = 0; j < k.n; ++j) mid[j] = 0.5 * (a[j] + b[j]);
        if (!k.contains(mid)) return false;
    }
    return true;
}

}  // namespace reflecta
