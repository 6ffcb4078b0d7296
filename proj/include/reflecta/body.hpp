#pragma once

// Oracle-based convex bodies.  A body is a membership predicate plus an
// interior point and bounding radius; on top of that sit chord extraction by
// bisection, least-squares mirror fitting from chord midpoints, reflection
// detection, direction / orthogonal-reflection scans, the minimum-volume
// enclosing ellipsoid, and the ellipsoid / rotational / other classifier.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reflecta/quadric.hpp"
#include "reflecta/rng.hpp"

namespace reflecta {

struct BodyOracle {
    int n = 0;
    std::function<bool(std::span<const double>)> contains;
    Vec interior_point;
    double bounding_radius = 0.0;  // K is inside ball(interior_point, bounding_radius)
    std::string label;
};

inline void require_body(const BodyOracle& k, const char* where) {
    if (k.n < 2 || k.n > kMaxDim || !k.contains || k.bounding_radius <= 0.0 ||
        static_cast<int>(k.interior_point.size()) != k.n)
        throw ContractViolation(std::string(where) + ": malformed body oracle");
}

inline constexpr double kDefaultBisectTol = 1e-9;
inline constexpr double kDefaultThreshold = 1e-3;

// ---------------------------------------------------------------------------
// Boundary and chords

// Distance from the interior point to the boundary along the unit direction u.
inline double boundary_distance(const BodyOracle& k, std::span<const double> u,
                                double tol = kDefaultBisectTol) {
    const double r = k.bounding_radius;
    double lo = 0.0, hi = 2.5 * r;  // outside by the bounding contract
    Vec x(k.n);
    while (hi - lo > tol * r) {
        const double mid = 0.5 * (lo + hi);
        for (int i = 0; i < k.n; ++i) x[i] = k.interior_point[i] + mid * u[i];
        (k.contains(x) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline Vec boundary_point(const BodyOracle& k, std::span<const double> u,
                          double tol = kDefaultBisectTol) {
    const double rho = boundary_distance(k, u, tol);
    Vec x(k.n);
    for (int i = 0; i < k.n; ++i) x[i] = k.interior_point[i] + rho * u[i];
    return x;
}

struct Segment {
    Vec a, b;

    Vec midpoint() const {
        Vec m(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
        return m;
    }

    double length() const { return norm(sub(b, a)); }
};

// K cap (base + span dir), by bisection between inside and outside
// parameters.  Returns nothing when none of the 64 grid probes lands inside.
inline std::optional<Segment> chord(const BodyOracle& k, std::span<const double> base,
                                    const ProjLine& l, double tol = kDefaultBisectTol) {
    require_body(k, "chord");
    if (l.n() != k.n || static_cast<int>(base.size()) != k.n)
        throw ContractViolation("chord: dimension mismatch");
    if (tol <= 0.0) throw ContractViolation("chord: tol must be positive");
    const double r = k.bounding_radius;
    const Vec& d = l.dir;

    Vec rel(k.n);
    for (int i = 0; i < k.n; ++i) rel[i] = k.interior_point[i] - base[i];
    const double tc = dot(d, rel);

    Vec x(k.n);
    const auto at = [&](double t) -> bool {
        for (int i = 0; i < k.n; ++i) x[i] = base[i] + t * d[i];
        return k.contains(x);
    };

    constexpr int kProbes = 64;
    int first = -1, last = -1;
    for (int i = 0; i < kProbes; ++i) {
        const double t = tc + 2.0 * r * (2.0 * i / (kProbes - 1) - 1.0);
        if (at(t)) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) return std::nullopt;

    const auto probe_t = [&](int i) { return tc + 2.0 * r * (2.0 * i / (kProbes - 1) - 1.0); };
    double in_lo = probe_t(first), in_hi = probe_t(last);
    double out_lo = tc - 2.5 * r, out_hi = tc + 2.5 * r;

    while (in_lo - out_lo > tol * r) {
        const double mid = 0.5 * (in_lo + out_lo);
        (at(mid) ? in_lo : out_lo) = mid;
    }
    while (out_hi - in_hi > tol * r) {
        const double mid = 0.5 * (in_hi + out_hi);
        (at(mid) ? in_hi : out_hi) = mid;
    }

    const double ta = 0.5 * (in_lo + out_lo), tb = 0.5 * (in_hi + out_hi);
    Segment s{Vec(k.n), Vec(k.n)};
    for (int i = 0; i < k.n; ++i) {
        s.a[i] = base[i] + ta * d[i];
        s.b[i] = base[i] + tb * d[i];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Mirror fitting

struct MirrorFit {
    ProjLine direction;
    Vec normal;           // unit, canonical sign
    double offset = 0.0;  // hyperplane {x : normal . x = offset}
    double residual_rms = 0.0;  // in units of bounding_radius
    int chords_used = 0;
    double transversality = 0.0;  // |normal . dir|; a mirror is transverse to its direction
    Vec centroid;                 // mean chord midpoint, lies on the hyperplane
};

struct FitOptions {
    int grid = 4;
    double tol = kDefaultBisectTol;
};

// Samples a lattice of lines parallel to l covering the body's bounding box
// in the transverse directions, collects chord midpoints and fits the
// least-squares affine hyperplane through them.  The lattice adapts to the
// measured support extents so elongated bodies keep a well-spread midpoint
// cloud in every direction.
inline MirrorFit fit_mirror(const BodyOracle& k, const ProjLine& l, const FitOptions& opt = {}) {
    require_body(k, "fit_mirror");
    const int n = k.n;
    if (l.n() != n) throw ContractViolation("fit_mirror: direction dimension mismatch");
    const int grid = opt.grid;
    if (grid < 1) throw ContractViolation("fit_mirror: grid must be >= 1");
    const double r = k.bounding_radius;
    const Mat basis = hyperplane_basis(l.dir);

    Vec ext_pos(n - 1), ext_neg(n - 1);
    {
        Vec dir(n);
        for (int a = 0; a < n - 1; ++a) {
            for (int i = 0; i < n; ++i) dir[i] = basis(i, a);
            ext_pos[a] = boundary_distance(k, dir, 1e-6);
            for (int i = 0; i < n; ++i) dir[i] = -dir[i];
            ext_neg[a] = boundary_distance(k, dir, 1e-6);
        }
    }

    std::vector<Vec> mids;
    std::vector<int> idx(n - 1, -grid);
    Vec base(n);
    for (;;) {
        for (int i = 0; i < n; ++i) base[i] = k.interior_point[i];
        for (int a = 0; a < n - 1; ++a) {
            const double reach = idx[a] >= 0 ? ext_pos[a] : ext_neg[a];
            const double off = 0.92 * reach * idx[a] / grid;
            for (int i = 0; i < n; ++i) base[i] += off * basis(i, a);
        }
        if (auto seg = chord(k, base, l, opt.tol)) mids.push_back(seg->midpoint());

        int a = 0;  // odometer over the lattice
        while (a < n - 1 && ++idx[a] > grid) idx[a++] = -grid;
        if (a == n - 1) break;
    }

    const int m = static_cast<int>(mids.size());
    if (m < n + 1)
        throw TooFewChords("fit_mirror: only " + std::to_string(m) + " usable chords, need " +
                           std::to_string(n + 1));

    Vec mean(n, 0.0);
    for (const Vec& p : mids)
        for (int i = 0; i < n; ++i) mean[i] += p[i];
    for (int i = 0; i < n; ++i) mean[i] /= m;

    Mat cov(n, n);
    for (const Vec& p : mids)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) cov(i, j) += (p[i] - mean[i]) * (p[j] - mean[j]);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) cov(j, i) = cov(i, j);

    const EigenDecomposition d = sym_eigen(cov);
    Vec normal = d.vectors.col(0);  // smallest principal component

    double ss = 0.0;
    for (const Vec& p : mids) {
        const double dist = dot(normal, p) - dot(normal, mean);
        ss += dist * dist;
    }

    MirrorFit fit{l, std::move(normal), 0.0, std::sqrt(ss / m) / r, m, 0.0, mean};
    canonicalize_sign(fit.normal);
    fit.offset = dot(fit.normal, mean);
    fit.transversality = std::abs(dot(fit.normal, l.dir));
    return fit;
}

// Affine reflection with direction l and the fitted mirror:
// x -> x - 2 d (normal . x - offset) / (normal . d).
inline Vec reflect_point(const MirrorFit& fit, std::span<const double> x) {
    const double nd = dot(fit.normal, fit.direction.dir);
    const double f = 2.0 * (dot(fit.normal, x) - fit.offset) / nd;
    Vec r(x.begin(), x.end());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= f * fit.direction.dir[i];
    return r;
}

// ---------------------------------------------------------------------------
// Reflection detection

struct ReflectionTest {
    bool accepted = false;
    MirrorFit fit;
    double invariance_error = 0.0;  // in units of bounding_radius
};

struct ReflectionOptions {
    FitOptions fit;
    int boundary_samples = 500;
    std::uint64_t seed = 0;
    double min_transversality = 1e-6;
};

// Fits the mirror for direction l, builds the induced affine reflection and
// measures the worst boundary-invariance defect over sampled boundary
// points.  Accepts when both the fit residual and the invariance error stay
// below the threshold.
inline ReflectionTest has_reflection(const BodyOracle& k, const ProjLine& l, double threshold,
                                     const ReflectionOptions& opt = {}) {
    ReflectionTest t{false, fit_mirror(k, l, opt.fit), 0.0};
    if (t.fit.transversality < opt.min_transversality) {
        t.invariance_error = std::numeric_limits<double>::infinity();
        return t;
    }

    const double r = k.bounding_radius;
    double worst = 0.0;
    Vec dirbuf(k.n);
    for (int j = 0; j < opt.boundary_samples; ++j) {
        std::mt19937_64 g = rng_for(opt.seed ^ 0xb0d7a271ULL, static_cast<std::uint64_t>(j));
        const Vec u = random_unit_vector(g, k.n);
        const Vec p = boundary_point(k, u, opt.fit.tol);
        const Vec q = reflect_point(t.fit, p);

        double qn = 0.0;
        for (int i = 0; i < k.n; ++i) {
            dirbuf[i] = q[i] - k.interior_point[i];
            qn += dirbuf[i] * dirbuf[i];
        }
        qn = std::sqrt(qn);
        if (qn < 1e-12 * r) {
            worst = 1.0;  // reflected boundary point collapsed to the interior point
            break;
        }
        for (int i = 0; i < k.n; ++i) dirbuf[i] /= qn;
        const double rho = boundary_distance(k, dirbuf, opt.fit.tol);
        worst = std::max(worst, std::abs(qn - rho) / r);
    }
    t.invariance_error = worst;
    t.accepted = t.fit.residual_rms <= threshold && worst <= threshold;
    return t;
}

// ---------------------------------------------------------------------------
// Direction scan

struct DirectionScanRow {
    ProjLine line;
    double residual_rms = 0.0;
    double invariance_error = 0.0;
};

struct DirectionScanReport {
    int samples = 0;
    std::vector<DirectionScanRow> accepted;
    double threshold = 0.0;
    double thick_estimate = 0.0;  // largest sampled-ball fraction fully accepted
    std::uint64_t seed = 0;
};

struct DirectionScanOptions {
    ReflectionOptions reflection;
    double thick_ball_radius = 0.1;  // angular radius of the probe balls
    int thick_probes = 50;
    int thick_centers = 8;
    int threads = 1;
};

namespace detail {

inline ProjLine tilt_direction(std::span<const double> center, std::mt19937_64& g, double max_angle,
                               int n) {
    Vec t = random_unit_vector(g, n);
    Vec tp = project_off(t, center);
    double tn = norm(tp);
    while (tn < 1e-8) {  // resample a tangent that is not parallel to the center
        t = random_unit_vector(g, n);
        tp = project_off(t, center);
        tn = norm(tp);
    }
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const double phi = max_angle * std::pow(ud(g), 1.0 / (n - 1));
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = std::cos(phi) * center[i] + std::sin(phi) * tp[i] / tn;
    return ProjLine(std::move(v));
}

}  // namespace detail

// Uniformly samples directions, records those admitting a reflection, and
// estimates thickness as the best fully-accepted fraction of an angular
// ball around an accepted direction.  A sampled surrogate for "contains a
// nonempty open set", declared as such in the report.
inline DirectionScanReport direction_scan(const BodyOracle& k, int samples, double threshold,
                                          std::uint64_t seed,
                                          const DirectionScanOptions& opt = {}) {
    require_body(k, "direction_scan");
    DirectionScanReport rep;
    rep.samples = samples;
    rep.threshold = threshold;
    rep.seed = seed;

    std::vector<std::optional<DirectionScanRow>> rows(samples);
    parallel_for(samples, opt.threads, [&](int i) {
        std::mt19937_64 g = rng_for(seed, static_cast<std::uint64_t>(i));
        ProjLine l(random_unit_vector(g, k.n));
        ReflectionOptions ro = opt.reflection;
        ro.seed = splitmix64(seed ^ (static_cast<std::uint64_t>(i) << 20));
        const ReflectionTest t = has_reflection(k, l, threshold, ro);
        if (t.accepted) rows[i] = DirectionScanRow{l, t.fit.residual_rms, t.invariance_error};
    });
    for (auto& r : rows)
        if (r) rep.accepted.push_back(std::move(*r));

    if (!rep.accepted.empty()) {
        const int count = static_cast<int>(rep.accepted.size());
        const int centers = std::min(opt.thick_centers, count);
        std::vector<double> fractions(centers, 0.0);
        parallel_for(centers, opt.threads, [&](int c) {
            const ProjLine& center = rep.accepted[static_cast<std::size_t>(c) * count / centers].line;
            int good = 0;
            for (int t = 0; t < opt.thick_probes; ++t) {
                std::mt19937_64 g =
                    rng_for(seed ^ 0x7e1cba11ULL, static_cast<std::uint64_t>(c) * 10007 + t);
                const ProjLine probe =
                    detail::tilt_direction(center.dir, g, opt.thick_ball_radius, k.n);
                ReflectionOptions ro = opt.reflection;
                ro.seed = splitmix64(seed ^ 0x9aa1ULL ^ static_cast<std::uint64_t>(c * 131 + t));
                if (has_reflection(k, probe, threshold, ro).accepted) ++good;
            }
            fractions[c] = static_cast<double>(good) / opt.thick_probes;
        });
        for (double f : fractions) rep.thick_estimate = std::max(rep.thick_estimate, f);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Orthogonal reflection scan

struct OrthoCluster {
    ProjLine representative;
    int size = 0;
    double diameter = 0.0;
    double residual_rms = 0.0;
    double ortho_angle = 0.0;
    double invariance_error = 0.0;
};

struct OrthoScanReport {
    std::vector<ProjLine> directions;  // one per cluster
    std::vector<OrthoCluster> clusters;
    std::vector<ProjLine> accepted_points;  // refined accepted directions before merging
    bool nonfinite = false;  // evidence of a continuum of orthogonal reflections
    int samples = 0;
    double threshold = 0.0;
    std::uint64_t seed = 0;
};

struct OrthoScanOptions {
    double ortho_angle_tol = 1e-3;  // mirror-normal vs direction angle for "orthogonal"
    double cluster_radius = 0.05;
    int candidates = 24;           // best-scored seeds, spaced apart
    int coverage_candidates = 12;  // farthest-point seeds covering the sphere
    int coarse_grid = 2;
    int refine_grid = 3;
    FitOptions final_fit;  // full-accuracy fit for acceptance
    int boundary_samples = 400;
    int threads = 1;
};

namespace detail {

// residual + orthogonality-defect score; zero exactly at directions of
// orthogonal reflections
inline double ortho_score(const BodyOracle& k, const ProjLine& l, int grid, double tol) {
    FitOptions fo{grid, tol};
    try {
        const MirrorFit fit = fit_mirror(k, l, fo);
        const double c = std::min(1.0, std::abs(dot(fit.normal, l.dir)));
        return fit.residual_rms + std::acos(c);
    } catch (const TooFewChords&) {
        return std::numeric_limits<double>::infinity();
    }
}

// Pattern search on the sphere of directions: step to the best of the
// 2(n-1) tangent probes, halve the radius when none improves.
template <typename F>
inline std::pair<ProjLine, double> refine_direction(ProjLine start, double radius0,
                                                    double radius_min, F&& score) {
    ProjLine best = start;
    double val = score(best);
    double radius = radius0;
    const int n = best.n();
    int evals = 0;
    while (radius > radius_min && evals < 20000) {
        const Mat tangents = hyperplane_basis(best.dir);
        std::optional<ProjLine> step;
        double step_val = val;
        for (int a = 0; a < n - 1; ++a) {
            for (double s : {1.0, -1.0}) {
                Vec v(n);
                for (int i = 0; i < n; ++i) v[i] = best.dir[i] + s * radius * tangents(i, a);
                ProjLine cand(std::move(v));
                const double sv = score(cand);
                ++evals;
                if (sv < step_val) {
                    step_val = sv;
                    step = std::move(cand);
                }
            }
        }
        if (step) {
            best = std::move(*step);
            val = step_val;
        } else {
            radius *= 0.5;
        }
    }
    return {best, val};
}

}  // namespace detail

// Finds the directions of orthogonal reflections of K: a coarse survey over
// sampled directions, local refinement of the best candidates on the
// residual + orthogonality score, acceptance via has_reflection with a tight
// mirror-orthogonality test, and cluster merging.  Flags a non-finite family
// when a cluster stretches beyond its merge radius or the midpoint of two
// accepted directions is itself accepted.
inline OrthoScanReport orthogonal_reflection_scan(const BodyOracle& k, int samples,
                                                  double threshold, std::uint64_t seed,
                                                  const OrthoScanOptions& opt = {}) {
    require_body(k, "orthogonal_reflection_scan");
    OrthoScanReport rep;
    rep.samples = samples;
    rep.threshold = threshold;
    rep.seed = seed;

    // coarse survey
    std::vector<std::pair<double, int>> scored(samples);
    std::vector<ProjLine> dirs;
    dirs.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        std::mt19937_64 g = rng_for(seed, static_cast<std::uint64_t>(i));
        dirs.emplace_back(random_unit_vector(g, k.n));
    }
    parallel_for(samples, opt.threads, [&](int i) {
        scored[i] = {detail::ortho_score(k, dirs[i], opt.coarse_grid, opt.final_fit.tol), i};
    });
    std::stable_sort(scored.begin(), scored.end());

    // spread candidate seeds over the best coarse scores
    std::vector<int> seeds;
    for (const auto& [sc, i] : scored) {
        if (static_cast<int>(seeds.size()) >= opt.candidates) break;
        if (!std::isfinite(sc)) break;
        bool close = false;
        for (int j : seeds)
            if (projective_distance(dirs[i], dirs[j]) < 4.0 * opt.cluster_radius) close = true;
        if (!close) seeds.push_back(i);
    }
    // farthest-point coverage seeds so every sizable basin gets a start even
    // when the best scores crowd around a subset of the minima
    for (int extra = 0; extra < opt.coverage_candidates; ++extra) {
        double best_min = -1.0;
        int pick = -1;
        for (int i = 0; i < samples; ++i) {
            double dmin = 2.0;
            for (int j : seeds)
                dmin = std::min(dmin, projective_distance(dirs[i], dirs[j]));
            if (dmin > best_min) {
                best_min = dmin;
                pick = i;
            }
        }
        if (pick < 0 || best_min < 4.0 * opt.cluster_radius) break;
        seeds.push_back(pick);
    }

    // refine and accept
    std::vector<std::optional<OrthoCluster>> refined(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), opt.threads, [&](int c) {
        auto [line, sc] = detail::refine_direction(
            dirs[seeds[c]], 0.2, 1e-7, [&](const ProjLine& l) {
                return detail::ortho_score(k, l, opt.refine_grid, opt.final_fit.tol);
            });
        ReflectionOptions ro;
        ro.fit = opt.final_fit;
        ro.boundary_samples = opt.boundary_samples;
        ro.seed = splitmix64(seed ^ 0x0a7b5ULL ^ static_cast<std::uint64_t>(c));
        const ReflectionTest t = has_reflection(k, line, threshold, ro);
        const double ang = std::acos(std::min(1.0, std::abs(dot(t.fit.normal, line.dir))));
        if (t.accepted && ang <= opt.ortho_angle_tol)
            refined[c] = OrthoCluster{line, 1, 0.0, t.fit.residual_rms, ang, t.invariance_error};
    });

    std::vector<OrthoCluster> points;
    for (auto& r : refined)
        if (r) points.push_back(std::move(*r));
    for (const auto& p : points) rep.accepted_points.push_back(p.representative);

    // single-linkage merge
    std::vector<int> label(points.size(), -1);
    int nclusters = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (label[i] >= 0) continue;
        label[i] = nclusters;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < points.size(); ++b) {
                if (label[b] >= 0) continue;
                if (projective_distance(points[a].representative, points[b].representative) <=
                    opt.cluster_radius) {
                    label[b] = nclusters;
                    stack.push_back(b);
                }
            }
        }
        ++nclusters;
    }

    for (int c = 0; c < nclusters; ++c) {
        std::optional<OrthoCluster> best;
        double best_score = std::numeric_limits<double>::infinity();
        double diameter = 0.0;
        int size = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (label[i] != c) continue;
            ++size;
            const double sc = points[i].residual_rms + points[i].ortho_angle;
            if (sc < best_score) {
                best_score = sc;
                best = points[i];
            }
            for (std::size_t j = i + 1; j < points.size(); ++j)
                if (label[j] == c)
                    diameter = std::max(diameter, projective_distance(points[i].representative,
                                                                      points[j].representative));
        }
        best->size = size;
        best->diameter = diameter;
        if (diameter > 3.0 * opt.cluster_radius) rep.nonfinite = true;
        rep.clusters.push_back(*best);
        rep.directions.push_back(rep.clusters.back().representative);
    }

    // a continuum closes under geodesic midpoints; a finite mirror set does not
    if (!rep.nonfinite) {
        for (std::size_t i = 0; i < rep.directions.size() && !rep.nonfinite; ++i) {
            for (std::size_t j = i + 1; j < rep.directions.size() && !rep.nonfinite; ++j) {
                Vec v = rep.directions[j].dir;
                if (dot(rep.directions[i].dir, v) < 0.0)
                    for (double& x : v) x = -x;
                for (int t = 0; t < k.n; ++t) v[t] += rep.directions[i].dir[t];
                ProjLine mid(std::move(v));
                ReflectionOptions ro;
                ro.fit = opt.final_fit;
                ro.boundary_samples = opt.boundary_samples;
                ro.seed = splitmix64(seed ^ 0x3030ULL ^ static_cast<std::uint64_t>(i * 97 + j));
                const ReflectionTest t = has_reflection(k, mid, threshold, ro);
                const double ang =
                    std::acos(std::min(1.0, std::abs(dot(t.fit.normal, mid.dir))));
                if (t.accepted && ang <= opt.ortho_angle_tol) rep.nonfinite = true;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Minimum-volume enclosing ellipsoid (Khachiyan barycentric ascent)

struct FittedEllipsoid {
    Ellipsoid ellipsoid;
    double relative_volume_gap = 0.0;
    int iterations = 0;
};

inline FittedEllipsoid mvee(const std::vector<Vec>& points, double eps = 1e-4,
                            int max_iter = 500000) {
    if (points.empty()) throw DegeneratePointSet("mvee: empty point set");
    const int n = static_cast<int>(points.front().size());
    const int m = static_cast<int>(points.size());
    if (eps <= 0.0) throw ContractViolation("mvee: eps must be positive");
    if (m < n + 1) throw DegeneratePointSet("mvee: points cannot affinely span the space");

    const int d = n + 1;
    std::vector<Vec> q(m, Vec(d));
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) q[j][i] = points[j][i];
        q[j][n] = 1.0;
    }

    Vec u(m, 1.0 / m);
    Mat minv;
    Vec kappa(m);
    const auto rebuild = [&]() {
        Mat mm(d, d);
        for (int j = 0; j < m; ++j)
            for (int a = 0; a < d; ++a)
                for (int b = a; b < d; ++b) mm(a, b) += u[j] * q[j][a] * q[j][b];
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) mm(b, a) = mm(a, b);
        try {
            minv = spd_inverse(mm);
        } catch (const NumericalFailure&) {
            throw DegeneratePointSet("mvee: points do not affinely span the space");
        }
        for (int j = 0; j < m; ++j) kappa[j] = dot(q[j], mat_vec(minv, q[j]));
    };
    rebuild();

    const double target = (1.0 + eps) * d;
    int it = 0;
    double kmax = 0.0;
    for (; it < max_iter; ++it) {
        int jstar = 0;
        kmax = kappa[0];
        for (int j = 1; j < m; ++j)
            if (kappa[j] > kmax) {
                kmax = kappa[j];
                jstar = j;
            }
        if (kmax <= target) break;

        const double beta = (kmax - d) / (d * (kmax - 1.0));
        for (int j = 0; j < m; ++j) u[j] *= (1.0 - beta);
        u[jstar] += beta;

        if ((it + 1) % 1000 == 0) {
            rebuild();  // periodic refresh against Sherman-Morrison drift
            continue;
        }
        // M_new = (1-b) M + b q q^T  =>  rank-one update of the inverse
        const Vec v = mat_vec(minv, q[jstar]);
        const double denom = (1.0 - beta) + beta * kmax;
        const double c1 = 1.0 / (1.0 - beta);
        const double c2 = beta * c1 / denom;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) minv(a, b) = c1 * minv(a, b) - c2 * v[a] * v[b];
        for (int j = 0; j < m; ++j) {
            const double w = dot(q[j], v);
            kappa[j] = c1 * kappa[j] - c2 * w * w;
        }
    }
    if (it == max_iter) throw NumericalFailure("mvee: iteration limit reached");

    Vec center(n, 0.0);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) center[i] += u[j] * points[j][i];
    Mat scatter(n, n);
    for (int j = 0; j < m; ++j)
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                scatter(a, b) += u[j] * (points[j][a] - center[a]) * (points[j][b] - center[b]);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) scatter(b, a) = scatter(a, b);

    Mat form;
    try {
        form = spd_inverse(scatter);
    } catch (const NumericalFailure&) {
        throw DegeneratePointSet("mvee: degenerate scatter matrix");
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) form(a, b) /= n;

    // guarantee containment of every input point
    double max_mahal = 0.0;
    Vec diff(n);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) diff[i] = points[j][i] - center[i];
        max_mahal = std::max(max_mahal, dot(diff, mat_vec(form, diff)));
    }
    double inflate = 1.0;
    if (max_mahal > 1.0) {
        inflate = max_mahal;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) form(a, b) /= inflate;
    }

    FittedEllipsoid out{Ellipsoid(std::move(center), std::move(form)),
                        std::pow(inflate, 0.5 * n) * std::pow(kmax / d, 0.5 * d) - 1.0, it};
    return out;
}

// Boundary point cloud by ray shooting from the interior point.
inline std::vector<Vec> boundary_cloud(const BodyOracle& k, int count, std::uint64_t seed,
                                       double tol = kDefaultBisectTol, int threads = 1) {
    require_body(k, "boundary_cloud");
    std::vector<Vec> pts(count);
    parallel_for(count, threads, [&](int i) {
        std::mt19937_64 g = rng_for(seed, static_cast<std::uint64_t>(i));
        pts[i] = boundary_point(k, random_unit_vector(g, k.n), tol);
    });
    return pts;
}

// ---------------------------------------------------------------------------
// Classification

struct RotationalEvidence {
    ProjLine axis;
    Vec axis_point;
    double max_disk_residual = 0.0;   // (max - min) / mean radius over sections
    double max_center_offset = 0.0;   // distance of disk centers from the axis, / R
    int sections = 0;
};

struct ClassifyConfig {
    double threshold = kDefaultThreshold;
    double thick_min = 0.5;
    int dir_samples = 200;
    int ortho_samples = 600;
    int mvee_points = 3000;
    double mvee_eps = 1e-5;
    double mvee_fit_tol = 1e-3;
    double disk_tol = 1e-3;
    int disk_sections = 5;
    int disk_rays = 48;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ClassifyReport {
    std::string verdict;  // "ellipsoid" | "rotational" | "other"
    DirectionScanReport dir_scan;
    std::optional<FittedEllipsoid> mvee_fit;
    double mvee_boundary_residual = 0.0;  // max |q(p) - 1| over fresh boundary samples
    std::optional<OrthoScanReport> ortho;
    std::optional<RotationalEvidence> rotational;
};

namespace detail {

// Ring of in-plane boundary points around `p`, sampled at equal angles.
inline std::vector<std::array<double, 2>> section_ring(const BodyOracle& k, const Vec& p,
                                                       const Mat& plane_basis, int rays) {
    const double r = k.bounding_radius;
    std::vector<std::array<double, 2>> ring(rays);
    Vec x(k.n);
    for (int j = 0; j < rays; ++j) {
        const double a = 2.0 * M_PI * j / rays;
        double lo = 0.0, hi = 2.5 * r;
        while (hi - lo > 1e-10 * r) {
            const double mid = 0.5 * (lo + hi);
            for (int i = 0; i < k.n; ++i)
                x[i] = p[i] + mid * (std::cos(a) * plane_basis(i, 0) +
                                     std::sin(a) * plane_basis(i, 1));
            (k.contains(x) ? lo : hi) = mid;
        }
        const double rho = 0.5 * (lo + hi);
        ring[j] = {rho * std::cos(a), rho * std::sin(a)};
    }
    return ring;
}

// Algebraic (Kasa) circle fit; exact for points on a true circle, so the
// recovered center does not depend on where the rays were shot from.
inline std::optional<std::array<double, 3>> fit_circle(
    const std::vector<std::array<double, 2>>& pts) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, sxz = 0, syz = 0, sz = 0;
    const int m = static_cast<int>(pts.size());
    for (const auto& q : pts) {
        const double z = q[0] * q[0] + q[1] * q[1];
        sx += q[0];
        sy += q[1];
        sxx += q[0] * q[0];
        syy += q[1] * q[1];
        sxy += q[0] * q[1];
        sxz += q[0] * z;
        syz += q[1] * z;
        sz += z;
    }
    // normal equations for z + D x + E y + F = 0
    Mat a(3, 3);
    a(0, 0) = sxx;
    a(0, 1) = sxy;
    a(0, 2) = sx;
    a(1, 0) = sxy;
    a(1, 1) = syy;
    a(1, 2) = sy;
    a(2, 0) = sx;
    a(2, 1) = sy;
    a(2, 2) = m;
    Vec rhs{-sxz, -syz, -sz};
    // Gaussian elimination with partial pivoting
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int i = c + 1; i < 3; ++i)
            if (std::abs(a(i, c)) > std::abs(a(piv, c))) piv = i;
        if (std::abs(a(piv, c)) < 1e-14) return std::nullopt;
        if (piv != c) {
            for (int j = 0; j < 3; ++j) std::swap(a(c, j), a(piv, j));
            std::swap(rhs[c], rhs[piv]);
        }
        for (int i = c + 1; i < 3; ++i) {
            const double f = a(i, c) / a(c, c);
            for (int j = c; j < 3; ++j) a(i, j) -= f * a(c, j);
            rhs[i] -= f * rhs[c];
        }
    }
    Vec sol(3);
    for (int i = 2; i >= 0; --i) {
        double v = rhs[i];
        for (int j = i + 1; j < 3; ++j) v -= a(i, j) * sol[j];
        sol[i] = v / a(i, i);
    }
    const double cx = -0.5 * sol[0], cy = -0.5 * sol[1];
    const double rad2 = cx * cx + cy * cy - sol[2];
    if (rad2 <= 0.0) return std::nullopt;
    return std::array<double, 3>{cx, cy, std::sqrt(rad2)};
}

// Checks that 2-plane sections orthogonal to the candidate axis flat are
// disks centered on a common line parallel to the axis.  The axis position
// is fitted from circle-fit centers, so an imprecise anchor point does not
// bias the verdict.
inline std::optional<RotationalEvidence> rotational_check(const BodyOracle& k,
                                                          const ProjLine& axis,
                                                          const Vec& anchor,
                                                          const Mat& plane_basis,
                                                          const ClassifyConfig& cfg) {
    const double r = k.bounding_radius;
    Vec dir = axis.dir;
    const double t_hi = boundary_distance(k, dir, 1e-9);
    for (double& x : dir) x = -x;
    const double t_lo = -boundary_distance(k, dir, 1e-9);

    struct Ring {
        Vec point;                                   // 3D section anchor
        std::vector<std::array<double, 2>> samples;  // in-plane boundary ring
        std::array<double, 2> center;                // fitted circle center
    };
    std::vector<Ring> rings;
    Vec p(k.n);
    for (int s = 0; s < cfg.disk_sections; ++s) {
        const double f = (s + 1.0) / (cfg.disk_sections + 1.0);
        const double t = t_lo + f * (t_hi - t_lo);
        for (int i = 0; i < k.n; ++i) p[i] = anchor[i] + t * axis.dir[i];
        if (!k.contains(p)) continue;
        auto ring = section_ring(k, p, plane_basis, cfg.disk_rays);
        double max_rho = 0.0;
        for (const auto& q : ring) max_rho = std::max(max_rho, std::hypot(q[0], q[1]));
        if (max_rho < 1e-6 * r) continue;
        const auto circ = fit_circle(ring);
        if (!circ) continue;
        rings.push_back({p, std::move(ring), {(*circ)[0], (*circ)[1]}});
    }
    if (static_cast<int>(rings.size()) < 3) return std::nullopt;

    // common in-plane offset of the fitted centers = axis position; their
    // spread measures how collinear the centers are
    std::array<double, 2> mean{0.0, 0.0};
    for (const auto& ring : rings) {
        mean[0] += ring.center[0] / rings.size();
        mean[1] += ring.center[1] / rings.size();
    }
    RotationalEvidence ev{axis, Vec(k.n), 0.0, 0.0, static_cast<int>(rings.size())};
    for (int i = 0; i < k.n; ++i)
        ev.axis_point[i] =
            anchor[i] + mean[0] * plane_basis(i, 0) + mean[1] * plane_basis(i, 1);

    for (const auto& ring : rings) {
        ev.max_center_offset = std::max(
            ev.max_center_offset,
            std::hypot(ring.center[0] - mean[0], ring.center[1] - mean[1]) / r);
        double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
        for (const auto& q : ring.samples) {
            const double rho = std::hypot(q[0] - mean[0], q[1] - mean[1]);
            rmin = std::min(rmin, rho);
            rmax = std::max(rmax, rho);
        }
        if (rmax <= 0.0) return std::nullopt;
        ev.max_disk_residual =
            std::max(ev.max_disk_residual, (rmax - rmin) / (0.5 * (rmax + rmin)));
    }
    if (ev.max_disk_residual > cfg.disk_tol || ev.max_center_offset > cfg.disk_tol)
        return std::nullopt;
    return ev;
}

}  // namespace detail

// Theorem-driven classifier: an ellipsoid verdict needs a thick set of
// reflection directions plus boundary samples on the minimal enclosing
// ellipsoid; a rotational verdict needs a continuum of orthogonal
// reflections whose plane sections are centered disks.
inline ClassifyReport classify_body(const BodyOracle& k, const ClassifyConfig& cfg = {}) {
    require_body(k, "classify_body");
    ClassifyReport rep;

    DirectionScanOptions dso;
    dso.threads = cfg.threads;
    rep.dir_scan = direction_scan(k, cfg.dir_samples, cfg.threshold, cfg.seed, dso);

    const auto cloud = boundary_cloud(k, cfg.mvee_points, cfg.seed + 1, 1e-9, cfg.threads);
    rep.mvee_fit = mvee(cloud, cfg.mvee_eps);
    const auto probe = boundary_cloud(k, 500, cfg.seed + 2, 1e-9, cfg.threads);
    const Ellipsoid& fitted = rep.mvee_fit->ellipsoid;
    double worst = 0.0;
    Vec diff(k.n);
    for (const Vec& p : probe) {
        for (int i = 0; i < k.n; ++i) diff[i] = p[i] - fitted.center()[i];
        worst = std::max(worst, std::abs(dot(diff, mat_vec(fitted.form(), diff)) - 1.0));
    }
    rep.mvee_boundary_residual = worst;

    if (rep.dir_scan.thick_estimate >= cfg.thick_min && worst <= cfg.mvee_fit_tol) {
        rep.verdict = "ellipsoid";
        return rep;
    }

    OrthoScanOptions oso;
    oso.threads = cfg.threads;
    rep.ortho = orthogonal_reflection_scan(k, cfg.ortho_samples, cfg.threshold, cfg.seed + 3, oso);

    if (rep.ortho->nonfinite && rep.ortho->accepted_points.size() >= 2) {
        // the accepted continuum spans the rotation 2-plane; its orthogonal
        // complement is the candidate axis flat
        Mat moment(k.n, k.n);
        for (const ProjLine& l : rep.ortho->accepted_points)
            for (int a = 0; a < k.n; ++a)
                for (int b = 0; b < k.n; ++b) moment(a, b) += l.dir[a] * l.dir[b];
        const EigenDecomposition d = sym_eigen(moment);
        Mat plane_basis(k.n, 2);  // two largest moments: the rotation plane
        plane_basis.set_col(0, d.vectors.col(k.n - 1));
        plane_basis.set_col(1, d.vectors.col(k.n - 2));
        if (k.n == 3) {
            ProjLine axis(d.vectors.col(0));
            if (auto ev = detail::rotational_check(k, axis, fitted.center(), plane_basis, cfg)) {
                rep.rotational = ev;
                rep.verdict = "rotational";
                return rep;
            }
        } else {
            // axis flat spanned by the n-2 smallest moments; check sections
            // along each flat basis direction
            bool all_ok = true;
            RotationalEvidence merged{ProjLine(d.vectors.col(0)), fitted.center(), 0.0, 0.0, 0};
            for (int a = 0; a < k.n - 2 && all_ok; ++a) {
                ProjLine axis(d.vectors.col(a));
                auto ev = detail::rotational_check(k, axis, fitted.center(), plane_basis, cfg);
                if (!ev) {
                    all_ok = false;
                } else {
                    merged.max_disk_residual =
                        std::max(merged.max_disk_residual, ev->max_disk_residual);
                    merged.max_center_offset =
                        std::max(merged.max_center_offset, ev->max_center_offset);
                    merged.sections += ev->sections;
                }
            }
            if (all_ok) {
                rep.rotational = merged;
                rep.verdict = "rotational";
                return rep;
            }
        }
    }

    rep.verdict = "other";
    return rep;
}

}  // namespace reflecta
