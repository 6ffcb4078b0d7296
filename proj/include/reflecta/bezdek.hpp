#pragma once

// Bezdek / strong-Bezdek plane classification for 3-dimensional bodies.
// A plane is Bezdek when its section admits an orthogonal (mirror-line)
// reflection; strong-Bezdek when that in-plane reflection extends to a
// reflection of the whole body, i.e. the plane is a ground plane of a body
// reflection.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "reflecta/body.hpp"

namespace reflecta {

struct AffinePlane {
    Vec normal;          // unit
    double offset = 0.0;  // {x : normal . x = offset}

    AffinePlane(Vec n, double b) : normal(std::move(n)), offset(b) {
        const double m = norm(normal);
        if (m == 0.0) throw ContractViolation("AffinePlane: zero normal");
        for (double& x : normal) x /= m;
        offset /= m;
    }
};

struct PlanarSection {
    AffinePlane plane;
    Vec origin;   // 3D ray-shooting center inside the section
    Mat basis;    // 3 x 2 orthonormal in-plane basis
    std::vector<std::array<double, 2>> boundary;  // rays at equal angles from origin
    std::array<double, 2> centroid{0.0, 0.0};
    double mean_radius = 0.0;

    Vec to3d(std::array<double, 2> p) const {
        Vec x = origin;
        for (int i = 0; i < 3; ++i) x[i] += p[0] * basis(i, 0) + p[1] * basis(i, 1);
        return x;
    }
};

// ---------------------------------------------------------------------------
// Section boundary extraction

namespace detail {

// Radial distance to the section boundary from `origin` along the in-plane
// angle `a`.
inline double section_ray(const BodyOracle& k, const Vec& origin, const Mat& basis, double a,
                          double tol) {
    const double r = k.bounding_radius;
    const double ca = std::cos(a), sa = std::sin(a);
    Vec x(3);
    double lo = 0.0, hi = 3.5 * r;
    while (hi - lo > tol * r) {
        const double mid = 0.5 * (lo + hi);
        for (int i = 0; i < 3; ++i)
            x[i] = origin[i] + mid * (ca * basis(i, 0) + sa * basis(i, 1));
        (k.contains(x) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Samples m boundary points of K cap plane by 2D ray shooting; the interior
// point of the section is found by probing and one recentering pass.
// Returns nothing when the plane misses K or meets it in (numerically) a
// point.
inline std::optional<PlanarSection> section_boundary(const BodyOracle& k,
                                                     const AffinePlane& plane, int m = 64,
                                                     double tol = kDefaultBisectTol) {
    require_body(k, "section_boundary");
    if (k.n != 3) throw ContractViolation("section_boundary: body must be 3-dimensional");
    if (plane.normal.size() != 3)
        throw ContractViolation("section_boundary: plane normal must be 3-dimensional");
    if (m < 64) throw ContractViolation("section_boundary: need at least 64 samples");

    const double r = k.bounding_radius;
    const Mat basis = hyperplane_basis(plane.normal);

    // probe for a point of K inside the plane, starting at the projection of
    // the body's interior point
    Vec p0(3);
    const double shift = plane.offset - dot(plane.normal, k.interior_point);
    for (int i = 0; i < 3; ++i) p0[i] = k.interior_point[i] + shift * plane.normal[i];

    Vec inside;
    if (k.contains(p0)) {
        inside = p0;
    } else {
        bool found = false;
        Vec probe(3);
        for (int ring = 1; ring <= 24 && !found; ++ring) {
            const double rad = 1.5 * r * ring / 24.0;
            for (int j = 0; j < 16 && !found; ++j) {
                const double a = 2.0 * M_PI * j / 16.0;
                for (int i = 0; i < 3; ++i)
                    probe[i] = p0[i] + rad * (std::cos(a) * basis(i, 0) + std::sin(a) * basis(i, 1));
                if (k.contains(probe)) {
                    inside = probe;
                    found = true;
                }
            }
        }
        if (!found) return std::nullopt;
    }

    // first pass to locate the section centroid, then resample from it
    Vec origin = inside;
    {
        constexpr int pre = 32;
        double cx = 0.0, cy = 0.0, rmax = 0.0;
        for (int j = 0; j < pre; ++j) {
            const double a = 2.0 * M_PI * j / pre;
            const double rho = detail::section_ray(k, origin, basis, a, tol);
            cx += rho * std::cos(a) / pre;
            cy += rho * std::sin(a) / pre;
            rmax = std::max(rmax, rho);
        }
        if (rmax < 1e-6 * r) return std::nullopt;  // point-like section
        for (int i = 0; i < 3; ++i) origin[i] += cx * basis(i, 0) + cy * basis(i, 1);
        if (!k.contains(origin)) origin = inside;  // keep the known interior point
    }

    PlanarSection s{plane, origin, basis, {}, {0.0, 0.0}, 0.0};
    s.boundary.resize(m);
    double mean_rho = 0.0;
    for (int j = 0; j < m; ++j) {
        const double a = 2.0 * M_PI * j / m;
        const double rho = detail::section_ray(k, origin, basis, a, tol);
        s.boundary[j] = {rho * std::cos(a), rho * std::sin(a)};
        s.centroid[0] += rho * std::cos(a) / m;
        s.centroid[1] += rho * std::sin(a) / m;
        mean_rho += rho / m;
    }
    if (mean_rho < 1e-6 * r) return std::nullopt;
    s.mean_radius = mean_rho;
    return s;
}

// ---------------------------------------------------------------------------
// In-plane symmetry axes

struct SymmetryAxis {
    double angle = 0.0;                    // mirror-line direction in [0, pi)
    std::array<double, 2> point{0.0, 0.0};  // chord-midpoint center on the line
    double residual = 0.0;                  // RMS, in units of bounding_radius
};

struct SectionSymmetry {
    std::vector<SymmetryAxis> axes;
    bool degenerate_circle = false;  // all directions symmetric (disk)
};

struct SymmetryOptions {
    int grid_angles = 360;
    int chord_offsets = 17;
    int max_basins = 8;
    double circle_tol = 1e-2;    // radius spread flagging a disk
    double refine_tol = 1e-8;    // golden-section window, radians
    double bisect_tol = kDefaultBisectTol;
};

namespace detail {

// Mirror-line fit for mirror angle phi: chords parallel to the reflection
// direction v = phi + pi/2, least-squares line through their midpoints in
// the (w = line direction, v) frame.  Returns {intercept c, slope g} of the
// midpoint line v = c + g * w, or nothing when too few chords cross.
inline std::optional<std::array<double, 2>> fit_mirror_line_2d(
    const std::vector<std::array<double, 2>>& poly, double phi, int offsets) {
    const double wx = std::cos(phi), wy = std::sin(phi);
    const int m = static_cast<int>(poly.size());

    double smin = 1e300, smax = -1e300;
    for (const auto& p : poly) {
        const double s = p[0] * wx + p[1] * wy;
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    std::vector<std::array<double, 2>> mids;  // (s, t_mid)
    for (int j = 0; j < offsets; ++j) {
        const double s = smin + (smax - smin) * (j + 1.0) / (offsets + 1.0);
        double t_sum = 0.0;
        int hits = 0;
        for (int i = 0; i < m; ++i) {
            const auto& p = poly[i];
            const auto& q = poly[(i + 1) % m];
            const double sp = p[0] * wx + p[1] * wy - s;
            const double sq = q[0] * wx + q[1] * wy - s;
            if ((sp <= 0.0 && sq > 0.0) || (sp > 0.0 && sq <= 0.0)) {
                const double f = sp / (sp - sq);
                const double x = p[0] + f * (q[0] - p[0]);
                const double y = p[1] + f * (q[1] - p[1]);
                t_sum += -x * wy + y * wx;  // v-coordinate
                ++hits;
            }
        }
        if (hits == 2) mids.push_back({s, 0.5 * t_sum});
    }
    if (mids.size() < 3) return std::nullopt;

    double ms = 0.0, mt = 0.0;
    for (const auto& p : mids) {
        ms += p[0];
        mt += p[1];
    }
    ms /= mids.size();
    mt /= mids.size();
    double sss = 0.0, sst = 0.0;
    for (const auto& p : mids) {
        sss += (p[0] - ms) * (p[0] - ms);
        sst += (p[0] - ms) * (p[1] - mt);
    }
    const double slope = sss > 0.0 ? sst / sss : 0.0;
    return std::array<double, 2>{mt - slope * ms, slope};
}

// Reflects p across the line {v = c + g w} in the (w, v) frame of angle phi.
inline std::array<double, 2> reflect_across_line_2d(std::array<double, 2> p, double phi,
                                                    double c, double g) {
    const double wx = std::cos(phi), wy = std::sin(phi);
    const double s = p[0] * wx + p[1] * wy;
    const double t = -p[0] * wy + p[1] * wx;
    // orthogonal reflection across the (possibly tilted) fitted line
    const double denom = 1.0 + g * g;
    const double t0 = c + g * s;
    const double dt = t - t0;
    const double sr = s + 2.0 * g * dt / denom;
    const double tr = t - 2.0 * dt / denom;
    return {sr * wx - tr * wy, sr * wy + tr * wx};
}

inline double point_to_polygon(const std::vector<std::array<double, 2>>& poly,
                               std::array<double, 2> p) {
    const int m = static_cast<int>(poly.size());
    double best = 1e300;
    for (int i = 0; i < m; ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % m];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double px = p[0] - a[0], py = p[1] - a[1];
        const double e2 = ex * ex + ey * ey;
        double f = e2 > 0.0 ? (px * ex + py * ey) / e2 : 0.0;
        f = std::clamp(f, 0.0, 1.0);
        const double dx = px - f * ex, dy = py - f * ey;
        best = std::min(best, dx * dx + dy * dy);
    }
    return std::sqrt(best);
}

// RMS symmetry defect of the polygon under reflection at mirror angle phi,
// measured against the polygon itself (cheap grid stage).
inline double polygon_symmetry_residual(const std::vector<std::array<double, 2>>& poly,
                                        double phi, int offsets) {
    const auto line = fit_mirror_line_2d(poly, phi, offsets);
    if (!line) return 1e300;
    double ss = 0.0;
    for (const auto& p : poly) {
        const double d = point_to_polygon(poly, reflect_across_line_2d(p, phi, (*line)[0], (*line)[1]));
        ss += d * d;
    }
    return std::sqrt(ss / poly.size());
}

// Mirror-line fit against the oracle: chords of the true section parallel to
// the reflection direction, endpoints by in-plane bisection.  The polygon
// brackets each chord, the oracle pins it.
inline std::optional<std::array<double, 2>> fit_mirror_line_oracle(
    const BodyOracle& k, const PlanarSection& s, double phi, int offsets, double tol) {
    const double wx = std::cos(phi), wy = std::sin(phi);
    const double pad = 0.25 * s.mean_radius + 0.05 * k.bounding_radius;

    double smin = 1e300, smax = -1e300;
    for (const auto& p : s.boundary) {
        const double off = p[0] * wx + p[1] * wy;
        smin = std::min(smin, off);
        smax = std::max(smax, off);
    }

    Vec x(3);
    const auto inside = [&](double off, double t) {
        const double px = off * wx - t * wy;
        const double py = off * wy + t * wx;
        for (int i = 0; i < 3; ++i)
            x[i] = s.origin[i] + px * s.basis(i, 0) + py * s.basis(i, 1);
        return k.contains(x);
    };

    const int m = static_cast<int>(s.boundary.size());
    std::vector<std::array<double, 2>> mids;
    for (int j = 0; j < offsets; ++j) {
        const double off = smin + (smax - smin) * (j + 1.0) / (offsets + 1.0);
        // bracket the chord with the polygon
        double t_lo = 1e300, t_hi = -1e300;
        for (int i = 0; i < m; ++i) {
            const auto& p = s.boundary[i];
            const auto& q = s.boundary[(i + 1) % m];
            const double sp = p[0] * wx + p[1] * wy - off;
            const double sq = q[0] * wx + q[1] * wy - off;
            if ((sp <= 0.0 && sq > 0.0) || (sp > 0.0 && sq <= 0.0)) {
                const double f = sp / (sp - sq);
                const double t = -(p[0] + f * (q[0] - p[0])) * wy + (p[1] + f * (q[1] - p[1])) * wx;
                t_lo = std::min(t_lo, t);
                t_hi = std::max(t_hi, t);
            }
        }
        if (t_hi < t_lo) continue;
        const double t_in = 0.5 * (t_lo + t_hi);
        if (!inside(off, t_in)) continue;
        double lo = t_in, olo = t_lo - pad, hi = t_in, ohi = t_hi + pad;
        const double eps = tol * k.bounding_radius;
        while (lo - olo > eps) {
            const double mid = 0.5 * (lo + olo);
            (inside(off, mid) ? lo : olo) = mid;
        }
        while (ohi - hi > eps) {
            const double mid = 0.5 * (hi + ohi);
            (inside(off, mid) ? hi : ohi) = mid;
        }
        mids.push_back({off, 0.25 * (lo + olo) + 0.25 * (hi + ohi)});
    }
    if (mids.size() < 3) return std::nullopt;

    double ms = 0.0, mt = 0.0;
    for (const auto& p : mids) {
        ms += p[0];
        mt += p[1];
    }
    ms /= mids.size();
    mt /= mids.size();
    double sss = 0.0, sst = 0.0;
    for (const auto& p : mids) {
        sss += (p[0] - ms) * (p[0] - ms);
        sst += (p[0] - ms) * (p[1] - mt);
    }
    const double slope = sss > 0.0 ? sst / sss : 0.0;
    return std::array<double, 2>{mt - slope * ms, slope};
}

// RMS symmetry defect measured against the oracle boundary (radial bisection
// in the section plane); accurate far below the polygon secant error.
inline double oracle_symmetry_residual(const BodyOracle& k, const PlanarSection& s, double phi,
                                       int offsets, double tol) {
    const auto line = fit_mirror_line_oracle(k, s, phi, offsets, tol);
    if (!line) return 1e300;
    double ss = 0.0;
    for (const auto& p : s.boundary) {
        const auto q = reflect_across_line_2d(p, phi, (*line)[0], (*line)[1]);
        const double qn = std::hypot(q[0], q[1]);
        if (qn < 1e-12) {
            ss += s.mean_radius * s.mean_radius;
            continue;
        }
        const double rho = section_ray(k, s.origin, s.basis, std::atan2(q[1], q[0]), tol);
        ss += (qn - rho) * (qn - rho);
    }
    return std::sqrt(ss / s.boundary.size());
}

template <typename F>
inline std::pair<double, double> golden_minimize(F&& f, double a, double b, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

}  // namespace detail

// Finds the mirror lines of a planar section: a 360-angle grid of the
// polygon symmetry residual locates the basins, golden-section refinement
// against the oracle boundary pins the axes.  When `oracle` is null the
// polygon metric is used throughout (coarser floor).
inline SectionSymmetry section_symmetry_axes(const PlanarSection& s, double threshold,
                                             const BodyOracle* oracle = nullptr,
                                             const SymmetryOptions& opt = {}) {
    if (s.boundary.size() < 8) throw ContractViolation("section_symmetry_axes: empty section");
    SectionSymmetry out;
    const int g = opt.grid_angles;

    // disk detection: radii from the centroid nearly constant
    {
        double rmin = 1e300, rmax = 0.0;
        for (const auto& p : s.boundary) {
            const double rho = std::hypot(p[0] - s.centroid[0], p[1] - s.centroid[1]);
            rmin = std::min(rmin, rho);
            rmax = std::max(rmax, rho);
        }
        if (rmax > 0.0 && (rmax - rmin) / (0.5 * (rmax + rmin)) <= opt.circle_tol)
            out.degenerate_circle = true;
    }

    std::vector<double> curve(g);
    for (int i = 0; i < g; ++i)
        curve[i] = detail::polygon_symmetry_residual(s.boundary, M_PI * i / g, opt.chord_offsets);

    std::vector<std::pair<double, double>> starts;  // (score, angle)
    for (int i = 0; i < g; ++i) {
        const double prev = curve[(i + g - 1) % g], next = curve[(i + 1) % g];
        if (curve[i] <= prev && curve[i] <= next) starts.push_back({curve[i], M_PI * i / g});
    }
    std::stable_sort(starts.begin(), starts.end());
    if (static_cast<int>(starts.size()) > opt.max_basins) starts.resize(opt.max_basins);
    if (out.degenerate_circle)
        for (int j = 0; j < 4; ++j) starts.push_back({0.0, M_PI * j / 4.0});

    const double bodyR = oracle ? oracle->bounding_radius : 1.0;
    const auto objective = [&](double phi) {
        return oracle ? detail::oracle_symmetry_residual(*oracle, s, phi, opt.chord_offsets,
                                                         opt.bisect_tol)
                      : detail::polygon_symmetry_residual(s.boundary, phi, opt.chord_offsets);
    };

    const double window = out.degenerate_circle ? M_PI / 8.0 : 2.0 * M_PI / g;
    for (const auto& [score, a0] : starts) {
        auto [phi, res] = detail::golden_minimize(objective, a0 - window, a0 + window,
                                                  opt.refine_tol);
        phi = std::fmod(std::fmod(phi, M_PI) + M_PI, M_PI);
        const double scaled = res / bodyR;
        if (scaled > threshold) continue;
        bool dup = false;
        for (auto& ax : out.axes) {
            double d = std::abs(ax.angle - phi);
            d = std::min(d, M_PI - d);
            if (d < 1e-3) {
                dup = true;
                if (scaled < ax.residual) {
                    ax.angle = phi;
                    ax.residual = scaled;
                }
            }
        }
        if (dup) continue;
        SymmetryAxis ax;
        ax.angle = phi;
        ax.residual = scaled;
        if (const auto line = detail::fit_mirror_line_2d(s.boundary, phi, opt.chord_offsets)) {
            // representative point of the fitted mirror line at w = 0
            const double c = (*line)[0];
            ax.point = {-c * std::sin(phi), c * std::cos(phi)};
        }
        out.axes.push_back(ax);
    }
    std::stable_sort(out.axes.begin(), out.axes.end(),
                     [](const SymmetryAxis& a, const SymmetryAxis& b) {
                         return a.residual < b.residual;
                     });
    return out;
}

// ---------------------------------------------------------------------------
// Plane classification

struct BezdekWitness {
    ProjLine direction;  // direction of the body reflection
    MirrorFit fit;
};

struct BezdekReport {
    AffinePlane plane;
    std::vector<SymmetryAxis> section_axes;
    bool bezdek = false;
    bool strong_bezdek = false;
    bool vacuous = false;           // empty or point section
    bool degenerate_circle = false;
    std::optional<BezdekWitness> witness;
};

struct BezdekOptions {
    double threshold = kDefaultThreshold;
    double angle_tol = 1e-3;   // mirror-trace vs section-mirror-line angle
    double offset_tol = 1e-2;  // mirror-plane offset mismatch, units of R
    int section_samples = 64;
    SymmetryOptions symmetry;
    ReflectionOptions reflection;
};

// Bezdek: the section admits a mirror line.  Strong-Bezdek: some mirror
// line's reflection direction, lifted to R^3, is the direction of a
// reflection of K whose fitted mirror meets the plane in that same line —
// the plane is then a ground plane of the body reflection.
inline BezdekReport classify_plane(const BodyOracle& k, const AffinePlane& plane,
                                   const BezdekOptions& opt = {}) {
    require_body(k, "classify_plane");
    if (k.n != 3) throw ContractViolation("classify_plane: body must be 3-dimensional");

    BezdekReport rep{plane, {}, false, false, false, false, std::nullopt};
    const auto section = section_boundary(k, plane, opt.section_samples, opt.symmetry.bisect_tol);
    if (!section) {
        rep.vacuous = true;
        rep.bezdek = true;  // non-intersecting planes are vacuously Bezdek
        return rep;
    }

    const SectionSymmetry sym = section_symmetry_axes(*section, opt.threshold, &k, opt.symmetry);
    rep.section_axes = sym.axes;
    rep.degenerate_circle = sym.degenerate_circle;
    rep.bezdek = !sym.axes.empty();

    for (const SymmetryAxis& ax : sym.axes) {
        // in-plane reflection direction v = axis normal within the plane
        const double vx = -std::sin(ax.angle), vy = std::cos(ax.angle);
        Vec dir3(3);
        for (int i = 0; i < 3; ++i) dir3[i] = vx * section->basis(i, 0) + vy * section->basis(i, 1);
        ProjLine l(std::move(dir3));

        ReflectionOptions ro = opt.reflection;
        const ReflectionTest t = has_reflection(k, l, opt.threshold, ro);
        if (!t.accepted) continue;

        // trace of the fitted mirror inside the plane must be the section's
        // mirror line: compare directions and the offset at the axis point
        Vec trace(3);
        trace[0] = t.fit.normal[1] * plane.normal[2] - t.fit.normal[2] * plane.normal[1];
        trace[1] = t.fit.normal[2] * plane.normal[0] - t.fit.normal[0] * plane.normal[2];
        trace[2] = t.fit.normal[0] * plane.normal[1] - t.fit.normal[1] * plane.normal[0];
        if (norm(trace) < 1e-9) continue;  // mirror parallel to the plane

        Vec axis3(3);
        const double wx = std::cos(ax.angle), wy = std::sin(ax.angle);
        for (int i = 0; i < 3; ++i) axis3[i] = wx * section->basis(i, 0) + wy * section->basis(i, 1);
        const double cosang = std::min(1.0, std::abs(dot(normalized(trace), axis3)));
        if (std::acos(cosang) > opt.angle_tol) continue;

        const Vec p_axis = section->to3d(ax.point);
        if (std::abs(dot(t.fit.normal, p_axis) - t.fit.offset) / k.bounding_radius >
            opt.offset_tol)
            continue;

        rep.strong_bezdek = true;
        rep.witness = BezdekWitness{l, t.fit};
        break;
    }
    if (rep.strong_bezdek) rep.bezdek = true;
    return rep;
}

// ---------------------------------------------------------------------------
// Plane scan

struct BezdekScanReport {
    int samples = 0;
    double fraction_bezdek = 0.0;
    double fraction_strong = 0.0;
    double threshold = 0.0;
    std::uint64_t seed = 0;
    int vacuous_count = 0;
    bool include_vacuous = false;
    std::vector<BezdekReport> rows;
};

struct BezdekScanOptions {
    BezdekOptions plane;
    bool include_vacuous = false;  // count vacuous planes in the denominators
    int threads = 1;
};

// Uniform random planes through points uniform in the bounding ball;
// fractions are over planes with a nonempty 2-dimensional section unless
// include_vacuous is set.
inline BezdekScanReport bezdek_scan(const BodyOracle& k, int samples, std::uint64_t seed,
                                    const BezdekScanOptions& opt = {}) {
    require_body(k, "bezdek_scan");
    if (k.n != 3) throw ContractViolation("bezdek_scan: body must be 3-dimensional");
    if (samples < 1) throw ContractViolation("bezdek_scan: samples must be >= 1");

    BezdekScanReport rep;
    rep.samples = samples;
    rep.threshold = opt.plane.threshold;
    rep.seed = seed;
    rep.include_vacuous = opt.include_vacuous;

    std::vector<std::optional<BezdekReport>> rows(samples);
    parallel_for(samples, opt.threads, [&](int i) {
        std::mt19937_64 g = rng_for(seed, static_cast<std::uint64_t>(i));
        const Vec normal = random_unit_vector(g, 3);
        const Vec point = add(k.interior_point, random_in_ball(g, 3, k.bounding_radius));
        AffinePlane plane(normal, dot(normal, point));
        BezdekOptions po = opt.plane;
        po.reflection.seed = splitmix64(seed ^ 0xbe2de4ULL ^ static_cast<std::uint64_t>(i));
        rows[i] = classify_plane(k, plane, po);
    });

    int denom = 0, nb = 0, ns = 0;
    for (auto& r : rows) {
        if (r->vacuous) ++rep.vacuous_count;
        const bool counted = !r->vacuous || opt.include_vacuous;
        if (counted) {
            ++denom;
            if (r->bezdek) ++nb;
            if (r->strong_bezdek) ++ns;
        }
        rep.rows.push_back(std::move(*r));
    }
    if (denom > 0) {
        rep.fraction_bezdek = static_cast<double>(nb) / denom;
        rep.fraction_strong = static_cast<double>(ns) / denom;
    }
    return rep;
}

}  // namespace reflecta
