#pragma once

// Hyperplane sections of a centered ellipsoid: section forms and axes, the
// fiber of the ground map (axes of the section that are not axes of the
// ellipsoid), genericity predicates for lines and hyperplanes, a randomized
// covering-cardinality scan, and sheet tracking along hyperplane paths.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "reflecta/quadric.hpp"
#include "reflecta/rng.hpp"

namespace reflecta {

// ---------------------------------------------------------------------------
// Sections

struct SectionEllipsoid {
    ProjHyperplane carrier;
    Mat basis;  // n x (n-1), deterministic orthonormal basis of the carrier
    Mat form;   // B^T A B, positive definite

    int dim() const { return form.rows(); }

    Vec embed(std::span<const double> y) const { return mat_vec(basis, y); }

    ProjLine lift_line(std::span<const double> y) const { return ProjLine(embed(y)); }
};

inline SectionEllipsoid section_form(const Ellipsoid& e, const ProjHyperplane& g) {
    require_centered(e, "section_form");
    require_dim_match(e, g.normal, "section_form");
    Mat b = hyperplane_basis(g.normal);
    Mat f = restrict_form(e.form(), b);
    return SectionEllipsoid{g, std::move(b), std::move(f)};
}

struct SectionAxes {
    // in-plane axis lines of the section with their chord lengths, sorted by
    // decreasing length
    std::vector<std::pair<ProjLine, double>> axes;
    Vec section_eigenvalues;  // ascending, matching axes order
    bool degenerate = false;  // some eigenvalue group is repeated
};

inline SectionAxes section_axes(const Ellipsoid& e, const ProjHyperplane& g,
                                double degeneracy_tol = kDefaultGroupingTol) {
    const SectionEllipsoid s = section_form(e, g);
    const EigenDecomposition d = sym_eigen(s.form);
    SectionAxes out;
    out.section_eigenvalues = d.values;
    const int m = s.dim();
    out.axes.reserve(m);
    for (int i = 0; i < m; ++i) {
        out.axes.emplace_back(s.lift_line(d.vectors.col(i)), 2.0 / std::sqrt(d.values[i]));
        if (i > 0 && d.values[i] - d.values[i - 1] <= degeneracy_tol * d.values[i - 1])
            out.degenerate = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Genericity

struct LineGenericity {
    double min_projection = 0.0;      // min over i of ||proj_{V_i}(dir)||
    double min_length_gap_rel = 0.0;  // min over i of |lambda(l) - lambda_i| / lambda_i
    double margin() const { return std::min(min_projection, min_length_gap_rel); }
};

inline LineGenericity line_genericity(const Ellipsoid& e, const ProjLine& l,
                                      const SpectrumPartition& p) {
    LineGenericity g;
    g.min_projection = 2.0;
    g.min_length_gap_rel = 2.0;
    const double len = chord_length(e, l);
    for (int i = 0; i < p.k(); ++i) {
        g.min_projection = std::min(g.min_projection, p.projection_norm(i, l.dir));
        const double li = p.groups[i].binormal_length;
        g.min_length_gap_rel = std::min(g.min_length_gap_rel, std::abs(len - li) / li);
    }
    return g;
}

// Generic line: not contained in any V_i^perp and its length differs from
// every binormal length.
inline bool is_generic_line(const Ellipsoid& e, const ProjLine& l, const SpectrumPartition& p,
                            double tol) {
    if (p.k() < 2) throw ContractViolation("is_generic_line: requires k >= 2");
    const LineGenericity g = line_genericity(e, l, p);
    return g.min_projection > tol && g.min_length_gap_rel > tol;
}

// min over i of ||proj_{V_i}(normal)||; positive iff no V_i lies inside the
// hyperplane.
inline double hyperplane_genericity(const ProjHyperplane& g, const SpectrumPartition& p) {
    double m = 2.0;
    for (int i = 0; i < p.k(); ++i) m = std::min(m, p.projection_norm(i, g.normal));
    return m;
}

inline bool is_generic_hyperplane(const Ellipsoid& e, const ProjHyperplane& g,
                                  const SpectrumPartition& p, double tol) {
    if (p.k() < 2) throw ContractViolation("is_generic_hyperplane: requires k >= 2");
    require_centered(e, "is_generic_hyperplane");
    return hyperplane_genericity(g, p) > tol;
}

// ---------------------------------------------------------------------------
// Fibers of the ground map

struct FiberResult {
    ProjHyperplane hyperplane;
    // fiber lines with chord lengths, sorted by decreasing length
    std::vector<std::pair<ProjLine, double>> lines;
    bool generic = false;
    bool degenerate = false;  // repeated section eigenvalue involving a fiber axis
};

struct FiberOptions {
    double binormal_tol = kDefaultBinormalTol;
    double generic_tol = 1e-6;
    double grouping_tol = kDefaultGroupingTol;
};

// gamma^{-1}(Gamma): the axes of the section Gamma cap E that are not axes
// of E.  Size k-1 on generic hyperplanes.
inline FiberResult fiber(const Ellipsoid& e, const SpectrumPartition& p, const ProjHyperplane& g,
                         const FiberOptions& opt = {}) {
    require_centered(e, "fiber");
    if (p.k() < 2)
        throw ContractViolation("fiber: ellipsoid is a sphere, no diagonal lines exist");

    const SectionAxes ax = section_axes(e, g, opt.grouping_tol);
    FiberResult out{g, {}, false, false};
    std::vector<bool> binormal(ax.axes.size());
    for (std::size_t i = 0; i < ax.axes.size(); ++i) {
        binormal[i] = is_binormal(e, ax.axes[i].first, opt.binormal_tol);
        if (!binormal[i]) out.lines.push_back(ax.axes[i]);
    }
    // repeated eigenvalues between binormal axes only come from V_i cap Gamma
    // and are harmless; flag degeneracy when a fiber axis is involved
    for (std::size_t i = 1; i < ax.axes.size(); ++i) {
        if (ax.section_eigenvalues[i] - ax.section_eigenvalues[i - 1] <=
                opt.grouping_tol * ax.section_eigenvalues[i - 1] &&
            (!binormal[i] || !binormal[i - 1]))
            out.degenerate = true;
    }
    out.generic = is_generic_hyperplane(e, g, p, opt.generic_tol);
    return out;
}

inline FiberResult fiber(const Ellipsoid& e, const ProjHyperplane& g,
                         const FiberOptions& opt = {}) {
    return fiber(e, spectrum_partition(e, opt.grouping_tol), g, opt);
}

// ---------------------------------------------------------------------------
// Covering scan

struct CoverSampleRow {
    Vec normal;
    int fiber_size = 0;
    double min_margin = 0.0;
    bool accepted = false;
};

struct CoverScanReport {
    int samples = 0;
    std::map<int, int> histogram;  // fiber size -> count over accepted samples
    int rejected_nongeneric = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<CoverSampleRow> rows;  // per-sample detail for CSV export
};

struct CoverScanOptions {
    double tol = 1e-6;           // genericity tolerance; margin factor 10 on top
    double margin_factor = 10.0;  // accepted samples sit safely inside the generic set
    double grouping_tol = kDefaultGroupingTol;
    int threads = 1;
};

namespace detail {

// Classifies one hyperplane sample.  A sample is accepted when the
// hyperplane genericity, the binormal/diagonal split of the section axes,
// and every fiber line's genericity all clear margin_factor * tol.
inline CoverSampleRow classify_cover_sample(const Ellipsoid& e, const SpectrumPartition& p,
                                            const ProjHyperplane& g,
                                            const CoverScanOptions& opt) {
    const double need = opt.margin_factor * opt.tol;
    CoverSampleRow row;
    row.normal = g.normal;

    double margin = hyperplane_genericity(g, p);
    bool ok = margin >= need;

    const SectionAxes ax = section_axes(e, g, opt.grouping_tol);
    std::vector<bool> binormal(ax.axes.size());
    int fiber_size = 0;
    for (std::size_t i = 0; i < ax.axes.size(); ++i) {
        const double ang = binormal_angle(e, ax.axes[i].first);
        // classification at tol, ambiguous band (tol, margin_factor*tol) rejected
        binormal[i] = ang <= opt.tol;
        if (!binormal[i]) {
            ++fiber_size;
            if (ang < need) ok = false;
            const LineGenericity lg = line_genericity(e, ax.axes[i].first, p);
            margin = std::min(margin, lg.margin());
            if (lg.margin() < need) ok = false;
        }
    }
    // repeated section eigenvalue touching a fiber axis: axes not isolated
    for (std::size_t i = 1; i < ax.axes.size(); ++i) {
        const double gap =
            (ax.section_eigenvalues[i] - ax.section_eigenvalues[i - 1]) /
            ax.section_eigenvalues[i - 1];
        if (gap <= need && (!binormal[i] || !binormal[i - 1])) {
            ok = false;
            margin = std::min(margin, gap);
        }
    }

    row.fiber_size = fiber_size;
    row.min_margin = margin;
    row.accepted = ok;
    return row;
}

}  // namespace detail

// Margin-checked classification of a single hyperplane; accepted rows are
// what cover_scan counts.
inline CoverSampleRow cover_classify(const Ellipsoid& e, const SpectrumPartition& p,
                                     const ProjHyperplane& g, const CoverScanOptions& opt = {}) {
    return detail::classify_cover_sample(e, p, g, opt);
}

// Samples uniform random hyperplanes and histograms the fiber size over
// accepted (safely generic) samples.
inline CoverScanReport cover_scan(const Ellipsoid& e, int samples, std::uint64_t seed,
                                  const CoverScanOptions& opt = {}) {
    require_centered(e, "cover_scan");
    if (samples < 1) throw ContractViolation("cover_scan: samples must be >= 1");
    const SpectrumPartition p = spectrum_partition(e, opt.grouping_tol);
    if (p.k() < 2)
        throw ContractViolation("cover_scan: ellipsoid is a sphere (k = 1), scan refuses to run");

    CoverScanReport rep;
    rep.samples = samples;
    rep.k = p.k();
    rep.seed = seed;
    rep.rows.resize(samples);

    const int n = e.n();
    parallel_for(samples, opt.threads, [&](int i) {
        std::mt19937_64 g = rng_for(seed, static_cast<std::uint64_t>(i));
        const ProjHyperplane hp(random_unit_vector(g, n));
        rep.rows[i] = detail::classify_cover_sample(e, p, hp, opt);
    });

    for (const CoverSampleRow& row : rep.rows) {
        if (row.accepted)
            ++rep.histogram[row.fiber_size];
        else
            ++rep.rejected_nongeneric;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sheet tracking / monodromy

struct MonodromyResult {
    std::vector<ProjHyperplane> loop;  // the input waypoints
    std::vector<int> permutation;      // sheet i at the start ends as sheet permutation[i]
    double max_step_jump = 0.0;
    bool closed = false;
};

struct TrackOptions {
    double tol = 1e-6;            // genericity tolerance for waypoints (margin factor 10)
    double margin_factor = 10.0;
    double binormal_tol = 1e-6;
    double grouping_tol = kDefaultGroupingTol;
    double step_bound = 0.35;     // max projective distance between waypoints
    double ambiguity_factor = 2.0;
    double continuity_threshold = 0.5;  // max allowed per-step sheet movement
    int max_halvings = 8;
};

namespace detail {

inline ProjHyperplane geodesic_midpoint(const ProjHyperplane& a, const ProjHyperplane& b) {
    Vec v = b.normal;
    if (dot(a.normal, b.normal) < 0.0)
        for (double& x : v) x = -x;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += a.normal[i];
    return ProjHyperplane(std::move(v));
}

struct SheetTracker {
    const Ellipsoid& e;
    const SpectrumPartition& p;
    const TrackOptions& opt;
    std::vector<ProjLine> current;  // indexed by sheet id
    double max_jump = 0.0;

    std::vector<std::pair<ProjLine, double>> fiber_at(const ProjHyperplane& g) const {
        FiberOptions fo;
        fo.binormal_tol = opt.binormal_tol;
        fo.generic_tol = opt.tol;
        fo.grouping_tol = opt.grouping_tol;
        auto f = fiber(e, p, g, fo);
        if (!f.generic || f.degenerate)
            throw SheetCollision("track_fiber: fiber degenerate or non-generic along the path");
        return std::move(f.lines);
    }

    // Advances every sheet from the fiber at `from` to the fiber at `to`,
    // splitting the step when the nearest-neighbor matching is ambiguous.
    void advance(const ProjHyperplane& from, const ProjHyperplane& to, int depth) {
        const auto nxt = fiber_at(to);
        if (nxt.size() == current.size()) {
            std::vector<int> match(current.size(), -1);
            std::vector<bool> used(nxt.size(), false);
            bool ok = true;
            double step_max = 0.0;
            for (std::size_t i = 0; i < current.size() && ok; ++i) {
                double d1 = 2.0, d2 = 2.0;
                int best = -1;
                for (std::size_t j = 0; j < nxt.size(); ++j) {
                    const double d = projective_distance(current[i], nxt[j].first);
                    if (d < d1) {
                        d2 = d1;
                        d1 = d;
                        best = static_cast<int>(j);
                    } else if (d < d2) {
                        d2 = d;
                    }
                }
                if (d2 < opt.ambiguity_factor * d1 || used[best]) {
                    ok = false;
                    break;
                }
                if (d1 > opt.continuity_threshold) {
                    ok = false;
                    break;
                }
                match[i] = best;
                used[best] = true;
                step_max = std::max(step_max, d1);
            }
            if (ok) {
                std::vector<ProjLine> next;
                next.reserve(current.size());
                for (std::size_t i = 0; i < current.size(); ++i)
                    next.push_back(nxt[match[i]].first);
                current = std::move(next);
                max_jump = std::max(max_jump, step_max);
                return;
            }
        }
        if (depth >= opt.max_halvings)
            throw SheetCollision(
                "track_fiber: sheet matching ambiguous after maximum step halving");
        const ProjHyperplane mid = geodesic_midpoint(from, to);
        advance(from, mid, depth + 1);
        advance(mid, to, depth + 1);
    }
};

}  // namespace detail

// Tracks the fiber along a path of generic hyperplanes by nearest-neighbor
// sheet matching with automatic step halving.  For a closed path the
// returned permutation is the monodromy of the loop.
inline MonodromyResult track_fiber(const Ellipsoid& e, const std::vector<ProjHyperplane>& path,
                                   const TrackOptions& opt = {}) {
    require_centered(e, "track_fiber");
    if (path.size() < 2) throw ContractViolation("track_fiber: path needs at least 2 waypoints");
    const SpectrumPartition p = spectrum_partition(e, opt.grouping_tol);
    if (p.k() < 2) throw ContractViolation("track_fiber: ellipsoid is a sphere");

    for (std::size_t i = 1; i < path.size(); ++i) {
        if (projective_distance(path[i - 1], path[i]) > opt.step_bound)
            throw StepTooLarge("track_fiber: consecutive waypoints exceed the step bound");
    }
    const double need = opt.margin_factor * opt.tol;
    for (const auto& w : path) {
        if (hyperplane_genericity(w, p) < need)
            throw ContractViolation("track_fiber: waypoint not generic with margin");
    }

    detail::SheetTracker tracker{e, p, opt, {}, 0.0};
    const auto start = tracker.fiber_at(path.front());
    for (const auto& [line, len] : start) tracker.current.push_back(line);

    for (std::size_t i = 1; i < path.size(); ++i)
        tracker.advance(path[i - 1], path[i], 0);

    MonodromyResult res;
    res.loop = path;
    res.max_step_jump = tracker.max_jump;
    res.closed = norm(sub(path.front().normal, path.back().normal)) <= 1e-12;

    // permutation against the length-sorted fiber at the endpoint
    const auto finish = tracker.fiber_at(path.back());
    res.permutation.assign(tracker.current.size(), -1);
    for (std::size_t i = 0; i < tracker.current.size(); ++i) {
        double best = 2.0;
        int arg = -1;
        for (std::size_t j = 0; j < finish.size(); ++j) {
            const double d = projective_distance(tracker.current[i], finish[j].first);
            if (d < best) {
                best = d;
                arg = static_cast<int>(j);
            }
        }
        res.permutation[i] = arg;
    }
    return res;
}

// Waypoints of a circular loop of radius r around the hyperplane with the
// given normal, traced in the first two chart coordinates.
inline std::vector<ProjHyperplane> chart_loop(const ProjHyperplane& base, double radius,
                                              int steps) {
    if (steps < 3) throw ContractViolation("chart_loop: needs at least 3 steps");
    const Mat b = hyperplane_basis(base.normal);
    std::vector<ProjHyperplane> path;
    path.reserve(steps + 1);
    for (int s = 0; s <= steps; ++s) {
        const double t = 2.0 * M_PI * s / steps;
        Vec v = base.normal;
        for (int i = 0; i < b.rows(); ++i)
            v[i] += radius * (std::cos(t) * b(i, 0) + std::sin(t) * b(i, 1));
        path.emplace_back(std::move(v));
    }
    path.back() = path.front();  // close exactly
    return path;
}

}  // namespace reflecta
