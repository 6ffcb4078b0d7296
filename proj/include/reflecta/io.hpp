#pragma once

// JSON schemas for ellipsoids, body specs and reports, plus CSV export of
// per-sample scan rows.  Report field names follow the type definitions;
// CSV numbers are written with 17 significant digits, locale independent.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reflecta/bezdek.hpp"
#include "reflecta/bodies.hpp"
#include "reflecta/section.hpp"

namespace reflecta {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Primitives

inline json vec_to_json(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

inline json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Vec vec_from_json(const json& a, const char* what) {
    if (!a.is_array() || a.empty())
        throw ContractViolation(std::string(what) + ": expected a non-empty array");
    Vec v;
    v.reserve(a.size());
    for (const auto& x : a) {
        if (!x.is_number()) throw ContractViolation(std::string(what) + ": expected numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline Mat mat_from_json(const json& a, const char* what) {
    if (!a.is_array() || a.empty())
        throw ContractViolation(std::string(what) + ": expected an array of rows");
    const int rows = static_cast<int>(a.size());
    const int cols = static_cast<int>(a[0].size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const Vec row = vec_from_json(a[i], what);
        if (static_cast<int>(row.size()) != cols)
            throw ContractViolation(std::string(what) + ": ragged matrix");
        for (int j = 0; j < cols; ++j) m(i, j) = row[j];
    }
    return m;
}

// ---------------------------------------------------------------------------
// Ellipsoid schema: {"n":, "center":, "form":} or {"semi_axes":, "rotation":}

inline Ellipsoid ellipsoid_from_json(const json& j) {
    if (j.contains("semi_axes")) {
        const Vec axes = vec_from_json(j.at("semi_axes"), "semi_axes");
        const int n = static_cast<int>(axes.size());
        for (double a : axes)
            if (a <= 0.0) throw ContractViolation("semi_axes must be positive");
        Mat rot = Mat::identity(n);
        if (j.contains("rotation")) {
            rot = mat_from_json(j.at("rotation"), "rotation");
            if (rot.rows() != n || rot.cols() != n)
                throw ContractViolation("rotation: dimension mismatch");
            const Mat qtq = matmul(transpose(rot), rot);
            if (max_abs_diff(qtq, Mat::identity(n)) > 1e-10)
                throw ContractViolation("rotation: matrix is not orthogonal within 1e-10");
        }
        // A = Q diag(1/a_i^2) Q^T; columns of Q are the semi-axis directions
        Mat d(n, n);
        for (int i = 0; i < n; ++i) d(i, i) = 1.0 / (axes[i] * axes[i]);
        Mat form = matmul(rot, matmul(d, transpose(rot)));
        for (int i = 0; i < n; ++i)
            for (int k = i + 1; k < n; ++k) {
                const double s = 0.5 * (form(i, k) + form(k, i));
                form(i, k) = form(k, i) = s;
            }
        Vec center(n, 0.0);
        if (j.contains("center")) center = vec_from_json(j.at("center"), "center");
        return Ellipsoid(std::move(center), std::move(form));
    }

    const Mat form = mat_from_json(j.at("form"), "form");
    const int n = form.rows();
    if (j.contains("n") && j.at("n").get<int>() != n)
        throw ContractViolation("ellipsoid: 'n' does not match the form dimension");
    Vec center(n, 0.0);
    if (j.contains("center")) center = vec_from_json(j.at("center"), "center");
    return Ellipsoid(std::move(center), form);
}

inline json ellipsoid_to_json(const Ellipsoid& e) {
    json j;
    j["n"] = e.n();
    j["center"] = vec_to_json(e.center());
    j["form"] = mat_to_json(e.form());
    return j;
}

// ---------------------------------------------------------------------------
// Body spec schema

inline BodyOracle body_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ellipsoid") return make_ellipsoid_body(ellipsoid_from_json(j));
    if (kind == "revolution") {
        const auto& prof = j.at("profile");
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : prof) {
            if (!p.is_array() || p.size() != 2)
                throw ContractViolation("revolution profile: expected [z, radius] pairs");
            pts.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        return make_revolution_body(std::move(pts));
    }
    if (kind == "superellipsoid")
        return make_superellipsoid(vec_from_json(j.at("semi_axes"), "semi_axes"),
                                   j.at("exponent").get<double>());
    if (kind == "box") return make_box(vec_from_json(j.at("semi_sides"), "semi_sides"));
    if (kind == "perturbed") {
        const Ellipsoid base = ellipsoid_from_json(j);
        std::vector<Bump> bumps;
        if (j.contains("bumps")) {
            for (const auto& b : j.at("bumps"))
                bumps.push_back(
                    {vec_from_json(b.at("dir"), "bump dir"), b.at("amplitude").get<double>()});
        } else {
            const int count = j.value("bump_count", 4);
            const double amp = j.value("amplitude", 0.5);
            const std::uint64_t bseed = j.value("bump_seed", std::uint64_t{1});
            bumps = default_bumps(base.n(), count, amp, bseed);
        }
        return make_perturbed_body(base, std::move(bumps));
    }
    throw ContractViolation("body spec: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Report serialization

inline json spectrum_to_json(const SpectrumPartition& p) {
    json groups = json::array();
    for (const auto& g : p.groups) {
        json jg;
        jg["eigenvalue"] = g.eigenvalue;
        jg["binormal_length"] = g.binormal_length;
        jg["dim"] = g.basis.cols();
        jg["basis"] = mat_to_json(g.basis);
        groups.push_back(std::move(jg));
    }
    json j;
    j["k"] = p.k();
    j["grouping_tol"] = p.grouping_tol;
    j["groups"] = std::move(groups);
    return j;
}

inline json fiber_to_json(const FiberResult& f) {
    json lines = json::array();
    for (const auto& [l, len] : f.lines) {
        json jl;
        jl["dir"] = vec_to_json(l.dir);
        jl["chord_length"] = len;
        lines.push_back(std::move(jl));
    }
    json j;
    j["hyperplane"] = vec_to_json(f.hyperplane.normal);
    j["lines"] = std::move(lines);
    j["generic"] = f.generic;
    j["degenerate"] = f.degenerate;
    return j;
}

inline json cover_scan_to_json(const CoverScanReport& r) {
    json hist;
    for (const auto& [size, count] : r.histogram) hist[std::to_string(size)] = count;
    json j;
    j["samples"] = r.samples;
    j["histogram"] = std::move(hist);
    j["rejected_nongeneric"] = r.rejected_nongeneric;
    j["k"] = r.k;
    j["seed"] = r.seed;
    return j;
}

inline json monodromy_to_json(const MonodromyResult& m) {
    json loop = json::array();
    for (const auto& w : m.loop) loop.push_back(vec_to_json(w.normal));
    json perm = json::array();
    for (int p : m.permutation) perm.push_back(p + 1);  // sheets numbered 1..k-1
    json j;
    j["loop"] = std::move(loop);
    j["permutation"] = std::move(perm);
    j["max_step_jump"] = m.max_step_jump;
    j["closed"] = m.closed;
    return j;
}

inline json mirror_fit_to_json(const MirrorFit& f) {
    json j;
    j["direction"] = vec_to_json(f.direction.dir);
    j["hyperplane"] = {{"normal", vec_to_json(f.normal)}, {"offset", f.offset}};
    j["residual_rms"] = f.residual_rms;
    j["chords_used"] = f.chords_used;
    j["transversality"] = f.transversality;
    return j;
}

inline json direction_scan_to_json(const DirectionScanReport& r) {
    json acc = json::array();
    for (const auto& row : r.accepted) {
        json jr;
        jr["dir"] = vec_to_json(row.line.dir);
        jr["residual_rms"] = row.residual_rms;
        jr["invariance_error"] = row.invariance_error;
        acc.push_back(std::move(jr));
    }
    json j;
    j["samples"] = r.samples;
    j["accepted"] = std::move(acc);
    j["threshold"] = r.threshold;
    j["thick_estimate"] = r.thick_estimate;
    j["thick_estimate_note"] = "sampled-ball approximation of topological thickness";
    j["seed"] = r.seed;
    return j;
}

inline json ortho_scan_to_json(const OrthoScanReport& r) {
    json dirs = json::array();
    for (const auto& l : r.directions) dirs.push_back(vec_to_json(l.dir));
    json clusters = json::array();
    for (const auto& c : r.clusters) {
        json jc;
        jc["representative"] = vec_to_json(c.representative.dir);
        jc["size"] = c.size;
        jc["diameter"] = c.diameter;
        jc["residual_rms"] = c.residual_rms;
        jc["ortho_angle"] = c.ortho_angle;
        jc["invariance_error"] = c.invariance_error;
        clusters.push_back(std::move(jc));
    }
    json j;
    j["samples"] = r.samples;
    j["threshold"] = r.threshold;
    j["seed"] = r.seed;
    j["directions"] = std::move(dirs);
    j["clusters"] = std::move(clusters);
    j["nonfinite"] = r.nonfinite;
    return j;
}

inline json fitted_ellipsoid_to_json(const FittedEllipsoid& f) {
    json j;
    j["ellipsoid"] = ellipsoid_to_json(f.ellipsoid);
    j["relative_volume_gap"] = f.relative_volume_gap;
    j["iterations"] = f.iterations;
    return j;
}

inline json classify_to_json(const ClassifyReport& r) {
    json j;
    j["verdict"] = r.verdict;
    j["direction_scan"] = direction_scan_to_json(r.dir_scan);
    if (r.mvee_fit) j["mvee"] = fitted_ellipsoid_to_json(*r.mvee_fit);
    j["mvee_boundary_residual"] = r.mvee_boundary_residual;
    if (r.ortho) j["orthogonal_scan"] = ortho_scan_to_json(*r.ortho);
    if (r.rotational) {
        json jr;
        jr["axis"] = vec_to_json(r.rotational->axis.dir);
        jr["axis_point"] = vec_to_json(r.rotational->axis_point);
        jr["max_disk_residual"] = r.rotational->max_disk_residual;
        jr["max_center_offset"] = r.rotational->max_center_offset;
        jr["sections"] = r.rotational->sections;
        j["rotational"] = std::move(jr);
    }
    return j;
}

inline json bezdek_report_to_json(const BezdekReport& r) {
    json axes = json::array();
    for (const auto& a : r.section_axes) {
        json ja;
        ja["angle"] = a.angle;
        ja["symmetry_residual"] = a.residual;
        axes.push_back(std::move(ja));
    }
    json j;
    j["plane"] = {{"normal", vec_to_json(r.plane.normal)}, {"offset", r.plane.offset}};
    j["section_axes"] = std::move(axes);
    j["bezdek"] = r.bezdek;
    j["strong_bezdek"] = r.strong_bezdek;
    j["vacuous"] = r.vacuous;
    j["degenerate_circle"] = r.degenerate_circle;
    if (r.witness) {
        j["witness"] = {{"direction", vec_to_json(r.witness->direction.dir)},
                        {"mirror_fit", mirror_fit_to_json(r.witness->fit)}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

inline json bezdek_scan_to_json(const BezdekScanReport& r, bool with_rows = false) {
    json j;
    j["samples"] = r.samples;
    j["fraction_bezdek"] = r.fraction_bezdek;
    j["fraction_strong"] = r.fraction_strong;
    j["threshold"] = r.threshold;
    j["seed"] = r.seed;
    j["vacuous_count"] = r.vacuous_count;
    j["include_vacuous"] = r.include_vacuous;
    if (with_rows) {
        json rows = json::array();
        for (const auto& row : r.rows) rows.push_back(bezdek_report_to_json(row));
        j["rows"] = std::move(rows);
    }
    return j;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string cover_scan_to_csv(const CoverScanReport& r) {
    std::string out;
    const int n = r.rows.empty() ? 0 : static_cast<int>(r.rows.front().normal.size());
    for (int i = 0; i < n; ++i) out += "normal_" + std::to_string(i) + ",";
    out += "fiber_size,min_margin,accepted\n";
    for (const auto& row : r.rows) {
        for (double x : row.normal) out += csv_number(x) + ",";
        out += std::to_string(row.fiber_size) + "," + csv_number(row.min_margin) + "," +
               (row.accepted ? "1" : "0") + "\n";
    }
    return out;
}

inline std::string direction_scan_to_csv(const DirectionScanReport& r) {
    std::string out;
    const int n = r.accepted.empty() ? 0 : r.accepted.front().line.n();
    for (int i = 0; i < n; ++i) out += "dir_" + std::to_string(i) + ",";
    out += "residual_rms,invariance_error\n";
    for (const auto& row : r.accepted) {
        for (double x : row.line.dir) out += csv_number(x) + ",";
        out += csv_number(row.residual_rms) + "," + csv_number(row.invariance_error) + "\n";
    }
    return out;
}

inline std::string bezdek_scan_to_csv(const BezdekScanReport& r) {
    std::string out =
        "normal_0,normal_1,normal_2,offset,bezdek,strong_bezdek,vacuous,degenerate_circle,"
        "axes,best_residual\n";
    for (const auto& row : r.rows) {
        for (double x : row.plane.normal) out += csv_number(x) + ",";
        out += csv_number(row.plane.offset) + ",";
        out += std::string(row.bezdek ? "1" : "0") + "," + (row.strong_bezdek ? "1" : "0") + "," +
               (row.vacuous ? "1" : "0") + "," + (row.degenerate_circle ? "1" : "0") + ",";
        out += std::to_string(row.section_axes.size()) + ",";
        out += row.section_axes.empty() ? std::string("")
                                        : csv_number(row.section_axes.front().residual);
        out += "\n";
    }
    return out;
}

}  // namespace reflecta
