#pragma once

// Command-line front end.  Subcommands map one-to-one onto the library
// drivers; every report embeds the resolved configuration and the version
// string, and identical (config, seed) pairs produce byte-identical output.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "reflecta/io.hpp"
#include "reflecta/version.hpp"

namespace reflecta::cli {

struct CommonOpts {
    std::string input;
    int samples = 1000;
    std::uint64_t seed = 0;
    double threshold = kDefaultThreshold;
    double tol = 1e-6;
    double eps = 1e-4;
    std::string output;
    std::string format = "json";
    int threads = 0;  // 0: REFLECTA_THREADS or hardware
};

inline void add_common(CLI::App* cmd, CommonOpts& o, bool needs_input = true) {
    auto* in = cmd->add_option("--input,-i", o.input, "input file path or inline JSON spec");
    if (needs_input) in->required();
    cmd->add_option("--samples", o.samples, "sample count for scans");
    cmd->add_option("--seed", o.seed, "RNG seed (default 0, reproducible)");
    cmd->add_option("--threshold", o.threshold, "acceptance threshold, units of bounding radius");
    cmd->add_option("--tol", o.tol, "genericity / binormal tolerance for scan drivers");
    cmd->add_option("--eps", o.eps, "MVEE optimality tolerance");
    cmd->add_option("--output,-o", o.output, "output path (default: stdout)");
    cmd->add_option("--format", o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--threads", o.threads, "worker thread cap")
        ->envname("REFLECTA_THREADS");
}

inline int resolve_threads(const CommonOpts& o) {
    if (o.threads > 0) return o.threads;
    return default_threads();
}

inline json read_input(const std::string& spec) {
    std::string text;
    if (!spec.empty() && (spec.front() == '{' || spec.front() == '[')) {
        text = spec;
    } else {
        std::ifstream f(spec);
        if (!f) throw ContractViolation("cannot open input file: " + spec);
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ContractViolation(std::string("malformed input JSON: ") + e.what());
    }
}

inline Vec parse_coords(const std::string& s, const char* what) {
    Vec v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (...) {
            throw ContractViolation(std::string(what) + ": cannot parse '" + item + "'");
        }
    }
    if (v.size() < 2) throw ContractViolation(std::string(what) + ": need at least 2 coordinates");
    return v;
}

inline json config_json(const std::string& command, const CommonOpts& o) {
    json c;
    c["command"] = command;
    c["input"] = o.input;
    c["samples"] = o.samples;
    c["seed"] = o.seed;
    c["threshold"] = o.threshold;
    c["tol"] = o.tol;
    c["eps"] = o.eps;
    c["format"] = o.format;
    c["threads"] = resolve_threads(o);
    return c;
}

inline void emit(const CommonOpts& o, const std::string& text) {
    const char* tail = (!text.empty() && text.back() == '\n') ? "" : "\n";
    if (o.output.empty()) {
        std::cout << text << tail;
    } else {
        std::ofstream f(o.output);
        if (!f) throw ContractViolation("cannot open output file: " + o.output);
        f << text << tail;
    }
}

inline void emit_report(const std::string& command, const CommonOpts& o, json report,
                        json extra_config = json::object()) {
    json out;
    out["version"] = version();
    json cfg = config_json(command, o);
    for (auto& [k, v] : extra_config.items()) cfg[k] = v;
    out["config"] = std::move(cfg);
    out["report"] = std::move(report);
    emit(o, out.dump(2));
}

inline int run(int argc, const char* const* argv) {
    CLI::App app{"reflecta: reflection geometry of convex bodies"};
    app.set_version_flag("--version", REFLECTA_VERSION);
    app.require_subcommand(1);

    // quadric / section commands
    CommonOpts spec_o;
    double grouping_tol = kDefaultGroupingTol;
    auto* cmd_spectrum = app.add_subcommand("spectrum", "eigenvalue groups and binormal lengths");
    add_common(cmd_spectrum, spec_o);
    cmd_spectrum->add_option("--grouping-tol", grouping_tol, "relative eigenvalue grouping tolerance");

    CommonOpts ground_o;
    std::string ground_line;
    double binormal_tol = kDefaultBinormalTol;
    auto* cmd_ground = app.add_subcommand("ground", "ground hyperplane of a diagonal direction");
    add_common(cmd_ground, ground_o);
    cmd_ground->add_option("--line", ground_line, "direction, comma separated")->required();
    cmd_ground->add_option("--binormal-tol", binormal_tol, "binormal angle tolerance");

    CommonOpts fiber_o;
    std::string fiber_normal;
    auto* cmd_fiber = app.add_subcommand("fiber", "fiber of the ground map over a hyperplane");
    add_common(cmd_fiber, fiber_o);
    cmd_fiber->add_option("--normal", fiber_normal, "hyperplane normal, comma separated")
        ->required();

    CommonOpts cover_o;
    auto* cmd_cover = app.add_subcommand("cover-scan", "fiber-size histogram over random hyperplanes");
    add_common(cmd_cover, cover_o);

    CommonOpts mono_o;
    std::string mono_normal;
    double mono_radius = 0.05;
    int mono_steps = 24;
    auto* cmd_mono = app.add_subcommand("monodromy", "track fiber sheets around a loop");
    add_common(cmd_mono, mono_o);
    cmd_mono->add_option("--normal", mono_normal, "loop center normal (chart loop mode)");
    cmd_mono->add_option("--radius", mono_radius, "loop radius in chart coordinates");
    cmd_mono->add_option("--steps", mono_steps, "waypoints per loop");

    // body commands
    CommonOpts mfit_o;
    std::string mfit_line;
    int grid = 4;
    auto* cmd_mfit = app.add_subcommand("mirror-fit", "fit the chord-midpoint hyperplane");
    add_common(cmd_mfit, mfit_o);
    cmd_mfit->add_option("--line", mfit_line, "direction, comma separated")->required();
    cmd_mfit->add_option("--grid", grid, "chord lattice half-width");

    CommonOpts dscan_o;
    auto* cmd_dscan = app.add_subcommand("direction-scan", "reflection directions of a body");
    add_common(cmd_dscan, dscan_o);

    CommonOpts oscan_o;
    auto* cmd_oscan = app.add_subcommand("ortho-scan", "orthogonal reflection directions");
    add_common(cmd_oscan, oscan_o);

    CommonOpts mvee_o;
    auto* cmd_mvee = app.add_subcommand("mvee", "minimum-volume enclosing ellipsoid");
    add_common(cmd_mvee, mvee_o);

    CommonOpts cls_o;
    auto* cmd_cls = app.add_subcommand("classify", "ellipsoid / rotational / other verdict");
    add_common(cmd_cls, cls_o);

    // bezdek commands
    CommonOpts bscan_o;
    bool include_vacuous = false;
    bool with_rows = false;
    auto* cmd_bscan = app.add_subcommand("bezdek-scan", "Bezdek / strong-Bezdek plane fractions");
    add_common(cmd_bscan, bscan_o);
    cmd_bscan->add_flag("--include-vacuous", include_vacuous,
                        "count empty sections in the denominators");
    cmd_bscan->add_flag("--rows", with_rows, "include per-plane rows in the JSON report");

    CommonOpts cplane_o;
    std::string plane_normal;
    double plane_offset = 0.0;
    auto* cmd_cplane = app.add_subcommand("classify-plane", "Bezdek report for one plane");
    add_common(cmd_cplane, cplane_o);
    cmd_cplane->add_option("--normal", plane_normal, "plane normal, comma separated")->required();
    cmd_cplane->add_option("--offset", plane_offset, "plane offset (normal . x = offset)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        json err;
        err["error"] = "argument_error";
        err["detail"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    }

    try {
        if (cmd_spectrum->parsed()) {
            const Ellipsoid e = ellipsoid_from_json(read_input(spec_o.input));
            const SpectrumPartition p = spectrum_partition(e, grouping_tol);
            json lambdas = json::array();
            for (const auto& g : p.groups) lambdas.push_back(g.binormal_length);
            json rep = spectrum_to_json(p);
            rep["lambdas"] = std::move(lambdas);
            emit_report("spectrum", spec_o, std::move(rep), {{"grouping_tol", grouping_tol}});
        } else if (cmd_ground->parsed()) {
            const Ellipsoid e = ellipsoid_from_json(read_input(ground_o.input));
            const ProjLine l(parse_coords(ground_line, "--line"));
            const ProjHyperplane g = ground(e, l, binormal_tol);
            json rep;
            rep["line"] = vec_to_json(l.dir);
            rep["ground_normal"] = vec_to_json(g.normal);
            emit_report("ground", ground_o, std::move(rep),
                        {{"line", ground_line}, {"binormal_tol", binormal_tol}});
        } else if (cmd_fiber->parsed()) {
            const Ellipsoid e = ellipsoid_from_json(read_input(fiber_o.input));
            const ProjHyperplane g(parse_coords(fiber_normal, "--normal"));
            FiberOptions fo;
            fo.generic_tol = fiber_o.tol;
            emit_report("fiber", fiber_o, fiber_to_json(fiber(e, g, fo)),
                        {{"normal", fiber_normal}});
        } else if (cmd_cover->parsed()) {
            const Ellipsoid e = ellipsoid_from_json(read_input(cover_o.input));
            CoverScanOptions co;
            co.tol = cover_o.tol;
            co.threads = resolve_threads(cover_o);
            const CoverScanReport rep = cover_scan(e, cover_o.samples, cover_o.seed, co);
            if (cover_o.format == "csv")
                emit(cover_o, cover_scan_to_csv(rep));
            else
                emit_report("cover-scan", cover_o, cover_scan_to_json(rep));
        } else if (cmd_mono->parsed()) {
            const json in = read_input(mono_o.input);
            const Ellipsoid e = ellipsoid_from_json(in);
            std::vector<ProjHyperplane> path;
            if (!mono_normal.empty()) {
                path = chart_loop(ProjHyperplane(parse_coords(mono_normal, "--normal")),
                                  mono_radius, mono_steps);
            } else if (in.contains("loop")) {
                for (const auto& w : in.at("loop"))
                    path.emplace_back(vec_from_json(w, "loop waypoint"));
            } else {
                throw ContractViolation("monodromy: need --normal or a 'loop' array in the input");
            }
            TrackOptions to;
            to.tol = mono_o.tol;
            emit_report("monodromy", mono_o, monodromy_to_json(track_fiber(e, path, to)),
                        {{"normal", mono_normal}, {"radius", mono_radius}, {"steps", mono_steps}});
        } else if (cmd_mfit->parsed()) {
            const BodyOracle k = body_from_json(read_input(mfit_o.input));
            const ProjLine l(parse_coords(mfit_line, "--line"));
            FitOptions fo;
            fo.grid = grid;
            emit_report("mirror-fit", mfit_o, mirror_fit_to_json(fit_mirror(k, l, fo)),
                        {{"line", mfit_line}, {"grid", grid}});
        } else if (cmd_dscan->parsed()) {
            const BodyOracle k = body_from_json(read_input(dscan_o.input));
            DirectionScanOptions dso;
            dso.threads = resolve_threads(dscan_o);
            const DirectionScanReport rep =
                direction_scan(k, dscan_o.samples, dscan_o.threshold, dscan_o.seed, dso);
            if (dscan_o.format == "csv")
                emit(dscan_o, direction_scan_to_csv(rep));
            else
                emit_report("direction-scan", dscan_o, direction_scan_to_json(rep));
        } else if (cmd_oscan->parsed()) {
            const BodyOracle k = body_from_json(read_input(oscan_o.input));
            OrthoScanOptions oso;
            oso.threads = resolve_threads(oscan_o);
            emit_report("ortho-scan", oscan_o,
                        ortho_scan_to_json(orthogonal_reflection_scan(
                            k, oscan_o.samples, oscan_o.threshold, oscan_o.seed, oso)));
        } else if (cmd_mvee->parsed()) {
            const json in = read_input(mvee_o.input);
            std::vector<Vec> pts;
            if (in.contains("points")) {
                for (const auto& p : in.at("points")) pts.push_back(vec_from_json(p, "point"));
            } else {
                const BodyOracle k = body_from_json(in);
                const int count = cmd_mvee->count("--samples") ? mvee_o.samples : 1000 * k.n;
                pts = boundary_cloud(k, count, mvee_o.seed, 1e-9, resolve_threads(mvee_o));
            }
            emit_report("mvee", mvee_o, fitted_ellipsoid_to_json(mvee(pts, mvee_o.eps)));
        } else if (cmd_cls->parsed()) {
            const BodyOracle k = body_from_json(read_input(cls_o.input));
            ClassifyConfig cc;
            cc.threshold = cls_o.threshold;
            cc.mvee_eps = cls_o.eps;
            cc.seed = cls_o.seed;
            cc.threads = resolve_threads(cls_o);
            if (cmd_cls->count("--samples")) {
                cc.dir_samples = cls_o.samples;
                cc.ortho_samples = 3 * cls_o.samples;
            }
            emit_report("classify", cls_o, classify_to_json(classify_body(k, cc)));
        } else if (cmd_bscan->parsed()) {
            const BodyOracle k = body_from_json(read_input(bscan_o.input));
            BezdekScanOptions bo;
            bo.plane.threshold = bscan_o.threshold;
            bo.include_vacuous = include_vacuous;
            bo.threads = resolve_threads(bscan_o);
            const BezdekScanReport rep = bezdek_scan(k, bscan_o.samples, bscan_o.seed, bo);
            if (bscan_o.format == "csv")
                emit(bscan_o, bezdek_scan_to_csv(rep));
            else
                emit_report("bezdek-scan", bscan_o, bezdek_scan_to_json(rep, with_rows),
                            {{"include_vacuous", include_vacuous}});
        } else if (cmd_cplane->parsed()) {
            const BodyOracle k = body_from_json(read_input(cplane_o.input));
            AffinePlane plane(parse_coords(plane_normal, "--normal"), plane_offset);
            BezdekOptions po;
            po.threshold = cplane_o.threshold;
            emit_report("classify-plane", cplane_o,
                        bezdek_report_to_json(classify_plane(k, plane, po)),
                        {{"normal", plane_normal}, {"offset", plane_offset}});
        }
        return 0;
    } catch (const ContractViolation& e) {
        json err;
        err["error"] = "contract_violation";
        err["detail"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        json err;
        err["error"] = "malformed_input";
        err["detail"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const NumericalFailure& e) {
        json err;
        err["error"] = "numerical_failure";
        err["detail"] = e.what();
        std::cerr << err.dump() << "\n";
        return 3;
    }
}

}  // namespace reflecta::cli
