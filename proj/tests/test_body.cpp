#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "reflecta/bodies.hpp"
#include "reflecta/io.hpp"

using namespace reflecta;
using Catch::Approx;

namespace {

Ellipsoid reference_ellipsoid() {
    Mat a(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 0.25;
    a(2, 2) = 1.0 / 9.0;
    return Ellipsoid::centered(a);
}

std::vector<std::pair<double, double>> barrel_profile() {
    return {{-1.0, 0.0}, {-0.5, 0.8}, {0.0, 1.0}, {0.4, 0.95}, {0.8, 0.6}, {1.1, 0.0}};
}

BodyOracle perturbed_reference() {
    return make_perturbed_body(reference_ellipsoid(), default_bumps(3, 4, 0.5, 1));
}

double angle_between(std::span<const double> a, std::span<const double> b) {
    const double c = std::min(1.0, std::abs(dot(a, b) / (norm(a) * norm(b))));
    return std::acos(c);
}

}  // namespace

TEST_CASE("built-in oracles pass the convexity spot check") {
    REQUIRE(convexity_spot_check(make_ellipsoid_body(reference_ellipsoid())));
    REQUIRE(convexity_spot_check(make_revolution_body(barrel_profile())));
    REQUIRE(convexity_spot_check(make_superellipsoid(Vec{1.0, 0.7, 0.5}, 4.0)));
    REQUIRE(convexity_spot_check(make_box(Vec{0.9, 0.6, 0.45})));
    REQUIRE(convexity_spot_check(perturbed_reference()));
}

TEST_CASE("revolution profile validation") {
    REQUIRE_THROWS_AS(make_revolution_body({{0.0, 1.0}, {1.0, 2.0}}), ContractViolation);
    // convexity violation: radii dip then rise
    REQUIRE_THROWS_AS(make_revolution_body({{-1.0, 1.0}, {0.0, 0.2}, {1.0, 1.0}}),
                      ContractViolation);
    REQUIRE_THROWS_AS(make_revolution_body({{0.0, 1.0}, {0.0, 1.0}, {1.0, 0.5}}),
                      ContractViolation);
}

TEST_CASE("chord extraction") {
    SECTION("unit ball along e1") {
        const BodyOracle ball = make_ellipsoid_body(Ellipsoid::centered(Mat::identity(3)));
        const auto seg = chord(ball, Vec{0, 0, 0}, ProjLine(Vec{1, 0, 0}));
        REQUIRE(seg);
        REQUIRE(seg->length() == Approx(2.0).margin(1e-8));
        REQUIRE(std::abs(seg->a[0] + 1.0) <= 1e-8);
        REQUIRE(std::abs(seg->b[0] - 1.0) <= 1e-8);
    }
    SECTION("line missing the body") {
        const BodyOracle ball = make_ellipsoid_body(Ellipsoid::centered(Mat::identity(3)));
        REQUIRE_FALSE(chord(ball, Vec{0, 2.0, 0}, ProjLine(Vec{1, 0, 0})).has_value());
    }
    SECTION("2D ellipse against the closed form") {
        Mat a(2, 2);
        a(0, 0) = 1.0;
        a(1, 1) = 0.25;
        const BodyOracle k = make_ellipsoid_body(Ellipsoid::centered(a));
        const auto seg = chord(k, Vec{0.0, 0.5}, ProjLine(Vec{1, 0}));
        REQUIRE(seg);
        // closed-form quadric-line intersection: x^2 = 1 - 0.5^2 / 4
        const double expected = std::sqrt(1.0 - 0.25 / 4.0);
        REQUIRE(seg->a[0] == Approx(-expected).margin(1e-8));
        REQUIRE(seg->b[0] == Approx(expected).margin(1e-8));
        REQUIRE(seg->a[1] == Approx(0.5).margin(1e-12));
    }
}

TEST_CASE("fit_mirror") {
    SECTION("translated ellipsoids: residual and mirror direction") {
        auto g = testutil::test_rng(61);
        for (int rep = 0; rep < 8; ++rep) {
            const int n = 3 + rep % 2;
            const Mat a = testutil::random_spd(g, n, 0.4, 2.5);
            Vec center(n);
            for (double& c : center) c = 0.3 * (rep % 3 - 1);
            const Ellipsoid e_centered = Ellipsoid::centered(a);
            const BodyOracle k = make_ellipsoid_body(Ellipsoid(center, a));
            const ProjLine l(testutil::random_unit(g, n));
            const MirrorFit fit = fit_mirror(k, l);
            REQUIRE(fit.residual_rms <= 1e-6);
            REQUIRE(angle_between(fit.normal, mirror(e_centered, l).normal) <= 1e-6);
            // fitted hyperplane passes through the center of symmetry
            REQUIRE(std::abs(dot(fit.normal, center) - fit.offset) <=
                    1e-6 * k.bounding_radius);
        }
    }
    SECTION("unit ball: mirror through the center, orthogonal to the direction") {
        const BodyOracle ball = make_ellipsoid_body(Ellipsoid::centered(Mat::identity(3)));
        const ProjLine l(Vec{1.0, -2.0, 0.5});
        const MirrorFit fit = fit_mirror(ball, l);
        REQUIRE(fit.residual_rms <= 1e-7);
        REQUIRE(angle_between(fit.normal, l.dir) <= 1e-6);
        REQUIRE(std::abs(fit.offset) <= 1e-7);
    }
    SECTION("revolution body at 45 degrees: midpoints refuse a hyperplane") {
        const BodyOracle k = make_revolution_body(barrel_profile());
        const ProjLine l(Vec{1.0, 0.0, 1.0});

        // independent oracle: chords of the exact profile predicate on a
        // fresh base grid, fine bisection, least-squares plane residual
        std::vector<Vec> mids;
        for (int i = -5; i <= 5; ++i) {
            for (int j = -5; j <= 5; ++j) {
                const Vec base{0.25 * i, 0.25 * j, 0.0};
                const auto inside = [&](double t) {
                    const Vec x{base[0] + t * l.dir[0], base[1] + t * l.dir[1],
                                base[2] + t * l.dir[2]};
                    return k.contains(x);
                };
                double t_in = 0.0;
                bool found = false;
                for (int s = 0; s <= 128 && !found; ++s) {
                    const double t = -3.0 + 6.0 * s / 128.0;
                    if (inside(t)) {
                        t_in = t;
                        found = true;
                    }
                }
                if (!found) continue;
                double lo = t_in, olo = -4.0, hi = t_in, ohi = 4.0;
                while (lo - olo > 1e-12) {
                    const double mid = 0.5 * (lo + olo);
                    (inside(mid) ? lo : olo) = mid;
                }
                while (ohi - hi > 1e-12) {
                    const double mid = 0.5 * (hi + ohi);
                    (inside(mid) ? hi : ohi) = mid;
                }
                const double tm = 0.5 * (lo + hi);
                mids.push_back(
                    {base[0] + tm * l.dir[0], base[1] + tm * l.dir[1], base[2] + tm * l.dir[2]});
            }
        }
        REQUIRE(mids.size() >= 20);
        Vec mean(3, 0.0);
        for (const auto& p : mids)
            for (int i = 0; i < 3; ++i) mean[i] += p[i] / mids.size();
        Mat cov(3, 3);
        for (const auto& p : mids)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) cov(i, j) += (p[i] - mean[i]) * (p[j] - mean[j]);
        const auto d = sym_eigen(cov);
        const Vec nrm = d.vectors.col(0);
        double ss = 0.0;
        for (const auto& p : mids) {
            const double dist = dot(nrm, sub(p, mean));
            ss += dist * dist;
        }
        const double oracle_residual = std::sqrt(ss / mids.size()) / k.bounding_radius;
        REQUIRE(oracle_residual > 1e-3);

        REQUIRE(fit_mirror(k, l).residual_rms > 1e-3);
    }
    SECTION("too few chords") {
        // a point-like oracle: the chord probe grid never lands inside
        BodyOracle point;
        point.n = 3;
        point.interior_point = Vec{0, 0, 0};
        point.bounding_radius = 1.0;
        point.label = "point";
        point.contains = [](std::span<const double> x) {
            return norm(x) <= 1e-13;
        };
        REQUIRE_THROWS_AS(fit_mirror(point, ProjLine(Vec{1, 0, 0})), TooFewChords);
    }
}

TEST_CASE("has_reflection") {
    SECTION("ellipsoid accepts every direction") {
        const BodyOracle k = make_ellipsoid_body(reference_ellipsoid());
        auto g = testutil::test_rng(62);
        for (int rep = 0; rep < 10; ++rep) {
            const ReflectionTest t =
                has_reflection(k, ProjLine(testutil::random_unit(g, 3)), 1e-3);
            REQUIRE(t.accepted);
            REQUIRE(t.fit.residual_rms <= 1e-6);
            REQUIRE(t.invariance_error <= 1e-6);
        }
    }
    SECTION("revolution body accepts directions orthogonal to axis planes") {
        const BodyOracle k = make_revolution_body(barrel_profile());
        REQUIRE(has_reflection(k, ProjLine(Vec{1, 0, 0}), 1e-3).accepted);
        REQUIRE(has_reflection(k, ProjLine(Vec{0.6, 0.8, 0.0}), 1e-3).accepted);
        REQUIRE_FALSE(has_reflection(k, ProjLine(Vec{0.6, 0.3, 0.74}), 1e-3).accepted);
        // the asymmetric profile also rejects the axis direction
        REQUIRE_FALSE(has_reflection(k, ProjLine(Vec{0, 0, 1}), 1e-3).accepted);
    }
    SECTION("consistency of (i) and (ii): residual and invariance agree on acceptance") {
        const BodyOracle k = perturbed_reference();
        auto g = testutil::test_rng(63);
        for (int rep = 0; rep < 10; ++rep) {
            const ReflectionTest t =
                has_reflection(k, ProjLine(testutil::random_unit(g, 3)), 1e-3);
            REQUIRE(t.accepted == (t.fit.residual_rms <= 1e-3 && t.invariance_error <= 1e-3));
            REQUIRE_FALSE(t.accepted);
        }
    }
}

TEST_CASE("direction_scan") {
    DirectionScanOptions opt;
    opt.threads = 2;
    SECTION("ellipsoid: every sampled direction accepted, thickness 1") {
        const BodyOracle k = make_ellipsoid_body(reference_ellipsoid());
        const DirectionScanReport rep = direction_scan(k, 300, 1e-3, 0, opt);
        REQUIRE(rep.accepted.size() == 300);
        REQUIRE(rep.thick_estimate == Approx(1.0));
    }
    SECTION("revolution body: accepted set hugs the horizontal circle, thin") {
        const BodyOracle k = make_revolution_body(barrel_profile());
        const DirectionScanReport rep = direction_scan(k, 400, 1e-3, 0, opt);
        for (const auto& row : rep.accepted)
            REQUIRE(std::abs(row.line.dir[2]) <= 0.05);  // near the z = 0 circle
        REQUIRE(rep.thick_estimate <= 0.2);
    }
    SECTION("perturbed ellipsoid: nothing accepted") {
        const BodyOracle k = perturbed_reference();
        const DirectionScanReport rep = direction_scan(k, 200, 1e-3, 0, opt);
        REQUIRE(rep.accepted.empty());
        REQUIRE(rep.thick_estimate == 0.0);

        // oracle spot check: explicit midpoint fits on 20 directions all fail
        auto g = testutil::test_rng(64);
        for (int rep2 = 0; rep2 < 20; ++rep2) {
            const MirrorFit fit = fit_mirror(k, ProjLine(testutil::random_unit(g, 3)));
            REQUIRE(fit.residual_rms > 1e-3);
        }
    }
}

TEST_CASE("orthogonal_reflection_scan") {
    OrthoScanOptions opt;
    opt.threads = 2;
    SECTION("triaxial ellipsoid: exactly the three axes") {
        const BodyOracle k = make_ellipsoid_body(reference_ellipsoid());
        const OrthoScanReport rep = orthogonal_reflection_scan(k, 400, 1e-3, 0, opt);
        REQUIRE_FALSE(rep.nonfinite);
        REQUIRE(rep.directions.size() == 3);
        bool seen[3] = {false, false, false};
        for (const auto& l : rep.directions)
            for (int axis = 0; axis < 3; ++axis) {
                Vec e(3, 0.0);
                e[axis] = 1.0;
                if (projective_distance(l, ProjLine(e)) < 1e-3) seen[axis] = true;
            }
        REQUIRE((seen[0] && seen[1] && seen[2]));
    }
    SECTION("box with distinct sides: three directions") {
        const BodyOracle k = make_box(Vec{0.9, 0.6, 0.45});
        const OrthoScanReport rep = orthogonal_reflection_scan(k, 400, 1e-3, 0, opt);
        REQUIRE_FALSE(rep.nonfinite);
        REQUIRE(rep.directions.size() == 3);
    }
    SECTION("revolution body: non-finite family flagged") {
        const BodyOracle k = make_revolution_body(barrel_profile());
        const OrthoScanReport rep = orthogonal_reflection_scan(k, 400, 1e-3, 0, opt);
        REQUIRE(rep.nonfinite);
        for (const auto& l : rep.accepted_points)
            REQUIRE(std::abs(l.dir[2]) <= 1e-2);  // the family is the horizontal circle
    }
}

TEST_CASE("mvee") {
    SECTION("square vertices give the centered circle of radius sqrt 2") {
        const std::vector<Vec> pts{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
        const FittedEllipsoid f = mvee(pts, 1e-9);
        REQUIRE(norm(f.ellipsoid.center()) <= 1e-9);
        Mat expected(2, 2);
        expected(0, 0) = expected(1, 1) = 0.5;
        REQUIRE(max_abs_diff(f.ellipsoid.form(), expected) <= 1e-6);
    }
    SECTION("boundary samples of a known ellipsoid recover the form") {
        const Ellipsoid e = reference_ellipsoid();
        auto g = testutil::test_rng(65);
        std::vector<Vec> pts;
        for (int i = 0; i < 1000; ++i) {
            const Vec u = testutil::random_unit(g, 3);
            pts.push_back(scaled(u, 1.0 / std::sqrt(dot(u, mat_vec(e.form(), u)))));
        }
        const FittedEllipsoid f = mvee(pts, 1e-5);
        REQUIRE(max_abs_diff(f.ellipsoid.form(), e.form()) <= 1e-3 * max_abs(e.form()));
        REQUIRE(norm(f.ellipsoid.center()) <= 1e-3);
    }
    SECTION("simplex vertices give the Steiner circumellipse") {
        const std::vector<Vec> pts{{0, 0}, {1, 0}, {0, 1}};
        const FittedEllipsoid f = mvee(pts, 1e-8);
        REQUIRE(f.ellipsoid.center()[0] == Approx(1.0 / 3.0).margin(2e-4));
        REQUIRE(f.ellipsoid.center()[1] == Approx(1.0 / 3.0).margin(2e-4));
        Mat steiner(2, 2);
        steiner(0, 0) = steiner(1, 1) = 3.0;
        steiner(0, 1) = steiner(1, 0) = 1.5;
        REQUIRE(max_abs_diff(f.ellipsoid.form(), steiner) <= 2e-3 * 3.0);

        // brute-force oracle: grid over centered forms, maximize det subject
        // to containment of the centroid-shifted vertices
        const Vec c{1.0 / 3.0, 1.0 / 3.0};
        std::vector<Vec> shifted;
        for (const auto& p : pts) shifted.push_back(sub(p, c));
        double best_det = 0.0;
        double best_q11 = 0.0, best_q12 = 0.0, best_q22 = 0.0;
        for (int i = 0; i <= 50; ++i)
            for (int j = 0; j <= 50; ++j)
                for (int l = 0; l <= 50; ++l) {
                    const double q11 = 2.5 + 0.02 * i;
                    const double q22 = 2.5 + 0.02 * j;
                    const double q12 = 1.0 + 0.02 * l;
                    const double det = q11 * q22 - q12 * q12;
                    if (det <= best_det) continue;
                    bool feasible = true;
                    for (const auto& p : shifted) {
                        const double q =
                            q11 * p[0] * p[0] + 2.0 * q12 * p[0] * p[1] + q22 * p[1] * p[1];
                        if (q > 1.0 + 1e-12) feasible = false;
                    }
                    if (feasible) {
                        best_det = det;
                        best_q11 = q11;
                        best_q12 = q12;
                        best_q22 = q22;
                    }
                }
        REQUIRE(best_q11 == Approx(3.0).margin(0.021));
        REQUIRE(best_q22 == Approx(3.0).margin(0.021));
        REQUIRE(best_q12 == Approx(1.5).margin(0.021));
    }
    SECTION("degenerate point sets are rejected") {
        std::vector<Vec> pts;
        for (int i = 0; i < 6; ++i) pts.push_back(Vec{static_cast<double>(i), 0.0});
        REQUIRE_THROWS_AS(mvee(pts, 1e-4), DegeneratePointSet);
        REQUIRE_THROWS_AS(mvee(std::vector<Vec>{{0, 0}, {1, 1}}, 1e-4), DegeneratePointSet);
    }
    SECTION("idempotence on refitted boundaries") {
        auto g = testutil::test_rng(66);
        const Mat a = testutil::random_spd(g, 3, 0.4, 2.0);
        std::vector<Vec> pts;
        for (int i = 0; i < 600; ++i) {
            const Vec u = testutil::random_unit(g, 3);
            pts.push_back(scaled(u, 1.0 / std::sqrt(dot(u, mat_vec(a, u)))));
        }
        const double eps = 1e-5;
        const FittedEllipsoid f1 = mvee(pts, eps);
        std::vector<Vec> pts2;
        for (int i = 0; i < 600; ++i) {
            const Vec u = testutil::random_unit(g, 3);
            const double q = dot(u, mat_vec(f1.ellipsoid.form(), u));
            pts2.push_back(add(f1.ellipsoid.center(), scaled(u, 1.0 / std::sqrt(q))));
        }
        const FittedEllipsoid f2 = mvee(pts2, eps);
        REQUIRE(max_abs_diff(f2.ellipsoid.form(), f1.ellipsoid.form()) <=
                2.0 * eps * max_abs(f1.ellipsoid.form()));
    }
    SECTION("affine symmetry transfer to the fitted ellipsoid") {
        const Ellipsoid e = reference_ellipsoid();
        const Ellipsoid translated(Vec{0.2, -0.1, 0.3}, e.form());
        const BodyOracle k = make_ellipsoid_body(translated);
        const auto cloud = boundary_cloud(k, 1200, 9, 1e-9, 2);
        const FittedEllipsoid f = mvee(cloud, 1e-5);
        const Reflection r = reflection_in_direction(e, ProjLine(Vec{1.0, 0.7, -0.4}));
        const Mat rar = matmul(transpose(r.linear), matmul(f.ellipsoid.form(), r.linear));
        REQUIRE(max_abs_diff(rar, f.ellipsoid.form()) <= 1e-3 * max_abs(f.ellipsoid.form()));
    }
}

TEST_CASE("classify_body") {
    ClassifyConfig cfg;
    cfg.dir_samples = 60;
    cfg.ortho_samples = 250;
    cfg.mvee_points = 1500;
    cfg.threads = 2;
    SECTION("ellipsoid") {
        const ClassifyReport rep =
            classify_body(make_ellipsoid_body(reference_ellipsoid()), cfg);
        REQUIRE(rep.verdict == "ellipsoid");
        REQUIRE(rep.dir_scan.thick_estimate >= 0.99);
        REQUIRE(rep.mvee_boundary_residual <= 1e-4);
    }
    SECTION("revolution body") {
        const ClassifyReport rep = classify_body(make_revolution_body(barrel_profile()), cfg);
        REQUIRE(rep.verdict == "rotational");
        REQUIRE(rep.rotational);
        REQUIRE(projective_distance(rep.rotational->axis, ProjLine(Vec{0, 0, 1})) <= 1e-3);
    }
    SECTION("perturbed ellipsoid") {
        const ClassifyReport rep = classify_body(perturbed_reference(), cfg);
        REQUIRE(rep.verdict == "other");
        REQUIRE(rep.mvee_boundary_residual > 1e-2);
    }
}
