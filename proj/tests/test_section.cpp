#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "reflecta/section.hpp"

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

Ellipsoid oblate_ellipsoid() {  // k = 2 in R^3
    Mat a(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    a(2, 2) = 0.25;
    return Ellipsoid::centered(a);
}

// random exactly-symmetric form with given eigenvalue multiplicities
Ellipsoid random_grouped(std::mt19937_64& g, const std::vector<std::pair<double, int>>& spec) {
    Vec eigs;
    for (const auto& [v, m] : spec)
        for (int i = 0; i < m; ++i) eigs.push_back(v);
    return Ellipsoid::centered(testutil::spd_with_eigenvalues(g, eigs));
}

}  // namespace

TEST_CASE("section_form") {
    const Ellipsoid e = reference_ellipsoid();
    SECTION("coordinate hyperplane") {
        const SectionEllipsoid s = section_form(e, ProjHyperplane(Vec{0, 0, 1}));
        // deterministic basis for e3 is {e2, e1}
        const auto d = sym_eigen(s.form);
        REQUIRE(d.values[0] == Approx(0.25));
        REQUIRE(d.values[1] == Approx(1.0));
    }
    SECTION("sphere sections are unit disks") {
        const Ellipsoid sph = Ellipsoid::centered(Mat::identity(4));
        auto g = testutil::test_rng(1);
        const SectionEllipsoid s = section_form(sph, ProjHyperplane(testutil::random_unit(g, 4)));
        REQUIRE(max_abs_diff(s.form, Mat::identity(3)) <= 1e-12);
    }
    SECTION("embedded section points lie on the boundary") {
        auto g = testutil::test_rng(2);
        for (int rep = 0; rep < 10; ++rep) {
            const int n = 3 + rep % 3;
            const Ellipsoid e2 = Ellipsoid::centered(testutil::random_spd(g, n));
            const SectionEllipsoid s =
                section_form(e2, ProjHyperplane(testutil::random_unit(g, n)));
            for (int t = 0; t < 100; ++t) {
                const Vec y = testutil::random_unit(g, n - 1);
                const double q = dot(y, mat_vec(s.form, y));
                const Vec x = s.embed(scaled(y, 1.0 / std::sqrt(q)));
                REQUIRE(std::abs(dot(x, mat_vec(e2.form(), x)) - 1.0) <= 1e-10);
            }
        }
    }
}

TEST_CASE("section_axes") {
    const Ellipsoid e = reference_ellipsoid();
    SECTION("coordinate hyperplane axes with lengths 4 and 2") {
        const SectionAxes ax = section_axes(e, ProjHyperplane(Vec{0, 0, 1}));
        REQUIRE(ax.axes.size() == 2);
        REQUIRE(ax.axes[0].second == Approx(4.0));
        REQUIRE(projective_distance(ax.axes[0].first, ProjLine(Vec{0, 1, 0})) <= 1e-12);
        REQUIRE(ax.axes[1].second == Approx(2.0));
        REQUIRE(projective_distance(ax.axes[1].first, ProjLine(Vec{1, 0, 0})) <= 1e-12);
        REQUIRE_FALSE(ax.degenerate);
    }
    SECTION("sphere sections are totally degenerate") {
        const Ellipsoid sph = Ellipsoid::centered(Mat::identity(3));
        const SectionAxes ax = section_axes(sph, ProjHyperplane(Vec{1, 1, 1}));
        REQUIRE(ax.degenerate);
    }
    SECTION("tilted hyperplane: axes satisfy the in-section binormal condition") {
        const ProjHyperplane g(Vec{1, 1, 1});
        const SectionAxes ax = section_axes(e, g);
        REQUIRE(ax.axes.size() == 2);
        const SectionEllipsoid s = section_form(e, g);
        for (const auto& [line, len] : ax.axes) {
            REQUIRE(std::abs(dot(line.dir, g.normal)) <= 1e-12);
            const Vec y = mat_tvec(s.basis, line.dir);
            const Vec fy = mat_vec(s.form, y);
            const double along = dot(fy, y) / dot(y, y);
            Vec perp = fy;
            for (std::size_t i = 0; i < perp.size(); ++i) perp[i] -= along * y[i];
            REQUIRE(std::atan2(norm(perp), along) <= 1e-8);
            // orthogonal axes
        }
        REQUIRE(std::abs(dot(ax.axes[0].first.dir, ax.axes[1].first.dir)) <= 1e-8);
        REQUIRE(ax.axes[0].second > ax.axes[1].second);
    }
}

TEST_CASE("fiber of the ground map") {
    const Ellipsoid e = reference_ellipsoid();
    SECTION("generic hyperplane carries k-1 = 2 lines") {
        const FiberResult f = fiber(e, ProjHyperplane(Vec{1, 1, 1}));
        REQUIRE(f.lines.size() == 2);
        REQUIRE(f.generic);
        REQUIRE(f.lines[0].second > f.lines[1].second);
    }
    SECTION("coordinate hyperplane: both axes are axes of E, fiber empty") {
        const FiberResult f = fiber(e, ProjHyperplane(Vec{0, 0, 1}));
        REQUIRE(f.lines.empty());
        REQUIRE_FALSE(f.generic);
    }
    SECTION("sphere refuses") {
        const Ellipsoid sph = Ellipsoid::centered(Mat::identity(3));
        REQUIRE_THROWS_AS(fiber(sph, ProjHyperplane(Vec{1, 1, 1})), ContractViolation);
    }
}

TEST_CASE("generic lines") {
    const Ellipsoid e = reference_ellipsoid();
    const SpectrumPartition p = spectrum_partition(e);
    SECTION("line inside an eigenspace complement is not generic") {
        REQUIRE_FALSE(is_generic_line(e, ProjLine(Vec{1, 1, 0}), p, 1e-6));
    }
    SECTION("space diagonal is generic; its length avoids every lambda_i") {
        const ProjLine l(Vec{1, 1, 1});
        REQUIRE(chord_length(e, l) == Approx(12.0 * std::sqrt(3.0) / 7.0).epsilon(1e-12));
        REQUIRE(is_generic_line(e, l, p, 1e-6));
    }
    SECTION("eigenvectors are never generic") {
        REQUIRE_FALSE(is_generic_line(e, ProjLine(Vec{1, 0, 0}), p, 1e-6));
        REQUIRE_FALSE(is_generic_line(e, ProjLine(Vec{0, 0, 1}), p, 1e-6));
    }
}

TEST_CASE("generic hyperplanes") {
    const Ellipsoid e = reference_ellipsoid();
    const SpectrumPartition p = spectrum_partition(e);
    REQUIRE(is_generic_hyperplane(e, ProjHyperplane(Vec{1, 1, 1}), p, 1e-6));
    REQUIRE_FALSE(is_generic_hyperplane(e, ProjHyperplane(Vec{0, 0, 1}), p, 1e-6));

    SECTION("5-dimensional example with grouped eigenvalues") {
        Mat a(5, 5);
        a(0, 0) = 1.0;
        a(1, 1) = 1.0;
        a(2, 2) = 0.25;
        a(3, 3) = 0.25;
        a(4, 4) = 1.0 / 9.0;
        const Ellipsoid e5 = Ellipsoid::centered(a);
        const SpectrumPartition p5 = spectrum_partition(e5);
        REQUIRE(p5.k() == 3);
        const ProjHyperplane g(Vec{1, 0, 1, 0, 1});
        REQUIRE(is_generic_hyperplane(e5, g, p5, 1e-6));
        // oracle: explicit projection norms onto each eigenspace
        for (int i = 0; i < 3; ++i)
            REQUIRE(p5.projection_norm(i, g.normal) == Approx(1.0 / std::sqrt(3.0)).margin(1e-12));
    }
}

TEST_CASE("cover_scan histograms") {
    SECTION("k = 3 reference: every accepted sample has fiber size 2") {
        const CoverScanReport rep = cover_scan(reference_ellipsoid(), 2000, 0);
        REQUIRE(rep.k == 3);
        REQUIRE(rep.histogram.size() == 1);
        REQUIRE(rep.histogram.count(2) == 1);
        REQUIRE(rep.histogram.at(2) + rep.rejected_nongeneric == rep.samples);
        REQUIRE(rep.rejected_nongeneric < rep.samples / 20);
    }
    SECTION("k = 2 oblate: single-sheet fibers") {
        const CoverScanReport rep = cover_scan(oblate_ellipsoid(), 1500, 1);
        REQUIRE(rep.k == 2);
        REQUIRE(rep.histogram.size() == 1);
        REQUIRE(rep.histogram.count(1) == 1);
    }
    SECTION("sphere refuses to run") {
        REQUIRE_THROWS_AS(cover_scan(Ellipsoid::centered(Mat::identity(3)), 10, 0),
                          ContractViolation);
    }
    SECTION("deterministic across thread counts") {
        CoverScanOptions one, four;
        one.threads = 1;
        four.threads = 4;
        const CoverScanReport a = cover_scan(reference_ellipsoid(), 400, 7, one);
        const CoverScanReport b = cover_scan(reference_ellipsoid(), 400, 7, four);
        REQUIRE(a.histogram == b.histogram);
        REQUIRE(a.rejected_nongeneric == b.rejected_nongeneric);
        for (int i = 0; i < 400; ++i) {
            REQUIRE(a.rows[i].normal == b.rows[i].normal);
            REQUIRE(a.rows[i].fiber_size == b.rows[i].fiber_size);
        }
    }
}

TEST_CASE("fiber properties over accepted hyperplanes") {
    auto g = testutil::test_rng(21);
    std::vector<Ellipsoid> cases;
    cases.push_back(random_grouped(g, {{0.3, 1}, {1.0, 2}}));             // n=3, k=2
    cases.push_back(random_grouped(g, {{0.3, 1}, {1.0, 1}, {2.2, 1}}));   // n=3, k=3
    cases.push_back(random_grouped(g, {{0.3, 2}, {1.0, 1}, {2.2, 1}}));   // n=4, k=3
    cases.push_back(random_grouped(g, {{0.2, 1}, {0.7, 2}, {1.7, 1}, {3.0, 1}}));  // n=5, k=4

    for (const Ellipsoid& e : cases) {
        const SpectrumPartition p = spectrum_partition(e);
        FiberOptions fo;
        int accepted = 0;
        std::uint64_t i = 0;
        while (accepted < 300) {
            std::mt19937_64 rg = rng_for(33, i++);
            const ProjHyperplane gamma(random_unit_vector(rg, e.n()));
            if (!cover_classify(e, p, gamma).accepted) continue;
            const FiberResult f = fiber(e, p, gamma, fo);
            ++accepted;

            // cardinality and strictly decreasing distinct lengths
            REQUIRE(static_cast<int>(f.lines.size()) == p.k() - 1);
            for (std::size_t a = 1; a < f.lines.size(); ++a)
                REQUIRE(f.lines[a - 1].second > f.lines[a].second);
            // pairwise orthogonality and membership in the hyperplane
            for (std::size_t a = 0; a < f.lines.size(); ++a) {
                REQUIRE(std::abs(dot(f.lines[a].first.dir, gamma.normal)) <= 1e-8);
                REQUIRE(is_generic_line(e, f.lines[a].first, p, 1e-9));
                for (std::size_t b = a + 1; b < f.lines.size(); ++b)
                    REQUIRE(std::abs(dot(f.lines[a].first.dir, f.lines[b].first.dir)) <= 1e-8);
            }
            // ground / fiber duality
            for (const auto& [line, len] : f.lines) {
                const ProjHyperplane back = ground(e, line);
                REQUIRE(projective_distance(back, gamma) <= 1e-8);
            }
        }
    }
}

TEST_CASE("fiber lies in the paper's R^k subspace") {
    // cross-check oracle: choose e_i inside V_i (the line orthogonal to
    // Gamma cap V_i when dim V_i > 1), then the fiber must lie in
    // span(e_1..e_k) cap Gamma
    auto g = testutil::test_rng(31);
    const Ellipsoid e = random_grouped(g, {{0.25, 2}, {1.0, 1}, {2.4, 2}});  // n=5, k=3
    const SpectrumPartition p = spectrum_partition(e);

    int checked = 0;
    std::uint64_t i = 0;
    while (checked < 100) {
        std::mt19937_64 rg = rng_for(44, i++);
        const ProjHyperplane gamma(random_unit_vector(rg, 5));
        if (!cover_classify(e, p, gamma).accepted) continue;
        const FiberResult f = fiber(e, p, gamma, {});
        ++checked;

        Mat span_basis(5, p.k());
        for (int gi = 0; gi < p.k(); ++gi) {
            const Mat& basis = p.groups[gi].basis;
            if (basis.cols() == 1) {
                span_basis.set_col(gi, basis.col(0));
            } else {
                // e_i = direction in V_i orthogonal to Gamma cap V_i
                Vec coeff = mat_tvec(basis, gamma.normal);
                span_basis.set_col(gi, normalized(mat_vec(basis, coeff)));
            }
        }
        const Mat proj = projector(span_basis);  // columns are orthonormal across groups
        for (const auto& [line, len] : f.lines) {
            const Vec projected = mat_vec(proj, line.dir);
            REQUIRE(norm(sub(projected, line.dir)) <= 1e-8);
        }
        REQUIRE(static_cast<int>(f.lines.size()) == p.k() - 1);
    }
}

TEST_CASE("track_fiber") {
    const Ellipsoid e = reference_ellipsoid();
    const ProjHyperplane base(Vec{1.0, 1.1, 0.9});

    SECTION("constant path gives the identity") {
        const std::vector<ProjHyperplane> path{base, base, base};
        const MonodromyResult m = track_fiber(e, path);
        REQUIRE(m.closed);
        REQUIRE(m.permutation == std::vector<int>{0, 1});
        REQUIRE(m.max_step_jump <= 1e-12);
    }
    SECTION("small contractible loops give the identity") {
        auto g = testutil::test_rng(51);
        for (int rep = 0; rep < 25; ++rep) {
            const Vec n0 = testutil::random_unit(g, 3);
            ProjHyperplane center(n0);
            const SpectrumPartition p = spectrum_partition(e);
            if (hyperplane_genericity(center, p) < 0.05) continue;
            const auto path = chart_loop(center, 0.01, 12);
            const MonodromyResult m = track_fiber(e, path);
            REQUIRE(m.closed);
            for (std::size_t i = 0; i < m.permutation.size(); ++i)
                REQUIRE(m.permutation[i] == static_cast<int>(i));
        }
    }
    SECTION("reverse path composes to the identity") {
        auto g = testutil::test_rng(52);
        const SpectrumPartition p = spectrum_partition(e);
        int done = 0;
        while (done < 25) {
            const Vec n0 = testutil::random_unit(g, 3);
            const Vec n1 = testutil::random_unit(g, 3);
            ProjHyperplane a(n0), b(n1);
            if (hyperplane_genericity(a, p) < 0.05 || hyperplane_genericity(b, p) < 0.05)
                continue;
            // geodesic-ish interpolation with sign alignment
            Vec bn = b.normal;
            if (dot(a.normal, bn) < 0)
                for (double& x : bn) x = -x;
            std::vector<ProjHyperplane> path;
            const int steps = 40;
            bool generic_path = true;
            for (int s = 0; s <= steps; ++s) {
                Vec w(3);
                for (int i = 0; i < 3; ++i)
                    w[i] = a.normal[i] + (bn[i] - a.normal[i]) * s / steps;
                if (norm(w) < 1e-6) {
                    generic_path = false;
                    break;
                }
                ProjHyperplane hp(w);
                if (hyperplane_genericity(hp, p) < 5e-3) {
                    generic_path = false;
                    break;
                }
                path.emplace_back(std::move(hp));
            }
            if (!generic_path) continue;
            ++done;
            std::vector<ProjHyperplane> round = path;
            for (auto it = path.rbegin() + 1; it != path.rend(); ++it) round.push_back(*it);
            const MonodromyResult m = track_fiber(e, round);
            REQUIRE(m.closed);
            for (std::size_t i = 0; i < m.permutation.size(); ++i)
                REQUIRE(m.permutation[i] == static_cast<int>(i));
        }
    }
    SECTION("loop around the non-generic locus: permutation stable under refinement") {
        // encircle the point where the circle {n_z = 0} meets the base cell
        const auto path = chart_loop(base, 0.35, 48);
        bool generic = true;
        const SpectrumPartition p = spectrum_partition(e);
        for (const auto& w : path)
            if (hyperplane_genericity(w, p) < 1e-4) generic = false;
        if (generic) {
            const MonodromyResult coarse = track_fiber(e, path);
            const auto path2 = chart_loop(base, 0.35, 96);
            const MonodromyResult fine = track_fiber(e, path2);
            REQUIRE(coarse.permutation == fine.permutation);
        }
    }
    SECTION("waypoints too far apart") {
        std::vector<ProjHyperplane> path{ProjHyperplane(Vec{1.0, 0.3, 0.4}),
                                         ProjHyperplane(Vec{0.2, 1.0, -0.7})};
        REQUIRE_THROWS_AS(track_fiber(e, path), StepTooLarge);
    }
    SECTION("non-generic waypoint rejected") {
        // second waypoint sits on the non-generic locus (zero third component)
        std::vector<ProjHyperplane> path{ProjHyperplane(Vec{1.0, 1.1, 0.05}),
                                         ProjHyperplane(Vec{1.0, 1.1, 0.0})};
        REQUIRE_THROWS_AS(track_fiber(e, path), ContractViolation);
    }
}
