#include <catch2/catch_amalgamated.hpp>

#include "hamreeb/area_form.hpp"
#include "hamreeb/builtins.hpp"
#include "hamreeb/mesh.hpp"
#include "hamreeb/quadrature.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

using namespace hamreeb;

namespace {

// Independent oracle: flood-fill component count of {g <= level} on a fine
// grid, never touching the mesh machinery.
int grid_component_count(const std::function<double(Vec2)>& g, double level,
                         std::array<double, 4> box, int n) {
    std::vector<int> label((size_t)n * n, -1);
    auto idx = [n](int i, int j) { return (size_t)j * n + i; };
    auto pos = [&](int i, int j) {
        return Vec2{box[0] + (box[1] - box[0]) * (i + 0.5) / n,
                    box[2] + (box[3] - box[2]) * (j + 0.5) / n};
    };
    int comps = 0;
    std::vector<std::pair<int, int>> stack;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (label[idx(i, j)] >= 0 || g(pos(i, j)) > level) continue;
            ++comps;
            stack.push_back({i, j});
            label[idx(i, j)] = comps;
            while (!stack.empty()) {
                auto [a, b] = stack.back();
                stack.pop_back();
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int aa = a + di[k], bb = b + dj[k];
                    if (aa < 0 || bb < 0 || aa >= n || bb >= n) continue;
                    if (label[idx(aa, bb)] >= 0 || g(pos(aa, bb)) > level) continue;
                    label[idx(aa, bb)] = comps;
                    stack.push_back({aa, bb});
                }
            }
        }
    return comps;
}

double mc_area(const std::function<bool(Vec2)>& inside, std::array<double, 4> box, int n,
               uint64_t seed) {
    Rng rng(seed);
    int hits = 0;
    for (int i = 0; i < n; ++i)
        if (inside({uniform(rng, box[0], box[1]), uniform(rng, box[2], box[3])})) ++hits;
    return (box[1] - box[0]) * (box[3] - box[2]) * hits / n;
}

}  // namespace

TEST_CASE("model surfaces satisfy their construction contracts") {
    auto disk = builtins::surface("disk");
    REQUIRE(disk->charts.size() == 1);
    REQUIRE(disk->boundary.size() == 1);

    auto torus = builtins::surface("torus");
    REQUIRE(torus->boundary.empty());
    REQUIRE(torus->charts[0].period_x() == 1.0);
    REQUIRE(torus->charts[0].period_y() == 1.0);

    auto tw = builtins::surface("twowell");
    REQUIRE(tw->boundary.size() == 1);  // D = g^{-1}[0,2] is a topological disk
    // boundary polyline sits on the exact level curve
    const auto& g = *tw->params.g;
    for (int i = 0; i < 64; ++i) {
        const Vec2 p = tw->boundary[0].curve(i / 64.0);
        REQUIRE(std::abs(g.value({0, p}) - 2.0) < 1e-10);
    }

    SECTION("invalid parameters are rejected") {
        SurfaceParams bad;
        bad.radius = -1;
        REQUIRE_THROWS_AS(make_model_surface(SurfaceKind::Disk, bad), std::invalid_argument);
        SurfaceParams torus_bad;
        torus_bad.period_x = 0;
        REQUIRE_THROWS_AS(make_model_surface(SurfaceKind::FlatTorus, torus_bad),
                          std::invalid_argument);
    }

    SECTION("critical level boundary violates Axiom (B)") {
        SurfaceParams p;
        p.g = std::make_shared<ScalarField>(builtins::field("twowell", *tw));
        p.level = 1.0;  // the saddle value: g^{-1}(1) passes through the critical point
        p.bbox = {-2, 2, -1.5, 1.5};
        REQUIRE_THROWS(make_model_surface(SurfaceKind::PlanarSublevel, p));
    }
}

TEST_CASE("triangulation: topology, edge length bound, determinism") {
    auto disk = builtins::surface("disk");
    auto m = triangulate(disk, 0.5);
    CHECK(m.euler_characteristic() == 1);
    CHECK(m.boundary_loop_count() == 1);

    auto torus = builtins::surface("torus");
    auto mt = triangulate(torus, 0.1);
    CHECK(mt.euler_characteristic() == 0);
    CHECK(mt.boundary_edge_count() == 0);

    auto sphere = builtins::surface("sphere");
    auto ms = triangulate(sphere, 0.1);
    CHECK(ms.euler_characteristic() == 2);
    CHECK(ms.boundary_edge_count() == 0);

    SECTION("max edge length stays within 1.5x resolution") {
        auto fine = triangulate(disk, 0.1);
        double longest = 0;
        for (int t = 0; t < fine.triangle_count(); ++t)
            for (int k = 0; k < 3; ++k)
                longest = std::max(
                    longest, (fine.tri_coords[t][(k + 1) % 3] - fine.tri_coords[t][k]).norm());
        CHECK(longest <= 1.5 * 0.1);
    }

    SECTION("deterministic given (surface, resolution)") {
        auto a = triangulate(disk, 0.23);
        auto b = triangulate(disk, 0.23);
        REQUIRE(a.vertices.size() == b.vertices.size());
        REQUIRE(a.triangles == b.triangles);
        for (size_t i = 0; i < a.vertices.size(); ++i) {
            REQUIRE(a.vertices[i].p.x == b.vertices[i].p.x);
            REQUIRE(a.vertices[i].p.y == b.vertices[i].p.y);
        }
    }

    SECTION("triangle orientation sign is uniform") {
        for (int t = 0; t < ms.triangle_count(); ++t) REQUIRE(ms.tri_area(t) > 0);
    }

    SECTION("too-coarse resolution cannot separate landmarks") {
        auto tw = builtins::surface("twowell");
        REQUIRE_THROWS_AS(triangulate(tw, 0.5), std::invalid_argument);
    }
}

TEST_CASE("two-well domain mesh vs flood-fill oracle") {
    auto tw = builtins::surface("twowell");
    auto m = triangulate(tw, 0.05);
    // oracle: one component, disk topology
    const auto& gf = *tw->params.g;
    auto g = [&gf](Vec2 p) { return gf.value({0, p}); };
    CHECK(grid_component_count(g, 2.0, {-2, 2, -1.5, 1.5}, 400) == 1);
    CHECK(m.euler_characteristic() == 1);
    CHECK(m.boundary_loop_count() == 1);
    // sublevel of the saddle value splits in two; above it reconnects
    CHECK(grid_component_count(g, 0.5, {-2, 2, -1.5, 1.5}, 400) == 2);
    CHECK(grid_component_count(g, 1.5, {-2, 2, -1.5, 1.5}, 400) == 1);
}

TEST_CASE("integrate_density: areas, linearity, convergence") {
    auto disk = builtins::surface("disk");
    auto m = triangulate(disk, 0.05);
    const auto one = make_constant_form(1.0);
    const auto two = make_constant_form(2.0);
    CHECK_THAT(surface_area(m, one), Catch::Matchers::WithinRel(kPi, 0.02));
    CHECK_THAT(surface_area(m, two), Catch::Matchers::WithinRel(2 * kPi, 0.02));

    SECTION("area within 2% at resolution 0.01") {
        auto fine = triangulate(disk, 0.01);
        CHECK_THAT(surface_area(fine, one), Catch::Matchers::WithinRel(kPi, 0.02));
    }

    SECTION("second-order convergence in resolution") {
        const double e1 = std::abs(surface_area(triangulate(disk, 0.1), one) - kPi);
        const double e2 = std::abs(surface_area(triangulate(disk, 0.05), one) - kPi);
        CHECK(e1 / e2 > 2.5);  // ~4 for a second-order rule
    }

    SECTION("torus and sphere total area") {
        auto torus = builtins::surface("torus");
        CHECK_THAT(surface_area(triangulate(torus, 0.05), one),
                   Catch::Matchers::WithinRel(1.0, 1e-9));
        auto sphere = builtins::surface("sphere");
        const auto round_form = builtins::form("standard", *sphere);
        CHECK_THAT(surface_area(triangulate(sphere, 0.04), round_form),
                   Catch::Matchers::WithinRel(4 * kPi, 0.02));
    }

    SECTION("empty mesh is an error") {
        TriMesh empty;
        empty.surface = disk;
        REQUIRE_THROWS_AS(integrate_density(empty, one, Region::whole()), std::invalid_argument);
    }
}

TEST_CASE("integrate_density is additive over disjoint bands") {
    auto disk = builtins::surface("disk");
    auto m = triangulate(disk, 0.05);
    sample_field(m, builtins::field("r2", *disk));
    const auto form = make_analytic_form([](Vec2 p) { return 1.0 + p.x / 3 + p.norm2(); });
    const double a = integrate_density(m, form, Region::sublevel(0.3));
    const double b = integrate_density(m, form, Region::band(0.3, 0.6));
    const double ab = integrate_density(m, form, Region::sublevel(0.6));
    CHECK(std::abs(a + b - ab) <= 1e-12 * (std::abs(a) + std::abs(b)));
}

TEST_CASE("two-well sublevel halves: symmetry and Monte-Carlo oracle") {
    auto tw = builtins::surface("twowell");
    auto m = triangulate(tw, 0.02);
    sample_field(m, builtins::field("twowell", *tw));
    const auto one = make_constant_form(1.0);
    const auto& gf = *tw->params.g;

    auto half = [&](int sign) {
        Region r = Region::sublevel(0.5);
        r.tri_filter = [&m, sign](int t) { return sign * m.tri_centroid(t).x > 0; };
        return integrate_density(m, one, r);
    };
    const double right = half(+1), left = half(-1);
    CHECK(std::abs(right - left) / std::max(right, left) < 0.01);

    const double mc = mc_area(
        [&gf](Vec2 p) { return gf.value({0, p}) <= 0.5 && p.x > 0; }, {-2, 2, -1.5, 1.5},
        1'000'000, 20240u);
    CHECK_THAT(right, Catch::Matchers::WithinRel(mc, 0.02));

    SECTION("involution image has the same area (unit Jacobian)") {
        // d(x,y) = (-x,-y) maps the right half onto the left
        Region img = Region::sublevel(0.5);
        img.tri_filter = [&m](int t) { return -m.tri_centroid(t).x > 0; };
        CHECK(std::abs(integrate_density(m, one, img) - right) / right < 0.01);
    }
}

TEST_CASE("sphere chart compatibility: density and transition Jacobians") {
    auto sphere = builtins::surface("sphere");
    const auto round_form = builtins::form("standard", *sphere);
    CHECK(density_compatibility_residual(*sphere, round_form, 100, 11) < 1e-9);

    SECTION("transition is an orientation-preserving involution") {
        Rng rng(5);
        for (int i = 0; i < 50; ++i) {
            Vec2 p = uniform_in_disk(rng, 1.2);
            if (p.norm() < 0.8) continue;  // stay in the overlap band
            const auto& t = sphere->transitions[0];
            const Vec2 q = t.map(p);
            CHECK((t.map(q) - p).norm() < 1e-12);
            CHECK(t.jacobian(p).det() > 0);
        }
    }
}

TEST_CASE("point location on all surface kinds") {
    Rng rng(99);
    for (const char* name : {"disk", "annulus", "torus", "sphere", "twowell"}) {
        auto s = builtins::surface(name);
        auto m = triangulate(s, 0.05);
        auto pts = random_surface_points(*s, 100, rng, 0.02);
        for (const auto& z : pts) {
            const int t = m.locate(z);
            REQUIRE(t >= 0);
            REQUIRE(m.point_in_triangle(t, z.chart == m.tri_chart[t]
                                               ? z.p
                                               : s->to_chart(z, m.tri_chart[t])->p,
                                        1e-6));
        }
    }
}
