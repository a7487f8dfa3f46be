#include <catch2/catch_amalgamated.hpp>

#include "hamreeb/builtins.hpp"
#include "hamreeb/critical_points.hpp"
#include "hamreeb/hamiltonian_like.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/vector_field.hpp"

using namespace hamreeb;

TEST_CASE("hamiltonian_field chart formula") {
    auto disk = builtins::surface("disk");
    const auto one = make_constant_form(1.0);

    SECTION("f = x^2 + y^2 gives (-2y, 2x)") {
        const auto F = hamiltonian_field(builtins::field("r2", *disk), one);
        Rng rng(1);
        for (const auto& z : random_surface_points(*disk, 200, rng)) {
            const Vec2 got = F.value(z);
            CHECK(std::abs(got.x + 2 * z.p.y) < 1e-12);
            CHECK(std::abs(got.y - 2 * z.p.x) < 1e-12);
        }
    }

    SECTION("g = |z|^4 gives 2(x^2+y^2) (-2y, 2x)") {
        const auto G = hamiltonian_field(builtins::field("r4", *disk), one);
        Rng rng(2);
        for (const auto& z : random_surface_points(*disk, 100, rng)) {
            const double s = 2 * z.p.norm2();
            CHECK((G.value(z) - Vec2{-2 * z.p.y, 2 * z.p.x} * s).norm() < 1e-12);
        }
    }

    SECTION("f = x gives (0, 1); solved by hand from df(u) = omega(u, H)") {
        Poly2 fx;
        fx.terms = {{1, 0, 1.0}};
        const auto H = hamiltonian_field(make_polynomial_field(fx), one);
        CHECK((H.value({0, {0.3, -0.2}}) - Vec2{0, 1}).norm() < 1e-14);
    }

    SECTION("density scales the field: gamma=2 halves it") {
        const auto H = hamiltonian_field(builtins::field("r2", *disk), make_constant_form(2.0));
        CHECK((H.value({0, {0.5, 0}}) - Vec2{0, 0.5}).norm() < 1e-14);
    }

    SECTION("zeros coincide with critical points") {
        auto tw = builtins::surface("twowell");
        const auto f = builtins::field("twowell", *tw);
        const auto H = hamiltonian_field(f, make_constant_form(1.0));
        for (const auto& cp : find_critical_points(f, *tw, 0.2, 1e-9))
            CHECK(H.value(cp.position).norm() < 1e-8);
    }
}

TEST_CASE("poisson bracket") {
    auto disk = builtins::surface("disk");
    const auto one = make_constant_form(1.0);
    Poly2 px, py;
    px.terms = {{1, 0, 1.0}};
    py.terms = {{0, 1, 1.0}};
    const auto X = make_polynomial_field(px), Y = make_polynomial_field(py);

    SECTION("{x, y} = 1 (hand oracle: H_x = (0,1), H_y = (-1,0))") {
        const auto b = poisson_bracket(X, Y, one);
        Rng rng(3);
        for (const auto& z : random_surface_points(*disk, 50, rng))
            CHECK(std::abs(b.value(z) - 1.0) < 1e-12);
    }

    SECTION("{f, f} = 0") {
        const auto f = builtins::field("twowell", *disk);
        const auto b = poisson_bracket(f, f, one);
        Rng rng(4);
        for (const auto& z : random_surface_points(*disk, 50, rng))
            CHECK(std::abs(b.value(z)) < 1e-12);
    }

    SECTION("antisymmetry at random points") {
        const auto f = builtins::field("r2", *disk);
        const auto g = builtins::field("twowell", *disk);
        const auto fg = poisson_bracket(f, g, one);
        const auto gf = poisson_bracket(g, f, one);
        Rng rng(5);
        for (const auto& z : random_surface_points(*disk, 100, rng))
            CHECK(std::abs(fg.value(z) + gf.value(z)) < 1e-10);
    }

    SECTION("Leibniz: {f, g h} = g {f, h} + h {f, g}") {
        const auto f = builtins::field("r2", *disk);
        const auto g = builtins::field("twowell", *disk);
        const auto h = make_polynomial_field([] {
            Poly2 p;
            p.terms = {{1, 1, 1.0}, {0, 0, 0.5}};
            return p;
        }());
        const auto lhs = poisson_bracket(f, field_product(g, h), one);
        const auto fh = poisson_bracket(f, h, one);
        const auto fg = poisson_bracket(f, g, one);
        Rng rng(6);
        for (const auto& z : random_surface_points(*disk, 100, rng)) {
            const double rhs = g.value(z) * fh.value(z) + h.value(z) * fg.value(z);
            CHECK(std::abs(lhs.value(z) - rhs) < 1e-8);
        }
    }
}

TEST_CASE("hamiltonian-like verification") {
    auto disk = builtins::surface("disk");
    const auto f = builtins::field("r2", *disk);
    const auto crit = find_critical_points(f, *disk, 0.3, 1e-8);

    SECTION("the exact field passes (a), (b), (c)") {
        const auto V = make_analytic_vector_field([](Vec2 p) { return Vec2{-2 * p.y, 2 * p.x}; });
        const auto rep = is_hamiltonian_like(*disk, V, f, crit);
        CHECK(rep.a_annihilates_f);
        CHECK(rep.b_zeros_match);
        CHECK(rep.c_local_form == HamiltonianLikeReport::LocalForm::Pass);
        CHECK(rep.passed());
    }

    SECTION("a smooth rescaling passes (a), (b) but breaks the exact local form") {
        const auto V = make_analytic_vector_field([](Vec2 p) {
            const double s = 1 + p.x * p.x / 10;
            return Vec2{-2 * p.y * s, 2 * p.x * s};
        });
        const auto rep = is_hamiltonian_like(*disk, V, f, crit);
        CHECK(rep.a_annihilates_f);
        CHECK(rep.b_zeros_match);
        CHECK(rep.c_local_form == HamiltonianLikeReport::LocalForm::Fail);
        // the mismatch does not vanish at the sampled radii
        CHECK(rep.max_local_residual > 1e-5);
    }

    SECTION("the zero field fails (b)") {
        const auto V = make_analytic_vector_field([](Vec2) { return Vec2{0, 0}; });
        const auto rep = is_hamiltonian_like(*disk, V, f, crit);
        CHECK_FALSE(rep.b_zeros_match);
    }

    SECTION("degenerate point without declared model is unverifiable") {
        const auto g = builtins::field("r4", *disk);
        const auto cg = find_critical_points(g, *disk, 0.3, 1e-8);
        const auto V = make_analytic_vector_field([](Vec2 p) {
            const double s = 2 * p.norm2();
            return Vec2{-2 * p.y * s, 2 * p.x * s};
        });
        const auto rep = is_hamiltonian_like(*disk, V, g, cg);
        CHECK(rep.c_local_form == HamiltonianLikeReport::LocalForm::Unverifiable);
    }
}

TEST_CASE("lambda and mu ratios") {
    auto disk = builtins::surface("disk");
    const auto f = builtins::field("r2", *disk);
    const auto crit = find_critical_points(f, *disk, 0.3, 1e-8);
    const auto F_like = make_analytic_vector_field([](Vec2 p) { return Vec2{-2 * p.y, 2 * p.x}; });

    SECTION("identical fields: lambda = 1") {
        const auto H = hamiltonian_field(f, make_constant_form(1.0));
        const auto lam = lambda_ratio(disk, H, F_like, crit);
        Rng rng(7);
        for (const auto& z : random_surface_points(*disk, 50, rng))
            CHECK(std::abs(lam.value(z) - 1.0) < 1e-12);
        CHECK(std::abs(lam.value(crit[0].position) - 1.0) < 1e-12);  // 1/gamma at the zero
    }

    SECTION("gamma = 2: lambda = 1/2 everywhere including the critical point") {
        const auto H = hamiltonian_field(f, make_constant_form(2.0));
        const auto lam = lambda_ratio(disk, H, F_like, crit);
        Rng rng(8);
        for (const auto& z : random_surface_points(*disk, 50, rng))
            CHECK(std::abs(lam.value(z) - 0.5) < 1e-12);
        CHECK(std::abs(lam.value(crit[0].position) - 0.5) < 1e-12);
    }

    SECTION("mu ratio of two parallel fields: mu(0.5, 0) = 0.8") {
        const auto H = hamiltonian_field(f, make_constant_form(1.0));
        const auto F2 = make_analytic_vector_field([](Vec2 p) {
            const double s = 1 + p.x * p.x;
            return Vec2{-2 * p.y * s, 2 * p.x * s};
        });
        const auto mu = mu_ratio(disk, H, F_like, F2, crit);
        CHECK_THAT(mu.value({0, {0.5, 0}}), Catch::Matchers::WithinAbs(0.8, 1e-10));
        // F1 = mu F2 pointwise
        Rng rng(9);
        for (const auto& z : random_surface_points(*disk, 50, rng))
            CHECK((F_like.value(z) - F2.value(z) * mu.value(z)).norm() < 1e-10);
    }

    SECTION("non-parallel fields are rejected") {
        const auto H = hamiltonian_field(f, make_constant_form(1.0));
        const auto skew = make_analytic_vector_field([](Vec2 p) { return Vec2{p.x + 1, p.y}; });
        REQUIRE_THROWS(lambda_ratio(disk, H, skew, crit));
    }
}

TEST_CASE("vector field pushforward consistency on the sphere") {
    auto sphere = builtins::surface("sphere");
    const auto h = builtins::field("height", *sphere);
    const auto H = hamiltonian_field(h, builtins::form("standard", *sphere));
    CHECK(vector_field_overlap_residual(*sphere, H, 100, 31) < 1e-8);
}
