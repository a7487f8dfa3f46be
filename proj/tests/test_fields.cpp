#include <catch2/catch_amalgamated.hpp>

#include "hamreeb/axioms.hpp"
#include "hamreeb/builtins.hpp"
#include "hamreeb/critical_points.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

using namespace hamreeb;

TEST_CASE("finite-difference gradients converge at second order") {
    auto disk = builtins::surface("disk");
    const auto f = builtins::field("twowell", *disk);  // polynomial, analytic closures
    ScalarField fd = f;
    for (auto& cf : fd.charts) cf.grad = nullptr;

    Rng rng(3);
    auto pts = random_surface_points(*disk, 100, rng, 0.1);
    auto max_err = [&](double h) {
        ScalarField g = fd;
        g.fd_step = h;
        double worst = 0;
        for (const auto& z : pts) worst = std::max(worst, (g.gradient(z) - f.gradient(z)).norm());
        return worst;
    };
    const double e1 = max_err(1e-3), e2 = max_err(5e-4);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("critical points of the model fields") {
    SECTION("paraboloid on the disk") {
        auto disk = builtins::surface("disk");
        auto crit = find_critical_points(builtins::field("r2", *disk), *disk, 0.3, 1e-8);
        REQUIRE(crit.size() == 1);
        CHECK(crit[0].kind == CriticalKind::NondegMin);
        CHECK(crit[0].position.p.norm() < 1e-10);
        CHECK(crit[0].value < 1e-12);
        CHECK(crit[0].grad_norm < 1e-8);
    }

    SECTION("two-well: one saddle at value 1, two minima at value 0") {
        auto tw = builtins::surface("twowell");
        auto crit = find_critical_points(builtins::field("twowell", *tw), *tw, 0.2, 1e-9);
        REQUIRE(crit.size() == 3);
        // sorted by value: minima first
        CHECK(crit[0].kind == CriticalKind::NondegMin);
        CHECK(crit[1].kind == CriticalKind::NondegMin);
        CHECK(crit[2].kind == CriticalKind::NondegSaddle);
        CHECK(std::abs(crit[0].value) < 1e-12);
        CHECK(std::abs(crit[2].value - 1.0) < 1e-12);
        CHECK(std::abs(std::abs(crit[0].position.p.x) - 1.0) < 1e-9);
        CHECK(crit[2].position.p.norm() < 1e-9);
    }

    SECTION("degenerate |z|^4: vanishing Hessian, unclassified") {
        auto disk = builtins::surface("disk");
        const auto r4 = builtins::field("r4", *disk);
        auto crit = find_critical_points(r4, *disk, 0.3, 1e-8);
        REQUIRE(crit.size() == 1);
        // a degree-4 zero of the gradient is localizable only to ~tol^(1/3)
        CHECK(crit[0].position.p.norm() < 1e-2);
        CHECK(crit[0].kind == CriticalKind::Unclassified);
        // oracle: Hess of (x^2+y^2)^2 at 0 vanishes identically
        CHECK(std::abs(r4.hessian({0, {0, 0}}).frobenius_norm()) < 1e-12);

        // declared model with degree 4: recognized, but the attestation
        // decides Axiom (L) below
        ScalarField declared = r4;
        declared.declared.push_back({{0, {0, 0}}, 4, false, std::nullopt});
        auto crit2 = find_critical_points(declared, *disk, 0.3, 1e-8);
        REQUIRE(crit2.size() == 1);
        CHECK(crit2[0].kind == CriticalKind::DeclaredHomogeneous);
        CHECK(crit2[0].declared_degree == 4);
    }

    SECTION("all returned points satisfy the gradient tolerance") {
        auto torus = builtins::surface("torus");
        const auto f = builtins::field("torus-height", *torus);
        auto crit = find_critical_points(f, *torus, 0.11, 1e-9);
        REQUIRE(crit.size() == 4);
        for (const auto& cp : crit) CHECK(f.gradient(cp.position).norm() < 1e-9);
    }
}

TEST_CASE("classification is invariant under chart rotation") {
    auto disk = builtins::surface("disk");
    const auto f = builtins::field("twowell", *disk);
    const double ang = 0.7;
    const Mat2 rot = Mat2::rotation(ang), inv = Mat2::rotation(-ang);
    ScalarField rotated = make_analytic_field(
        [f, inv](Vec2 p) { return f.charts[0].value(inv.apply(p)); },
        [f, inv, rot](Vec2 p) { return rot.apply(f.charts[0].grad(inv.apply(p))); });

    auto base = find_critical_points(f, *disk, 0.15, 1e-8);
    auto rot_crit = find_critical_points(rotated, *disk, 0.15, 1e-8);
    REQUIRE(base.size() == rot_crit.size());
    auto kinds = [](const std::vector<CriticalPoint>& v) {
        std::vector<int> k;
        for (const auto& c : v) k.push_back((int)c.kind);
        std::sort(k.begin(), k.end());
        return k;
    };
    CHECK(kinds(base) == kinds(rot_crit));
}

TEST_CASE("Morse counting matches the Euler characteristic") {
    auto torus = builtins::surface("torus");
    auto ct = find_critical_points(builtins::field("torus-height", *torus), *torus, 0.11, 1e-9);
    int mins = 0, maxs = 0, saddles = 0;
    for (const auto& c : ct) {
        mins += c.kind == CriticalKind::NondegMin;
        maxs += c.kind == CriticalKind::NondegMax;
        saddles += c.kind == CriticalKind::NondegSaddle;
    }
    CHECK(mins == 1);
    CHECK(maxs == 1);
    CHECK(saddles == 2);
    CHECK(mins - saddles + maxs == 0);

    auto sphere = builtins::surface("sphere");
    auto cs = find_critical_points(builtins::field("height", *sphere), *sphere, 0.3, 1e-8);
    int smins = 0, smaxs = 0, ssad = 0;
    for (const auto& c : cs) {
        smins += c.kind == CriticalKind::NondegMin;
        smaxs += c.kind == CriticalKind::NondegMax;
        ssad += c.kind == CriticalKind::NondegSaddle;
    }
    CHECK(smins - ssad + smaxs == 2);
    CHECK(cs.size() == 2);
}

TEST_CASE("axioms and class membership") {
    auto disk = builtins::surface("disk");

    SECTION("r2 is Morse on the disk") {
        const auto f = builtins::field("r2", *disk);
        auto crit = find_critical_points(f, *disk, 0.3, 1e-8);
        auto rep = check_axioms(f, *disk, crit);
        CHECK(rep.axiom_b_ok);
        CHECK(rep.in_class_F);
        CHECK(rep.in_class_Morse);
        CHECK(homotopy_case(f, *disk, rep, crit) == HomotopyType::CircleB);
    }

    SECTION("r4 is not in F: multiple factors") {
        const auto g = builtins::field("r4", *disk);
        auto crit = find_critical_points(g, *disk, 0.3, 1e-8);
        auto rep = check_axioms(g, *disk, crit);
        CHECK(rep.axiom_b_ok);  // constant 1 on the boundary
        CHECK_FALSE(rep.axiom_l_ok);
        CHECK_FALSE(rep.in_class_F);
        CHECK_FALSE(rep.in_class_Morse);
        REQUIRE_THROWS_AS(homotopy_case(g, *disk, rep, crit), std::invalid_argument);

        // a declaration without the square-free attestation does not help:
        // (x^2+y^2)^2 has multiple factors and cannot be attested
        ScalarField declared = g;
        declared.declared.push_back({{0, {0, 0}}, 4, false, std::nullopt});
        auto crit2 = find_critical_points(declared, *disk, 0.3, 1e-8);
        auto rep2 = check_axioms(declared, *disk, crit2);
        CHECK_FALSE(rep2.in_class_F);
    }

    SECTION("in_class_Morse implies in_class_F") {
        for (const char* sn : {"disk", "twowell", "torus"}) {
            auto s = builtins::surface(sn);
            const char* fn = std::string(sn) == "disk"
                                 ? "r2"
                                 : (std::string(sn) == "twowell" ? "twowell" : "torus-height");
            const auto f = builtins::field(fn, *s);
            auto crit = find_critical_points(f, *s, 0.12, 1e-8);
            auto rep = check_axioms(f, *s, crit);
            if (rep.in_class_Morse) CHECK(rep.in_class_F);
        }
    }
}

TEST_CASE("homotopy case covers the four circle types") {
    // (A) sphere with two nondegenerate extremes
    auto sphere = builtins::surface("sphere");
    const auto h = builtins::field("height", *sphere);
    auto ch = find_critical_points(h, *sphere, 0.3, 1e-8);
    CHECK(homotopy_case(h, *sphere, check_axioms(h, *sphere, ch), ch) == HomotopyType::CircleA);

    // (C) annulus without critical points
    auto ann = builtins::surface("annulus");
    const auto a = builtins::field("angular", *ann);
    auto ca = find_critical_points(a, *ann, 0.3, 1e-8);
    CHECK(ca.empty());
    CHECK(homotopy_case(a, *ann, check_axioms(a, *ann, ca), ca) == HomotopyType::CircleC);

    // (D) torus with a circle-valued submersion
    auto torus = builtins::surface("torus");
    const auto ang = builtins::field("angular", *torus);
    auto cd = find_critical_points(ang, *torus, 0.3, 1e-8);
    CHECK(cd.empty());
    CHECK(homotopy_case(ang, *torus, check_axioms(ang, *torus, cd), cd) == HomotopyType::CircleD);

    // saddle-bearing field: contractible
    auto tw = builtins::surface("twowell");
    const auto g = builtins::field("twowell", *tw);
    auto cg = find_critical_points(g, *tw, 0.2, 1e-9);
    CHECK(homotopy_case(g, *tw, check_axioms(g, *tw, cg), cg) == HomotopyType::Contractible);
}

TEST_CASE("field values agree across sphere chart overlaps") {
    auto sphere = builtins::surface("sphere");
    const auto f = builtins::field("height", *sphere);
    Rng rng(17);
    double worst = 0;
    int n = 0;
    while (n < 100) {
        const Vec2 p = uniform_in_disk(rng, 1.2);
        if (p.norm() < 0.83) continue;
        ++n;
        const auto q = sphere->to_chart({0, p}, 1);
        REQUIRE(q.has_value());
        worst = std::max(worst, std::abs(f.value({0, p}) - f.value(*q)));
    }
    CHECK(worst < 1e-9);
}
