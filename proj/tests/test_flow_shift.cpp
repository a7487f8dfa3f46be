#include <catch2/catch_amalgamated.hpp>

#include "hamreeb/builtins.hpp"
#include "hamreeb/flow.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/shift_map.hpp"
#include "hamreeb/vector_field.hpp"

using namespace hamreeb;

namespace {

PlanarVectorField disk_rotation_field(const std::shared_ptr<const SurfaceModel>& disk) {
    return hamiltonian_field(builtins::field("r2", *disk), make_constant_form(1.0));
}

Vec2 closed_form_rotation(Vec2 z, double t) {  // flow of (-2y, 2x): e^{2it} z
    const double c = std::cos(2 * t), s = std::sin(2 * t);
    return {c * z.x - s * z.y, s * z.x + c * z.y};
}

}  // namespace

TEST_CASE("flow of the disk rotation field matches e^{2it} z") {
    auto disk = builtins::surface("disk");
    const auto F = disk_rotation_field(disk);
    FlowIntegrator integ;

    SECTION("quarter turn from (1,0)") {
        const auto z = flow_point(*disk, F, {0, {1, 0}}, kPi / 4, integ);
        CHECK((z.p - Vec2{0, 1}).norm() < 1e-9);
    }

    SECTION("t = 0 is the identity; equilibria freeze") {
        const auto z = flow_point(*disk, F, {0, {0.3, 0.4}}, 0.0, integ);
        CHECK((z.p - Vec2{0.3, 0.4}).norm() == 0.0);
        const auto o = flow_point(*disk, F, {0, {0, 0}}, 5.0, integ);
        CHECK(o.p.norm() == 0.0);
        const auto G = hamiltonian_field(builtins::field("r4", *disk), make_constant_form(1.0));
        CHECK(flow_point(*disk, G, {0, {0, 0}}, 2.0, integ).p.norm() == 0.0);
    }

    SECTION("100 random (z, t), |t| <= 10, within 1e-6") {
        Rng rng(42);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const Vec2 z = uniform_in_disk(rng, 0.95);
            const double t = uniform(rng, -10.0, 10.0);
            const auto got = flow_point(*disk, F, {0, z}, t, integ);
            worst = std::max(worst, (got.p - closed_form_rotation(z, t)).norm());
        }
        CHECK(worst < 1e-6);
    }

    SECTION("f is conserved along trajectories") {
        Rng rng(43);
        const auto& f = *F.hamiltonian_of;
        for (int i = 0; i < 20; ++i) {
            const Vec2 z = uniform_in_disk(rng, 0.9);
            const auto traj = flow_trajectory(*disk, F, {0, z}, uniform(rng, -5.0, 5.0), integ);
            for (const auto& s : traj)
                CHECK(std::abs(s.f_value - f.value({0, z})) <= integ.reprojection_tolerance);
        }
    }
}

TEST_CASE("flows on periodic charts and across sphere charts") {
    SECTION("annulus: unit-speed angular flow wraps") {
        auto ann = builtins::surface("annulus");
        const auto H = hamiltonian_field(builtins::field("angular", *ann),
                                         make_constant_form(1.0));
        CHECK((H.value({0, {0.2, 0.5}}) - Vec2{1, 0}).norm() < 1e-14);
        const auto z = flow_point(*ann, H, {0, {0.2, 0.5}}, 2.5, {});
        CHECK(std::abs(z.p.x - 0.7) < 1e-9);
        CHECK(std::abs(z.p.y - 0.5) < 1e-9);
    }

    SECTION("sphere: rotation orbits cross the working-chart threshold") {
        auto sphere = builtins::surface("sphere");
        const auto H =
            hamiltonian_field(builtins::field("height", *sphere), builtins::form("standard", *sphere));
        // H = (-y, x): great-circle rotation with period 2 pi at every radius
        const ChartPoint x{0, {1.15, 0}};  // beyond the switch radius
        const auto& f = *H.hamiltonian_of;
        const auto z = flow_point(*sphere, H, x, 2 * kPi, {});
        CHECK(sphere->distance(z, x) < 1e-6);
        CHECK(std::abs(f.value(z) - f.value(x)) < 1e-9);
    }
}

TEST_CASE("orbit periods") {
    auto disk = builtins::surface("disk");
    const auto F = disk_rotation_field(disk);
    FlowIntegrator integ;

    SECTION("rotation period pi (closed-form oracle)") {
        const auto T = orbit_period(*disk, F, {0, {0.5, 0}}, integ, 1e-6, 20.0);
        REQUIRE(T.has_value());
        CHECK(std::abs(*T - kPi) < 1e-9);
    }

    SECTION("G = 2 r^2 F: period pi / (2 r^2)") {
        const auto G = hamiltonian_field(builtins::field("r4", *disk), make_constant_form(1.0));
        for (const double r : {0.3, 0.5, 0.8}) {
            const auto T = orbit_period(*disk, G, {0, {r, 0}}, integ, 1e-6, 40.0);
            REQUIRE(T.has_value());
            CHECK(std::abs(*T - kPi / (2 * r * r)) / (kPi / (2 * r * r)) < 1e-5);
        }
    }

    SECTION("separatrix orbit of the two-well field is non-periodic") {
        auto tw = builtins::surface("twowell");
        const auto H = hamiltonian_field(builtins::field("twowell", *tw), make_constant_form(1.0));
        // the level through (x, 0) is ((x+1)^2)((x-1)^2) = (x^2-1)^2, equal to
        // the saddle value 1 at x^2 = 2: the separatrix limits to (0,0)
        const ChartPoint x{0, {std::sqrt(2.0), 0.0}};
        const auto T = orbit_period(*tw, H, x, integ, 1e-6, 30.0, {{0, {0.0, 0.0}}});
        CHECK_FALSE(T.has_value());
    }

    SECTION("equilibrium input is an error") {
        REQUIRE_THROWS_AS(orbit_period(*disk, F, {0, {0, 0}}, integ, 1e-6, 5.0),
                          std::invalid_argument);
    }
}

TEST_CASE("sigma reparametrization") {
    auto disk = builtins::surface("disk");
    const auto F = make_analytic_vector_field([](Vec2 p) { return Vec2{-2 * p.y, 2 * p.x}; });
    FlowIntegrator integ;

    SECTION("lambda = 1 is the identity reparametrization") {
        const auto lam = make_constant_field(1.0);
        CHECK(std::abs(sigma_reparametrization(*disk, lam, F, {0, {0.5, 0}}, 1.7, integ) - 1.7) <
              1e-12);
    }

    SECTION("lambda = 2: constant-speed rescaling, sigma = 2 s") {
        const auto lam = make_constant_field(2.0);
        const double s = kPi / 4;
        CHECK(std::abs(sigma_reparametrization(*disk, lam, F, {0, {0.5, 0}}, s, integ) - kPi / 2) <
              1e-10);
        // flow of 2V for time pi/4 equals flow of V for time pi/2
        const auto twoF = scale_vector_field(F, [](Vec2) { return 2.0; });
        const auto a = flow_point(*disk, twoF, {0, {0.5, 0}}, s, integ);
        const auto b = flow_point(*disk, F, {0, {0.5, 0}}, kPi / 2, integ);
        CHECK((a.p - b.p).norm() < 1e-9);
    }

    SECTION("lambda = 2 r^2 links F to G: sigma over a G-period is pi") {
        const auto lam = make_analytic_field([](Vec2 p) { return 2 * p.norm2(); });
        const double sig =
            sigma_reparametrization(*disk, lam, F, {0, {0.5, 0}}, 2 * kPi, integ);
        CHECK(std::abs(sig - kPi) < 1e-9);
    }

    SECTION("the identity Phi_{lambda V}(x, s) = Phi_V(x, sigma(x, s)) at samples") {
        const auto lam = make_analytic_field([](Vec2 p) { return 1.5 + p.x; });
        const auto lamF = scale_vector_field(F, [](Vec2 p) { return 1.5 + p.x; });
        Rng rng(77);
        for (int i = 0; i < 20; ++i) {
            const Vec2 z = uniform_in_disk(rng, 0.8);
            const double s = uniform(rng, -1.0, 1.0);
            const double sig = sigma_reparametrization(*disk, lam, F, {0, z}, s, integ);
            const auto a = flow_point(*disk, lamF, {0, z}, s, integ);
            const auto b = flow_point(*disk, F, {0, z}, sig, integ);
            CHECK((a.p - b.p).norm() < 1e-6);
        }
    }

    SECTION("vanishing lambda on the trajectory aborts") {
        const auto lam = make_analytic_field([](Vec2 p) { return p.x; });
        REQUIRE_THROWS(sigma_reparametrization(*disk, lam, F, {0, {0.0, 0.5}}, 1.0, integ));
    }

    SECTION("gamma(alpha)(x) = sigma(x, alpha(x)) as a field") {
        const auto lam = make_constant_field(2.0);
        const auto alpha = builtins::field("r2", *disk);  // alpha(x) = |x|^2
        const auto g = gamma_of_alpha(disk, lam, F, alpha, integ);
        for (const Vec2 z : {Vec2{0.5, 0.0}, Vec2{0.2, -0.3}})
            CHECK(std::abs(g.value({0, z}) - 2 * z.norm2()) < 1e-10);
    }
}

TEST_CASE("shift maps") {
    auto disk = builtins::surface("disk");
    const auto F = disk_rotation_field(disk);

    SECTION("constant alpha is the flow diffeomorphism") {
        ShiftMap sm{disk, make_constant_field(0.7), F, {}};
        Rng rng(50);
        for (const auto& z : random_surface_points(*disk, 20, rng, 0.05))
            CHECK((shift_apply(sm, z).p - flow_point(*disk, F, z, 0.7, sm.integrator).p).norm() ==
                  0.0);
    }

    SECTION("alpha = f: rotation by the conserved value") {
        ShiftMap sm{disk, builtins::field("r2", *disk), F, {}};
        const auto got = shift_apply(sm, {0, {0.5, 0}});
        CHECK((got.p - closed_form_rotation({0.5, 0}, 0.25)).norm() < 1e-9);
    }

    SECTION("alpha = 0 is the identity") {
        ShiftMap sm{disk, make_constant_field(0.0), F, {}};
        const ChartPoint z{0, {0.3, -0.6}};
        CHECK((shift_apply(sm, z).p - z.p).norm() == 0.0);
    }

    SECTION("shift_as_map samples the map over a grid") {
        // the flow rotates by 2t; t = pi/2 is the half turn z -> -z
        ShiftMap sm{disk, make_constant_field(kPi / 2), F, {}};
        const auto grid = surface_grid_points(*disk, 0.3, 0.05);
        const auto sampled = shift_as_map(sm, grid);
        REQUIRE(sampled.size() == grid.size());
        for (const auto& [x, y] : sampled) CHECK((y.p + x.p).norm() < 1e-9);
    }
}

TEST_CASE("jacobian law of the shift map") {
    auto disk = builtins::surface("disk");
    const auto F = disk_rotation_field(disk);
    Poly2 pxy;
    pxy.terms = {{1, 1, 1.0}};
    const auto alpha = make_polynomial_field(pxy);  // alpha = xy, dalpha(F) = 2(x^2 - y^2)
    FlowIntegrator integ;
    integ.step_size = 2e-4;
    ShiftMap sm{disk, alpha, F, integ};

    SECTION("prediction at alpha = 0 points: 1 + 2(x^2 - y^2)") {
        const auto r = jacobian_det(sm, {0, {0.5, 0}}, 1e-5);
        CHECK(std::abs(r.one_plus_dalpha - 1.5) < 1e-12);
        CHECK(std::abs(r.numeric_det - 1.5) < 1e-4);
        CHECK(r.invertible_predicted);
    }

    SECTION("singular point of the shift map: (0, 1/sqrt 2)") {
        const auto r = jacobian_det(sm, {0, {0.0, 1.0 / std::sqrt(2.0)}}, 1e-5);
        CHECK(std::abs(r.one_plus_dalpha) < 1e-12);
        CHECK(std::abs(r.numeric_det) < 1e-4);
    }

    SECTION("second-order convergence in the stencil step") {
        Rng rng(51);
        double worst_ratio_lo = 1e9, worst_ratio_hi = 0;
        double e1_max = 0;
        for (int i = 0; i < 20; ++i) {
            const Vec2 z = uniform_in_disk(rng, 0.7);
            const auto c1 = jacobian_det(sm, {0, z}, 1e-4);
            const auto c2 = jacobian_det(sm, {0, z}, 5e-5);
            const double e1 = std::abs(c1.numeric_det - c1.predicted);
            const double e2 = std::abs(c2.numeric_det - c2.predicted);
            e1_max = std::max(e1_max, e1);
            if (e1 < 1e-12) continue;  // nothing to resolve
            const double ratio = e1 / e2;
            worst_ratio_lo = std::min(worst_ratio_lo, ratio);
            worst_ratio_hi = std::max(worst_ratio_hi, ratio);
        }
        CHECK(e1_max < 1e-4);
        CHECK(worst_ratio_lo > 3.0);
        CHECK(worst_ratio_hi < 5.0);
    }

    SECTION("constant alpha: determinant 1 (Liouville)") {
        ShiftMap smc{disk, make_constant_field(0.9), F, integ};
        const auto r = jacobian_det(smc, {0, {0.4, 0.2}}, 1e-5);
        CHECK(std::abs(r.one_plus_dalpha - 1.0) < 1e-12);
        CHECK(std::abs(r.numeric_det - 1.0) < 1e-4);
    }
}

TEST_CASE("pullback density ratio") {
    auto disk = builtins::surface("disk");
    Poly2 pxy;
    pxy.terms = {{1, 1, 1.0}};
    const auto alpha = make_polynomial_field(pxy);
    FlowIntegrator integ;
    integ.step_size = 2e-4;

    SECTION("gamma = 1 at (0.5, 0): ratio 1.5") {
        const auto one = make_constant_form(1.0);
        const auto F = hamiltonian_field(builtins::field("r2", *disk), one);
        ShiftMap sm{disk, alpha, F, integ};
        const auto r = pullback_density_ratio(sm, one, {0, {0.5, 0}}, 1e-5);
        CHECK(std::abs(r.ratio - 1.5) < 1e-4);
        CHECK(std::abs(r.predicted - 1.5) < 1e-12);
    }

    SECTION("Liouville with nonconstant gamma: constant shifts give ratio 1") {
        const auto w = make_analytic_form([](Vec2 p) { return 1 + p.x * p.x / 2; });
        const auto F = hamiltonian_field(builtins::field("r2", *disk), w);
        Rng rng(52);
        for (int i = 0; i < 50; ++i) {
            const Vec2 z = uniform_in_disk(rng, 0.8);
            ShiftMap sm{disk, make_constant_field(uniform(rng, -2.0, 2.0)), F, integ};
            const auto r = pullback_density_ratio(sm, w, {0, z}, 1e-5);
            CHECK(std::abs(r.ratio - 1.0) < 1e-5);
        }
    }

    SECTION("pullback law for several (alpha, gamma) pairs") {
        std::vector<std::function<double(Vec2)>> gammas = {
            [](Vec2) { return 1.0; },
            [](Vec2 p) { return 1 + p.x * p.x / 2; },
            [](Vec2 p) { return 1 + p.x / 2; },
            [](Vec2 p) { return 1 + p.norm2() / 2; },
            [](Vec2 p) { return 2 + std::sin(p.x); },
        };
        Poly2 p2;
        p2.terms = {{2, 0, 0.3}, {0, 1, 0.2}};
        std::vector<ScalarField> alphas = {alpha, make_polynomial_field(p2)};
        Rng rng(53);
        for (size_t i = 0; i < gammas.size(); ++i) {
            const auto w = make_analytic_form(gammas[i]);
            const auto F = hamiltonian_field(builtins::field("r2", *disk), w);
            ShiftMap sm{disk, alphas[i % alphas.size()], F, integ};
            for (int k = 0; k < 10; ++k) {
                const Vec2 z = uniform_in_disk(rng, 0.7);
                const auto r = pullback_density_ratio(sm, w, {0, z}, 1e-5);
                CHECK(std::abs(r.ratio - r.predicted) < 1e-4);
            }
        }
    }
}

TEST_CASE("gamma membership certificates") {
    auto disk = builtins::surface("disk");
    const auto F = disk_rotation_field(disk);
    const auto grid = surface_grid_points(*disk, 0.05);

    SECTION("constants pass with min exactly 1") {
        const auto cert = gamma_membership(disk, make_constant_field(3.0), F, grid);
        CHECK(cert.min_value == 1.0);
        CHECK(cert.passed);
        CHECK(cert.jacobian_crosscheck_residual < 1e-4);
    }

    SECTION("alpha = xy fails: min = -1 at (0, +-1)") {
        Poly2 pxy;
        pxy.terms = {{1, 1, 1.0}};
        const auto cert = gamma_membership(disk, make_polynomial_field(pxy), F, grid);
        CHECK_FALSE(cert.passed);
        CHECK(std::abs(cert.min_value + 1.0) < 1e-9);
        CHECK(std::abs(cert.argmin.p.y * cert.argmin.p.y - 1.0) < 1e-9);
    }
}
