#pragma once

#include <functional>
#include <sstream>
#include <vector>

#include "hamreeb/axioms.hpp"
#include "hamreeb/builtins.hpp"
#include "hamreeb/counterexample.hpp"
#include "hamreeb/critical_points.hpp"
#include "hamreeb/graph_function.hpp"
#include "hamreeb/hamiltonian_like.hpp"
#include "hamreeb/io.hpp"
#include "hamreeb/obstruction.hpp"
#include "hamreeb/quadrature.hpp"
#include "hamreeb/reeb.hpp"
#include "hamreeb/report.hpp"
#include "hamreeb/theta.hpp"

namespace hamreeb {
namespace verify {

/// Residual for "x inside [lo, hi]" style assertions.
inline double window_residual(double x, double lo, double hi) {
    return std::max({0.0, lo - x, x - hi});
}

struct Context {
    uint64_t seed = 0;

    std::shared_ptr<const SurfaceModel> disk = builtins::surface("disk");
    std::shared_ptr<const SurfaceModel> twowell = builtins::surface("twowell");
    std::shared_ptr<const SurfaceModel> torus = builtins::surface("torus");
    std::shared_ptr<const SurfaceModel> sphere = builtins::surface("sphere");

    ScalarField f_r2{builtins::field("r2", *disk)};
    ScalarField f_tw{builtins::field("twowell", *twowell)};
    AreaForm one{make_constant_form(1.0)};

    std::vector<CriticalPoint> crit_r2{find_critical_points(f_r2, *disk, 0.3, 1e-9)};
    std::vector<CriticalPoint> crit_tw{find_critical_points(f_tw, *twowell, 0.11, 1e-9)};

    std::shared_ptr<const ReebGraph> disk_graph;
    std::shared_ptr<const ReebGraph> twowell_graph;

    Context(uint64_t s) : seed(s) {
        auto dm = std::make_shared<TriMesh>(triangulate(disk, 0.05));
        sample_field(*dm, f_r2);
        disk_graph = std::make_shared<const ReebGraph>(build_reeb_graph(dm, f_r2, crit_r2));
        auto tm = std::make_shared<TriMesh>(triangulate(twowell, 0.05));
        sample_field(*tm, f_tw);
        twowell_graph = std::make_shared<const ReebGraph>(build_reeb_graph(tm, f_tw, crit_tw));
    }
};

// ---- module 1: surface geometry --------------------------------------------

inline CheckResult density_compatibility(const Context& c) {
    const auto round_form = builtins::form("standard", *c.sphere);
    return CheckResult::of("surface/density-compatibility",
                           density_compatibility_residual(*c.sphere, round_form, 100, c.seed + 1),
                           1e-9, 100);
}

inline CheckResult triangulate_deterministic(const Context& c) {
    auto a = triangulate(c.disk, 0.07);
    auto b = triangulate(c.disk, 0.07);
    std::ostringstream sa, sb;
    write_mesh(a, sa);
    write_mesh(b, sb);
    return CheckResult::flag("surface/triangulate-deterministic", sa.str() == sb.str(),
                             a.vertex_count());
}

inline CheckResult quadrature_additivity(const Context& c) {
    auto m = triangulate(c.disk, 0.05);
    sample_field(m, c.f_r2);
    const auto w = make_analytic_form([](Vec2 p) { return 1.0 + p.x / 3 + p.norm2(); });
    const double a = integrate_density(m, w, Region::sublevel(0.3));
    const double b = integrate_density(m, w, Region::band(0.3, 0.6));
    const double ab = integrate_density(m, w, Region::sublevel(0.6));
    return CheckResult::of("surface/quadrature-additivity",
                           std::abs(a + b - ab) / (std::abs(a) + std::abs(b)), 1e-12,
                           m.triangle_count());
}

inline CheckResult involution_region_agreement(const Context& c) {
    auto m = triangulate(c.twowell, 0.02);
    sample_field(m, c.f_tw);
    auto half = [&](int sign) {
        Region r = Region::sublevel(0.5);
        r.tri_filter = [&m, sign](int t) { return sign * m.tri_centroid(t).x > 0; };
        return integrate_density(m, c.one, r);
    };
    const double right = half(+1), left = half(-1);
    return CheckResult::of("surface/involution-region-agreement",
                           std::abs(right - left) / std::max(right, left), 0.01,
                           m.triangle_count());
}

// ---- module 2: scalar fields -------------------------------------------------

inline CheckResult gradient_fd_order(const Context& c) {
    ScalarField fd = c.f_tw;
    for (auto& cf : fd.charts) cf.grad = nullptr;
    Rng rng(c.seed + 2);
    auto pts = random_surface_points(*c.twowell, 100, rng, 0.1);
    auto max_err = [&](double h) {
        ScalarField g = fd;
        g.fd_step = h;
        double worst = 0;
        for (const auto& z : pts)
            worst = std::max(worst, (g.gradient(z) - c.f_tw.gradient(z)).norm());
        return worst;
    };
    const double ratio = max_err(1e-3) / max_err(5e-4);
    return CheckResult::of("fields/gradient-fd-second-order", window_residual(ratio, 3.5, 4.5),
                           0.0, 100);
}

inline CheckResult critical_gradient_tolerance(const Context& c) {
    double worst = 0;
    for (const auto& cp : c.crit_tw) worst = std::max(worst, c.f_tw.gradient(cp.position).norm());
    for (const auto& cp : c.crit_r2) worst = std::max(worst, c.f_r2.gradient(cp.position).norm());
    return CheckResult::of("fields/critical-gradient-tolerance", worst, 1e-9,
                           (int)(c.crit_tw.size() + c.crit_r2.size()));
}

inline CheckResult classification_rotation_invariance(const Context& c) {
    const double ang = 0.7;
    const Mat2 rot = Mat2::rotation(ang), inv = Mat2::rotation(-ang);
    const ScalarField f = c.f_tw;
    ScalarField rotated = make_analytic_field(
        [f, inv](Vec2 p) { return f.charts[0].value(inv.apply(p)); },
        [f, inv, rot](Vec2 p) { return rot.apply(f.charts[0].grad(inv.apply(p))); });
    auto disk_big = builtins::surface("disk");
    auto base = find_critical_points(f, *disk_big, 0.15, 1e-8);
    auto turned = find_critical_points(rotated, *disk_big, 0.15, 1e-8);
    auto kinds = [](const std::vector<CriticalPoint>& v) {
        std::vector<int> k;
        for (const auto& cp : v) k.push_back((int)cp.kind);
        std::sort(k.begin(), k.end());
        return k;
    };
    return CheckResult::flag("fields/classification-rotation-invariance",
                             base.size() == turned.size() && kinds(base) == kinds(turned),
                             (int)base.size());
}

inline CheckResult morse_euler_count(const Context& c) {
    auto count = [](const std::vector<CriticalPoint>& crit) {
        int mins = 0, maxs = 0, saddles = 0;
        for (const auto& cp : crit) {
            mins += cp.kind == CriticalKind::NondegMin;
            maxs += cp.kind == CriticalKind::NondegMax;
            saddles += cp.kind == CriticalKind::NondegSaddle;
        }
        return mins - saddles + maxs;
    };
    const auto cs = find_critical_points(builtins::field("height", *c.sphere), *c.sphere, 0.3, 1e-8);
    const auto ct =
        find_critical_points(builtins::field("torus-height", *c.torus), *c.torus, 0.11, 1e-9);
    const bool ok = count(cs) == 2 && count(ct) == 0;
    return CheckResult::flag("fields/morse-euler-count", ok, (int)(cs.size() + ct.size()));
}

// ---- module 3: hamiltonian dynamics -------------------------------------------

inline CheckResult flow_f_invariance(const Context& c) {
    const auto H = hamiltonian_field(c.f_tw, c.one);
    FlowIntegrator integ;
    Rng rng(c.seed + 3);
    double worst = 0;
    auto pts = random_surface_points(*c.twowell, 100, rng, 0.05);
    for (const auto& z : pts) {
        const double t = uniform(rng, -5.0, 5.0);
        const auto traj = flow_trajectory(*c.twowell, H, z, t, integ);
        for (size_t k = 0; k < traj.size(); k += 13)
            worst = std::max(worst, std::abs(traj[k].f_value - traj.front().f_value));
    }
    return CheckResult::of("flow/f-invariance", worst, FlowIntegrator{}.reprojection_tolerance,
                           100);
}

inline CheckResult liouville_constant_shift(const Context& c) {
    const auto w = make_analytic_form([](Vec2 p) { return 1 + p.x * p.x / 2; });
    const auto H = hamiltonian_field(c.f_r2, w);
    FlowIntegrator integ;
    Rng rng(c.seed + 4);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const Vec2 z = uniform_in_disk(rng, 0.8);
        ShiftMap sm{c.disk, make_constant_field(uniform(rng, -2.0, 2.0)), H, integ};
        worst = std::max(worst,
                         std::abs(pullback_density_ratio(sm, w, {0, z}, 1e-5).ratio - 1.0));
    }
    return CheckResult::of("flow/liouville-constant-shift", worst, 1e-5, 100);
}

inline CheckResult jacobian_law_convergence(const Context& c) {
    Poly2 pxy;
    pxy.terms = {{1, 1, 1.0}};
    FlowIntegrator integ;
    integ.step_size = 2e-4;
    ShiftMap sm{c.disk, make_polynomial_field(pxy), hamiltonian_field(c.f_r2, c.one), integ};
    Rng rng(c.seed + 5);
    double residual = 0;
    for (int i = 0; i < 20; ++i) {
        const Vec2 z = uniform_in_disk(rng, 0.7);
        const auto c1 = jacobian_det(sm, {0, z}, 1e-4);
        const auto c2 = jacobian_det(sm, {0, z}, 5e-5);
        const double e1 = std::abs(c1.numeric_det - c1.predicted);
        const double e2 = std::abs(c2.numeric_det - c2.predicted);
        if (e1 < 1e-12) continue;
        residual = std::max(residual, window_residual(e1 / e2, 3.0, 5.0));
    }
    return CheckResult::of("shift/jacobian-law-convergence", residual, 0.0, 20);
}

inline CheckResult pullback_law_pairs(const Context& c) {
    std::vector<std::function<double(Vec2)>> gammas = {
        [](Vec2) { return 1.0; },
        [](Vec2 p) { return 1 + p.x * p.x / 2; },
        [](Vec2 p) { return 1 + p.x / 2; },
        [](Vec2 p) { return 1 + p.norm2() / 2; },
        [](Vec2 p) { return 2 + std::sin(p.x); },
    };
    Poly2 pxy, p2;
    pxy.terms = {{1, 1, 1.0}};
    p2.terms = {{2, 0, 0.3}, {0, 1, 0.2}};
    std::vector<ScalarField> alphas = {make_polynomial_field(pxy), make_polynomial_field(p2)};
    FlowIntegrator integ;
    integ.step_size = 2e-4;
    Rng rng(c.seed + 6);
    double worst = 0;
    for (size_t i = 0; i < gammas.size(); ++i) {
        const auto w = make_analytic_form(gammas[i]);
        ShiftMap sm{c.disk, alphas[i % alphas.size()], hamiltonian_field(c.f_r2, w), integ};
        for (int k = 0; k < 10; ++k) {
            const Vec2 z = uniform_in_disk(rng, 0.7);
            const auto r = pullback_density_ratio(sm, w, {0, z}, 1e-5);
            worst = std::max(worst, std::abs(r.ratio - r.predicted));
        }
    }
    return CheckResult::of("shift/pullback-law-pairs", worst, 1e-4, 50);
}

inline CheckResult poisson_identities(const Context& c) {
    const auto f = c.f_r2;
    const auto g = builtins::field("twowell", *c.disk);
    Poly2 ph;
    ph.terms = {{1, 1, 1.0}, {0, 0, 0.5}};
    const auto h = make_polynomial_field(ph);
    const auto fg = poisson_bracket(f, g, c.one);
    const auto gf = poisson_bracket(g, f, c.one);
    const auto fgh = poisson_bracket(f, field_product(g, h), c.one);
    const auto fh = poisson_bracket(f, h, c.one);
    const auto fg2 = poisson_bracket(f, g, c.one);
    Rng rng(c.seed + 7);
    double worst = 0;
    for (const auto& z : random_surface_points(*c.disk, 100, rng)) {
        worst = std::max(worst, std::abs(fg.value(z) + gf.value(z)));
        const double leibniz =
            fgh.value(z) - (g.value(z) * fh.value(z) + h.value(z) * fg2.value(z));
        worst = std::max(worst, std::abs(leibniz));
    }
    return CheckResult::of("flow/poisson-antisymmetry-leibniz", worst, 1e-8, 100);
}

inline std::vector<CheckResult> centralizer_symplectomorphism(const Context& c) {
    Rng rng(c.seed + 8);
    double worst_f = 0, worst_ratio = 0;
    for (int trial = 0; trial < 3; ++trial) {
        GraphFunction gf;
        for (const auto& n : c.twowell_graph->nodes)
            gf.node_values[n.id] = uniform(rng, -0.5, 0.5);
        const auto r = symplectomorphism_from_graph_function(
            c.twowell_graph, gf, c.f_tw, c.one, 60, 1e-6, 1e-5, c.seed + 80 + trial, false);
        worst_f = std::max(worst_f, r.report.max_f_drift);
        worst_ratio = std::max(worst_ratio, r.report.max_ratio_deviation);
    }
    return {CheckResult::of("reeb/centralizer-shift-preserves-f", worst_f, 1e-6, 180),
            CheckResult::of("reeb/centralizer-shift-preserves-omega", worst_ratio, 1e-5, 180)};
}

inline CheckResult shift_group_law(const Context& c) {
    const auto H = hamiltonian_field(c.f_r2, c.one);
    Rng rng(c.seed + 9);
    GraphFunction a_hat, b_hat;
    for (const auto& n : c.disk_graph->nodes) {
        a_hat.node_values[n.id] = uniform(rng, -0.8, 0.8);
        b_hat.node_values[n.id] = uniform(rng, -0.8, 0.8);
    }
    const auto alpha = lift_graph_function(c.disk_graph, a_hat);
    const auto beta = lift_graph_function(c.disk_graph, b_hat);
    FlowIntegrator integ;
    ShiftMap sa{c.disk, alpha.field, H, integ};
    ShiftMap sb{c.disk, beta.field, H, integ};
    ShiftMap sab{c.disk, field_sum(alpha.field, beta.field), H, integ};
    double worst = 0;
    for (const auto& z : random_surface_points(*c.disk, 100, rng, 0.05)) {
        const auto composed = shift_apply(sa, shift_apply(sb, z));
        const auto direct = shift_apply(sab, z);
        worst = std::max(worst, c.disk->distance(composed, direct));
    }
    return CheckResult::of("reeb/shift-group-law", worst, 1e-6, 100);
}

inline std::vector<CheckResult> theta_covering(const Context& c) {
    std::vector<CheckResult> out;
    const auto H = hamiltonian_field(c.f_r2, c.one);
    FlowIntegrator integ;
    const auto th = theta_function(c.disk_graph, H, integ, 1e-6, 200, c.seed + 10);
    out.push_back(CheckResult::of("theta/identity-residual", th.max_identity_residual, 1e-6, 200));

    const auto alpha = make_constant_field(kPi / 3);
    ShiftMap plain{c.disk, alpha, H, integ};
    ShiftMap shifted{c.disk, field_sum(alpha, th.theta.field), H, integ};
    Rng rng(c.seed + 11);
    double worst = 0;
    for (const auto& z : random_surface_points(*c.disk, 100, rng, 0.05))
        worst = std::max(worst, c.disk->distance(shift_apply(plain, z), shift_apply(shifted, z)));
    out.push_back(CheckResult::of("theta/covering-translation", worst, 1e-6, 100));

    // saddle case: no nonzero constant-per-well shift is the identity.
    // Candidates (a, b) from a 20x20 grid act independently per well, so the
    // identity test factorizes through per-well displacement tables.
    const auto Htw = hamiltonian_field(c.f_tw, c.one);
    Rng rng2(c.seed + 12);
    std::vector<ChartPoint> left, right;
    while (left.size() < 20 || right.size() < 20) {
        const Vec2 z{uniform(rng2, -1.5, 1.5), uniform(rng2, -0.7, 0.7)};
        const double gv = c.f_tw.value({0, z});
        if (gv < 0.15 || gv > 0.85) continue;
        if (z.x < 0 && left.size() < 20) left.push_back({0, z});
        if (z.x > 0 && right.size() < 20) right.push_back({0, z});
    }
    bool spurious_identity = false;
    for (int i = 0; i < 20; ++i) {
        const double value = -2.0 + 4.0 * i / 19.0;
        auto fixes_all = [&](const std::vector<ChartPoint>& pts) {
            for (const auto& z : pts)
                if (c.twowell->distance(flow_point(*c.twowell, Htw, z, value, integ), z) > 1e-6)
                    return false;
            return true;
        };
        const bool fixes_left = fixes_all(left);
        const bool fixes_right = fixes_all(right);
        if ((fixes_left || fixes_right) && std::abs(value) > 1e-4) spurious_identity = true;
    }
    out.push_back(
        CheckResult::flag("theta/saddle-case-injectivity", !spurious_identity, 400));
    return out;
}

// ---- module 4: reeb / centralizer ----------------------------------------------

inline CheckResult reeb_shapes(const Context& c) {
    bool ok = c.disk_graph->nodes.size() == 2 && c.disk_graph->edges.size() == 1 &&
              c.twowell_graph->nodes.size() == 4 && c.twowell_graph->edges.size() == 3;
    const auto tf = builtins::field("torus-height", *c.torus);
    const auto crit = find_critical_points(tf, *c.torus, 0.11, 1e-9);
    for (const double res : {0.05, 0.025}) {
        auto tm = std::make_shared<TriMesh>(triangulate(c.torus, res));
        sample_field(*tm, tf);
        const auto tg = build_reeb_graph(tm, tf, crit);
        ok = ok && tg.nodes.size() == 4 && tg.edges.size() == 4 && tg.first_betti_number() == 1;
    }
    auto tw_fine = std::make_shared<TriMesh>(triangulate(c.twowell, 0.025));
    sample_field(*tw_fine, c.f_tw);
    const auto twg = build_reeb_graph(tw_fine, c.f_tw, c.crit_tw);
    ok = ok && twg.nodes.size() == 4 && twg.edges.size() == 3;
    return CheckResult::flag("reeb/model-shapes-and-refinement", ok, 5);
}

inline CheckResult quotient_compatibility(const Context& c) {
    Rng rng(c.seed + 13);
    double max_grad = 0;
    for (const auto& z : random_surface_points(*c.twowell, 100, rng, 1e-3))
        max_grad = std::max(max_grad, c.f_tw.gradient(z).norm());
    const double bound = 2 * c.twowell_graph->mesh->resolution * max_grad;
    double worst = 0;
    for (const auto& z : random_surface_points(*c.twowell, 200, rng, 1e-3)) {
        const auto gp = quotient_point(*c.twowell_graph, z);
        const double v = c.f_tw.value(z);
        if (gp.is_node)
            worst = std::max(worst, std::abs(c.twowell_graph->nodes[gp.id].value - v));
        else {
            const auto& e = c.twowell_graph->edges[gp.id];
            worst = std::max(worst, std::abs(e.v_lo + gp.param * (e.v_hi - e.v_lo) - v));
        }
    }
    return CheckResult::of("reeb/quotient-compatibility", worst, std::max(bound, 1e-9), 200);
}

inline std::vector<CheckResult> eta_round_trip(const Context& c) {
    std::vector<CheckResult> out;
    Rng rng(c.seed + 14);
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
        GraphFunction gf;
        for (const auto& n : c.twowell_graph->nodes)
            gf.node_values[n.id] = uniform(rng, -1.0, 1.0);
        for (const auto& e : c.twowell_graph->edges) {
            GraphFunction::Profile prof;
            for (double t : {0.3, 0.5, 0.7}) prof.points.push_back({t, uniform(rng, -1.0, 1.0)});
            gf.edge_profiles[e.id] = prof;
        }
        const auto lifted = lift_graph_function(c.twowell_graph, gf);
        const auto proj = project_to_graph_function(lifted.field, *c.twowell_graph, 1e-6, 13,
                                                    lifted.collar_support);
        if (!proj.constant_on_levels) {
            worst = std::max(worst, 1.0);
            continue;
        }
        for (const auto& e : c.twowell_graph->edges)
            for (const auto& [t, value] : proj.fn.edge_profiles.at(e.id).points)
                worst = std::max(worst,
                                 std::abs(value - gf.eval_edge(*c.twowell_graph, e.id, t)));
    }
    out.push_back(CheckResult::of("reeb/eta-round-trip", worst, 1e-8, 10));

    Poly2 pxy;
    pxy.terms = {{1, 1, 1.0}};
    const auto proj =
        project_to_graph_function(make_polynomial_field(pxy), *c.disk_graph, 1e-6);
    out.push_back(
        CheckResult::flag("reeb/eta-rejects-non-centralizer", !proj.constant_on_levels, 13));
    return out;
}

inline CheckResult orbit_constancy(const Context& c) {
    const auto H = hamiltonian_field(c.f_r2, c.one);
    Rng rng(c.seed + 15);
    GraphFunction gf;
    for (const auto& n : c.disk_graph->nodes)
        gf.node_values[n.id] = uniform(rng, -1.0, 1.0);
    const auto lifted = lift_graph_function(c.disk_graph, gf);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const Vec2 z = uniform_in_disk(rng, 0.9);
        if (z.norm() < 0.05) continue;
        const auto traj = flow_trajectory(*c.disk, H, {0, z}, uniform(rng, 0.5, 3.0), {});
        double lo = 1e300, hi = -1e300;
        for (size_t k = 0; k < traj.size(); k += 7) {
            const double a = lifted.field.value(traj[k].z);
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        worst = std::max(worst, hi - lo);
    }
    return CheckResult::of("reeb/lifted-orbit-constancy", worst, 1e-6, 20);
}

inline CheckResult parametrization_witness(const Context& c) {
    // forward: graph-function shifts preserve both structures (covered by
    // centralizer-symplectomorphism); converse: a non-centralizer alpha
    // produces a density ratio far from 1 at its worst point
    Poly2 pxy;
    pxy.terms = {{1, 1, 1.0}};
    FlowIntegrator integ;
    integ.step_size = 2e-4;
    ShiftMap sm{c.disk, make_polynomial_field(pxy), hamiltonian_field(c.f_r2, c.one), integ};
    // d alpha(H) = 2(x^2 - y^2) peaks at (+-1, 0); measure just inside
    const auto r = pullback_density_ratio(sm, c.one, {0, {0.95, 0.0}}, 1e-5);
    const double deviation = std::abs(r.ratio - 1.0);
    return CheckResult::of("reeb/non-centralizer-detected", 0.1 - std::min(deviation, 0.1), 0.0,
                           1);
}

inline std::vector<CheckResult> run_all(uint64_t seed) {
    Context c(seed);
    std::vector<CheckResult> out;
    out.push_back(density_compatibility(c));
    out.push_back(triangulate_deterministic(c));
    out.push_back(quadrature_additivity(c));
    out.push_back(involution_region_agreement(c));
    out.push_back(gradient_fd_order(c));
    out.push_back(critical_gradient_tolerance(c));
    out.push_back(classification_rotation_invariance(c));
    out.push_back(morse_euler_count(c));
    out.push_back(flow_f_invariance(c));
    out.push_back(liouville_constant_shift(c));
    out.push_back(jacobian_law_convergence(c));
    out.push_back(pullback_law_pairs(c));
    out.push_back(poisson_identities(c));
    for (auto& r : centralizer_symplectomorphism(c)) out.push_back(std::move(r));
    out.push_back(shift_group_law(c));
    for (auto& r : theta_covering(c)) out.push_back(std::move(r));
    out.push_back(reeb_shapes(c));
    out.push_back(quotient_compatibility(c));
    for (auto& r : eta_round_trip(c)) out.push_back(std::move(r));
    out.push_back(orbit_constancy(c));
    out.push_back(parametrization_witness(c));
    return out;
}

}  // namespace verify
}  // namespace hamreeb
