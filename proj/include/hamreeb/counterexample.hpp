#pragma once

#include <string>
#include <vector>

#include "hamreeb/builtins.hpp"
#include "hamreeb/core.hpp"
#include "hamreeb/flow.hpp"
#include "hamreeb/shift_map.hpp"
#include "hamreeb/vector_field.hpp"

namespace hamreeb {

struct ScenarioCheck {
    std::string description;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct ScenarioResult {
    std::string name;
    std::vector<ScenarioCheck> checks;
    std::vector<std::string> artifacts;
    std::string conclusion;
    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Finite-difference tangent map of the time-t flow at a fixed point.
inline Mat2 tangent_map_at(const SurfaceModel& s, const PlanarVectorField& v, const ChartPoint& z,
                           double t, const FlowIntegrator& integ, double fd_step = 1e-5) {
    return detail::numeric_jacobian(
        s, [&](const ChartPoint& w) { return flow_point(s, v, w, t, integ); }, z, fd_step);
}

/// The unit-disk counterexample: f = |z|^2 and g = |z|^4 share level curves,
/// but the tangent map of the g-flow at the origin is always the identity
/// while the f-flow rotates by 2t -- so the time-t rotation is not a shift
/// of the g-flow for t off the half-period lattice.
inline ScenarioResult run_counterexample_disk(double /*resolution*/ = 0.05,
                                              double step = 1e-3) {
    ScenarioResult out;
    out.name = "counterexample-disk";
    auto disk = builtins::surface("disk");
    const auto one = make_constant_form(1.0);
    const auto f = builtins::field("r2", *disk);
    const auto g = builtins::field("r4", *disk);
    const auto F = hamiltonian_field(f, one);
    const auto G = hamiltonian_field(g, one);
    FlowIntegrator integ;
    integ.step_size = step;

    // (a) the F-flow is the closed-form rotation e^{2it} z
    {
        Rng rng(9001);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const Vec2 z = uniform_in_disk(rng, 0.95);
            const double t = uniform(rng, -5.0, 5.0);
            const double c = std::cos(2 * t), sn = std::sin(2 * t);
            const Vec2 want{c * z.x - sn * z.y, sn * z.x + c * z.y};
            worst = std::max(worst, (flow_point(*disk, F, {0, z}, t, integ).p - want).norm());
        }
        out.checks.push_back({"F-flow matches e^{2it} z at 100 samples", worst, 0.0, 1e-6,
                              worst < 1e-6});
    }

    // (b) tangent map of the g-flow at 0 is the identity.  The stencil must
    // stay outside the integrator's frozen zone around the equilibrium, where
    // |G| ~ 4 r^3 still turns points by only ~2 r^2 t.
    const double fd = 1e-3;
    for (const double t : {0.5, 1.0, 2.0}) {
        const Mat2 J = tangent_map_at(*disk, G, {0, {0, 0}}, t, integ, fd);
        const double dist = (J - Mat2::identity()).spectral_norm();
        out.checks.push_back({"|T_0 G_" + std::to_string(t) + " - I|", dist, 0.0, 1e-5,
                              dist < 1e-5});
    }

    // (c) tangent map of the f-flow at 0 is the rotation by 2t
    {
        const double t = 0.5;
        const Mat2 J = tangent_map_at(*disk, F, {0, {0, 0}}, t, integ, fd);
        const double dist = (J - Mat2::identity()).spectral_norm();
        // rotation by 1 rad: spectral distance to the identity 2 sin(1/2)
        const double expected = 2 * std::abs(std::sin(0.5));
        out.checks.push_back({"|T_0 F_0.5 - I| (rotation by 1 rad)", dist, expected, 1e-4,
                              dist > 0.5 && std::abs(dist - expected) < 1e-4});
        const double rot_err = (J - Mat2::rotation(2 * t)).spectral_norm();
        out.checks.push_back({"T_0 F_0.5 equals the rotation matrix", rot_err, 0.0, 1e-5,
                              rot_err < 1e-5});
    }

    out.conclusion =
        "F_t has a non-trivial tangent map at 0 for t off the pi-lattice, while every shift "
        "G_alpha of the g-flow fixes the origin to first order; hence F_0.5 is not of the form "
        "G_alpha and the shift map of G is not surjective onto the common stabilizer.";
    return out;
}

}  // namespace hamreeb
