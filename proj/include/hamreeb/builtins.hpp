#pragma once

#include <functional>
#include <memory>
#include <string>

#include "hamreeb/area_form.hpp"
#include "hamreeb/core.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

/// f-preserving diffeomorphism candidate used by the volume obstruction.
struct Involution {
    std::string name;
    std::function<ChartPoint(ChartPoint)> map;
};

namespace builtins {

inline Poly2 twowell_poly() {
    // ((x+1)^2 + y^2)((x-1)^2 + y^2) = x^4 + 2x^2y^2 + y^4 - 2x^2 + 2y^2 + 1
    Poly2 g;
    g.terms = {{4, 0, 1.0}, {2, 2, 2.0}, {0, 4, 1.0}, {2, 0, -2.0}, {0, 2, 2.0}, {0, 0, 1.0}};
    return g;
}

inline std::shared_ptr<const SurfaceModel> surface(const std::string& name) {
    SurfaceParams p;
    if (name == "disk") {
        p.radius = 1.0;
        p.landmarks = {{0, 0}};
        return std::make_shared<SurfaceModel>(make_model_surface(SurfaceKind::Disk, p));
    }
    if (name == "annulus") {
        p.period_x = 1.0;
        p.height = 1.0;
        return std::make_shared<SurfaceModel>(make_model_surface(SurfaceKind::Annulus, p));
    }
    if (name == "torus") {
        p.period_x = 1.0;
        p.period_y = 1.0;
        return std::make_shared<SurfaceModel>(make_model_surface(SurfaceKind::FlatTorus, p));
    }
    if (name == "sphere")
        return std::make_shared<SurfaceModel>(make_model_surface(SurfaceKind::Sphere, p));
    if (name == "twowell" || name == "twowell-domain") {
        p.g = std::make_shared<ScalarField>(make_polynomial_field(twowell_poly()));
        p.level = 2.0;
        p.bbox = {-2.0, 2.0, -1.5, 1.5};
        p.trace_resolution = 0.005;
        p.landmarks = {{0, 0}, {1, 0}, {-1, 0}};
        return std::make_shared<SurfaceModel>(make_model_surface(SurfaceKind::PlanarSublevel, p));
    }
    throw std::invalid_argument("unknown surface: " + name);
}

inline ScalarField field(const std::string& name, const SurfaceModel& s) {
    const int nc = (int)s.charts.size();
    if (name == "r2") {
        Poly2 f;
        f.terms = {{2, 0, 1.0}, {0, 2, 1.0}};
        return make_polynomial_field(f, nc);
    }
    if (name == "r4") {
        Poly2 f;
        f.terms = {{4, 0, 1.0}, {2, 2, 2.0}, {0, 4, 1.0}};
        return make_polynomial_field(f, nc);
    }
    if (name == "twowell") return make_polynomial_field(twowell_poly(), nc);
    if (name == "angular") {
        if (s.kind == SurfaceKind::Annulus) {
            // transversal height: its Hamiltonian field w.r.t. dx^dy is the
            // unit-speed angular flow (1, 0)
            Poly2 f;
            f.terms = {{0, 1, -1.0}};
            return make_polynomial_field(f, nc);
        }
        if (s.kind == SurfaceKind::FlatTorus) {
            // circle-valued angular coordinate; no critical points
            ScalarField f = make_analytic_field([](Vec2 p) { return p.x; },
                                                [](Vec2) { return Vec2{1, 0}; },
                                                [](Vec2) { return Mat2{}; }, nc);
            f.codomain = Codomain::Circle;
            f.period = s.params.period_x;
            return f;
        }
        throw std::invalid_argument("field 'angular' is defined on annulus and torus only");
    }
    if (name == "torus-height") {
        if (s.kind != SurfaceKind::FlatTorus)
            throw std::invalid_argument("field 'torus-height' requires the torus");
        const double px = s.params.period_x, py = s.params.period_y;
        const double wx = 2 * kPi / px, wy = 2 * kPi / py;
        return make_analytic_field(
            [wx, wy](Vec2 p) { return std::cos(wx * p.x) + 0.4 * std::cos(wy * p.y); },
            [wx, wy](Vec2 p) {
                return Vec2{-wx * std::sin(wx * p.x), -0.4 * wy * std::sin(wy * p.y)};
            },
            [wx, wy](Vec2 p) {
                return Mat2{-wx * wx * std::cos(wx * p.x), 0.0, 0.0,
                            -0.4 * wy * wy * std::cos(wy * p.y)};
            },
            nc);
    }
    if (name == "height") {
        if (s.kind != SurfaceKind::Sphere)
            throw std::invalid_argument("field 'height' requires the sphere");
        // z-coordinate under the two stereographic charts
        ScalarField f;
        for (int sign : {-1, +1}) {
            const double sgn = sign;
            ScalarField::ChartFns cf;
            cf.value = [sgn](Vec2 p) {
                const double r2 = p.norm2();
                return sgn * (r2 - 1) / (r2 + 1);
            };
            cf.grad = [sgn](Vec2 p) {
                const double d = p.norm2() + 1;
                return Vec2{sgn * 4 * p.x / (d * d), sgn * 4 * p.y / (d * d)};
            };
            f.charts.push_back(cf);
        }
        return f;
    }
    throw std::invalid_argument("unknown field: " + name);
}

inline AreaForm form(const std::string& name, const SurfaceModel& s) {
    const int nc = (int)s.charts.size();
    if (name == "standard") {
        if (s.kind == SurfaceKind::Sphere)
            // round form, compatible across the two charts
            return make_analytic_form(
                [](Vec2 p) {
                    const double d = 1 + p.norm2();
                    return 4.0 / (d * d);
                },
                nc);
        return make_constant_form(1.0, nc);
    }
    if (name == "tilted")  // positive on |x| < 2
        return make_analytic_form([](Vec2 p) { return 1.0 + p.x / 2.0; }, nc);
    if (name == "radial-bump")
        return make_analytic_form([](Vec2 p) { return 1.0 + p.norm2() / 2.0; }, nc);
    throw std::invalid_argument("unknown form: " + name);
}

inline Involution involution(const std::string& name) {
    if (name == "negate")
        return {"negate", [](ChartPoint z) { return ChartPoint{z.chart, -z.p.x, -z.p.y}; }};
    if (name == "identity") return {"identity", [](ChartPoint z) { return z; }};
    throw std::invalid_argument("unknown involution: " + name);
}

}  // namespace builtins
}  // namespace hamreeb
