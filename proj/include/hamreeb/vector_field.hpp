#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hamreeb/area_form.hpp"
#include "hamreeb/core.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

/// Vector field in chart coordinates.
struct PlanarVectorField {
    enum class Provenance { Generic, HamiltonianOf, HamiltonianLikeDeclared };

    std::vector<std::function<Vec2(Vec2)>> charts;
    Provenance provenance = Provenance::Generic;

    // set when provenance == HamiltonianOf
    std::shared_ptr<const ScalarField> hamiltonian_of;
    std::shared_ptr<const AreaForm> omega;

    Vec2 value(const ChartPoint& z) const { return charts.at(z.chart)(z.p); }
};

/// The unique field H with df(u) = omega(u, H): in a chart with density gamma,
/// H = (-f_y, f_x) / gamma.
inline PlanarVectorField hamiltonian_field(const ScalarField& f, const AreaForm& w) {
    if (f.charts.size() != w.charts.size())
        throw std::invalid_argument("hamiltonian_field: chart count mismatch");
    PlanarVectorField v;
    v.provenance = PlanarVectorField::Provenance::HamiltonianOf;
    v.hamiltonian_of = std::make_shared<ScalarField>(f);
    v.omega = std::make_shared<AreaForm>(w);
    for (size_t i = 0; i < f.charts.size(); ++i) {
        const ScalarField fc = f;  // capture by value: fields are immutable
        const int chart = (int)i;
        const auto gamma = w.charts[i];
        v.charts.push_back([fc, gamma, chart](Vec2 p) {
            const Vec2 g = fc.gradient({chart, p});
            const double d = gamma(p);
            return Vec2{-g.y / d, g.x / d};
        });
    }
    return v;
}

inline PlanarVectorField make_analytic_vector_field(std::function<Vec2(Vec2)> eval,
                                                    int n_charts = 1) {
    PlanarVectorField v;
    for (int i = 0; i < n_charts; ++i) v.charts.push_back(eval);
    return v;
}

inline PlanarVectorField scale_vector_field(const PlanarVectorField& v,
                                            std::function<double(Vec2)> factor) {
    PlanarVectorField r;
    r.provenance = PlanarVectorField::Provenance::Generic;
    for (const auto& c : v.charts)
        r.charts.push_back([c, factor](Vec2 p) { return c(p) * factor(p); });
    return r;
}

/// {f, g} = omega(H_f, H_g) = dg(H_f).  In a chart this is
/// (f_x g_y - f_y g_x) / gamma.
inline ScalarField poisson_bracket(const ScalarField& f, const ScalarField& g,
                                   const AreaForm& w) {
    if (f.charts.size() != g.charts.size() || f.charts.size() != w.charts.size())
        throw std::invalid_argument("poisson_bracket: chart count mismatch");
    ScalarField r;
    r.codomain = Codomain::Line;
    r.fd_step = std::min(f.fd_step, g.fd_step);
    for (size_t i = 0; i < f.charts.size(); ++i) {
        const ScalarField fc = f, gc = g;
        const auto gamma = w.charts[i];
        const int chart = (int)i;
        ScalarField::ChartFns out;
        out.value = [fc, gc, gamma, chart](Vec2 p) {
            const Vec2 df = fc.gradient({chart, p});
            const Vec2 dg = gc.gradient({chart, p});
            return cross(df, dg) / gamma(p);
        };
        r.charts.push_back(out);
    }
    return r;
}

/// Pushforward mismatch of a field across chart transitions:
/// max |V_to(T p) - DT(p) V_from(p)| at random overlap points.
inline double vector_field_overlap_residual(const SurfaceModel& s, const PlanarVectorField& v,
                                            int n_samples, uint64_t seed) {
    double worst = 0.0;
    Rng rng(seed);
    for (const auto& t : s.transitions) {
        const auto box = s.charts.at(t.from).bbox();
        int accepted = 0, guard = 0;
        while (accepted < n_samples && guard++ < 100 * n_samples) {
            const Vec2 p{uniform(rng, box[0], box[1]), uniform(rng, box[2], box[3])};
            if (!s.charts[t.from].contains(p)) continue;
            const Vec2 q = t.map(p);
            if (!s.charts[t.to].contains(q)) continue;
            ++accepted;
            const Vec2 pushed = t.jacobian(p).apply(v.value({t.from, p}));
            worst = std::max(worst, (v.value({t.to, q}) - pushed).norm());
        }
    }
    return worst;
}

}  // namespace hamreeb
