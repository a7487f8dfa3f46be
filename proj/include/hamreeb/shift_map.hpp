#pragma once

#include <memory>
#include <vector>

#include "hamreeb/area_form.hpp"
#include "hamreeb/core.hpp"
#include "hamreeb/flow.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"
#include "hamreeb/vector_field.hpp"

namespace hamreeb {

/// x -> Phi(x, alpha(x)): every point moves along its own orbit for the time
/// prescribed by alpha.
struct ShiftMap {
    std::shared_ptr<const SurfaceModel> surface;
    ScalarField alpha;
    PlanarVectorField base;
    FlowIntegrator integrator;
};

inline ChartPoint shift_apply(const ShiftMap& sm, const ChartPoint& x) {
    return flow_point(*sm.surface, sm.base, x, sm.alpha.value(x), sm.integrator);
}

inline std::vector<std::pair<ChartPoint, ChartPoint>> shift_as_map(
    const ShiftMap& sm, const std::vector<ChartPoint>& grid) {
    std::vector<std::pair<ChartPoint, ChartPoint>> out;
    out.reserve(grid.size());
    for (const auto& x : grid) out.emplace_back(x, shift_apply(sm, x));
    return out;
}

/// Derivative of alpha along the field: grad(alpha) . V.
inline double derivative_along(const ScalarField& alpha, const PlanarVectorField& v,
                               const ChartPoint& x) {
    return dot(alpha.gradient(x), v.value(x));
}

namespace detail {

/// Difference b - a expressed in the chart of `a`, min-image for periodic
/// charts.
inline Vec2 chart_difference(const SurfaceModel& s, const ChartPoint& a, const ChartPoint& b) {
    ChartPoint bb = b;
    if (bb.chart != a.chart) {
        auto w = s.to_chart(bb, a.chart);
        if (!w) throw std::runtime_error("chart_difference: point not expressible in base chart");
        bb = *w;
    }
    double dx = bb.p.x - a.p.x, dy = bb.p.y - a.p.y;
    const Chart& c = s.charts[a.chart];
    if (const double px = c.period_x(); px > 0) dx = wrap_symmetric(dx, px);
    if (const double py = c.period_y(); py > 0) dy = wrap_symmetric(dy, py);
    return {dx, dy};
}

/// Central-difference Jacobian of a chart map at x.
template <class Map>
inline Mat2 numeric_jacobian(const SurfaceModel& s, Map&& map, const ChartPoint& x,
                             double fd_step) {
    const ChartPoint base = map(x);
    auto col = [&](Vec2 dir) {
        const ChartPoint xp{x.chart, x.p + dir * fd_step};
        const ChartPoint xm{x.chart, x.p - dir * fd_step};
        const Vec2 d = chart_difference(s, base, map(xp)) - chart_difference(s, base, map(xm));
        return d / (2 * fd_step);
    };
    const Vec2 cx = col({1, 0});
    const Vec2 cy = col({0, 1});
    return {cx.x, cy.x, cx.y, cy.y};
}

}  // namespace detail

struct JacobianResult {
    double numeric_det = 0.0;
    double predicted = 0.0;      // (1 + dalpha(V)) * det DPhi_a, a = alpha(x)
    double one_plus_dalpha = 0.0;
    bool invertible_predicted = false;
};

/// Finite-difference determinant of the shift map against the prediction
/// 1 + dalpha(V)(x).  At points where a = alpha(x) != 0 the shift map factors
/// as Phi_a after the shift of alpha - a, which fixes x, so the flow factor
/// det DPhi_a(x) (numerically differentiated) multiplies the prediction.
inline JacobianResult jacobian_det(const ShiftMap& sm, const ChartPoint& x, double fd_step) {
    const SurfaceModel& s = *sm.surface;
    JacobianResult r;
    r.numeric_det =
        detail::numeric_jacobian(s, [&](const ChartPoint& z) { return shift_apply(sm, z); }, x,
                                 fd_step)
            .det();
    r.one_plus_dalpha = 1.0 + derivative_along(sm.alpha, sm.base, x);
    const double a = sm.alpha.value(x);
    double flow_factor = 1.0;
    if (std::abs(a) > 1e-14)
        flow_factor = detail::numeric_jacobian(
                          s,
                          [&](const ChartPoint& z) {
                              return flow_point(s, sm.base, z, a, sm.integrator);
                          },
                          x, fd_step)
                          .det();
    r.predicted = r.one_plus_dalpha * flow_factor;
    r.invertible_predicted = r.one_plus_dalpha != 0.0;
    return r;
}

struct PullbackResult {
    double ratio = 0.0;      // gamma(Phi_alpha x) det DPhi_alpha(x) / gamma(x)
    double predicted = 0.0;  // 1 + dalpha(H)(x)
};

/// The action of the shift map on the area form, measured as a density ratio
/// at x.  For the Hamiltonian field of f this equals 1 + dalpha(H)(x).
inline PullbackResult pullback_density_ratio(const ShiftMap& sm, const AreaForm& w,
                                             const ChartPoint& x, double fd_step) {
    const SurfaceModel& s = *sm.surface;
    const Mat2 jac = detail::numeric_jacobian(
        s, [&](const ChartPoint& z) { return shift_apply(sm, z); }, x, fd_step);
    ChartPoint y = shift_apply(sm, x);
    if (y.chart != x.chart) {
        auto yy = s.to_chart(y, x.chart);
        if (!yy) throw std::runtime_error("pullback_density_ratio: chart mismatch");
        y = *yy;
    }
    PullbackResult r;
    r.ratio = w.density(y) * jac.det() / w.density(x);
    r.predicted = 1.0 + derivative_along(sm.alpha, sm.base, x);
    return r;
}

struct GammaCertificate {
    double min_value = 0.0;  // min over samples of 1 + dalpha(V)
    ChartPoint argmin;
    int sample_count = 0;
    bool passed = false;
    double jacobian_crosscheck_residual = 0.0;
};

/// Membership of alpha in Gamma = {1 + dalpha(V) > 0}: certificate over a
/// sample grid, cross-checked against finite-difference Jacobians at a few
/// random points.
inline GammaCertificate gamma_membership(const std::shared_ptr<const SurfaceModel>& surface,
                                         const ScalarField& alpha, const PlanarVectorField& v,
                                         const std::vector<ChartPoint>& sample_grid,
                                         uint64_t seed = 7) {
    GammaCertificate cert;
    cert.min_value = std::numeric_limits<double>::infinity();
    for (const auto& z : sample_grid) {
        const double val = 1.0 + derivative_along(alpha, v, z);
        if (val < cert.min_value) {
            cert.min_value = val;
            cert.argmin = z;
        }
    }
    cert.sample_count = (int)sample_grid.size();
    cert.passed = cert.min_value > 0;

    Rng rng(seed);
    ShiftMap sm{surface, alpha, v, {}};
    auto pts = random_surface_points(*surface, 10, rng, 0.05);
    for (const auto& z : pts) {
        const auto jr = jacobian_det(sm, z, 1e-5);
        cert.jacobian_crosscheck_residual = std::max(
            cert.jacobian_crosscheck_residual, std::abs(jr.numeric_det - jr.predicted));
    }
    return cert;
}

}  // namespace hamreeb
