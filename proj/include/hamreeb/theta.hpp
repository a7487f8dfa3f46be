#pragma once

#include <memory>
#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/flow.hpp"
#include "hamreeb/graph_function.hpp"
#include "hamreeb/reeb.hpp"
#include "hamreeb/shift_map.hpp"

namespace hamreeb {

/// theta for the extreme-only (circle) cases: an orbit-constant positive
/// function equal to k * Per on every regular orbit, with the smallest
/// integer profile k <= 8 extending continuously across the graph, and the
/// verified deck identity Phi_theta = id.
struct ThetaResult {
    GraphFunction theta_hat;
    LiftedGraphFunction theta;
    std::vector<int> k_per_edge;
    double max_identity_residual = 0.0;  // |Phi_theta(x) - x| over samples
    double max_period_jitter = 0.0;      // spread of Per along each edge
};

inline ThetaResult theta_function(const std::shared_ptr<const ReebGraph>& g,
                                  const PlanarVectorField& v, const FlowIntegrator& integ = {},
                                  double tol = 1e-6, int identity_samples = 200,
                                  uint64_t seed = 404, double period_max_time = 200.0) {
    const SurfaceModel& surf = *g->mesh->surface;
    std::vector<ChartPoint> avoid;
    for (const auto& n : g->nodes)
        if (!n.critical_ids.empty()) avoid.push_back(n.anchor);

    // periods on a dense parameter grid per edge
    struct EdgePeriods {
        std::vector<std::pair<double, double>> per;  // (param, period)
    };
    std::vector<EdgePeriods> periods(g->edges.size());
    for (const auto& e : g->edges) {
        for (int k = 0; k <= 8; ++k) {
            const double t = 0.1 + 0.8 * k / 8.0;
            const double val = e.v_lo + t * (e.v_hi - e.v_lo);
            const ChartPoint z = point_on_edge_at_value(*g, e.id, val);
            const auto T = orbit_period(surf, v, z, integ, tol, period_max_time, avoid);
            if (!T)
                throw std::runtime_error(
                    "theta_function: non-periodic regular orbit (not a circle case)");
            periods[e.id].per.push_back({t, *T});
        }
    }

    ThetaResult out;
    out.k_per_edge.assign(g->edges.size(), 0);

    // smallest integer multiple per edge keeping the profile continuous
    // across nodes; the circle cases (A)-(D) have a single edge, where only
    // a loop edge imposes a closing condition
    for (const auto& e : g->edges) {
        const auto& per = periods[e.id].per;
        double lo = per.front().second, hi = per.front().second;
        for (const auto& [t, T] : per) {
            lo = std::min(lo, T);
            hi = std::max(hi, T);
        }
        out.max_period_jitter = std::max(out.max_period_jitter, hi - lo);
        int chosen = 0;
        const bool loop = e.node_lo == e.node_hi;
        for (int k = 1; k <= 8; ++k) {
            if (loop && std::abs(k * per.front().second - k * per.back().second) > tol) continue;
            chosen = k;
            break;
        }
        if (chosen == 0)
            throw std::runtime_error(
                "theta_function: no integer multiple profile k <= 8 closes the edge");
        out.k_per_edge[e.id] = chosen;
    }
    // node agreement for multi-edge graphs (not realized by the model cases;
    // report failure rather than guess)
    if (g->edges.size() > 1) {
        for (const auto& n : g->nodes) {
            double want = -1;
            for (const auto& e : g->edges) {
                if (e.node_lo != n.id && e.node_hi != n.id) continue;
                const auto& per = periods[e.id].per;
                const double end =
                    (e.node_lo == n.id ? per.front().second : per.back().second) *
                    out.k_per_edge[e.id];
                if (want < 0)
                    want = end;
                else if (std::abs(want - end) > tol)
                    throw std::runtime_error(
                        "theta_function: incident edges disagree at a node");
            }
        }
    }

    for (const auto& e : g->edges) {
        const int k = out.k_per_edge[e.id];
        GraphFunction::Profile prof;
        for (const auto& [t, T] : periods[e.id].per) prof.points.push_back({t, k * T});
        out.theta_hat.edge_profiles[e.id] = prof;
        // node values: limits of the profile
        out.theta_hat.node_values[e.node_lo] = k * periods[e.id].per.front().second;
        out.theta_hat.node_values[e.node_hi] = k * periods[e.id].per.back().second;
    }
    for (const auto& [n, val] : out.theta_hat.node_values)
        if (val <= 0) throw std::runtime_error("theta_function: non-positive theta");

    out.theta = lift_graph_function(g, out.theta_hat);

    // deck identity Phi_theta = id
    ShiftMap sm{g->mesh->surface, out.theta.field, v, integ};
    Rng rng(seed);
    auto pts = random_surface_points(surf, identity_samples, rng, 1e-2);
    for (const auto& z : pts) {
        bool near_crit = false;
        for (const auto& a : avoid)
            if (surf.distance(z, a) < 5e-2) near_crit = true;
        if (near_crit) continue;
        const ChartPoint w = shift_apply(sm, z);
        out.max_identity_residual = std::max(out.max_identity_residual, surf.distance(w, z));
    }
    return out;
}

}  // namespace hamreeb
