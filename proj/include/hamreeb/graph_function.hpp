#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hamreeb/area_form.hpp"
#include "hamreeb/core.hpp"
#include "hamreeb/flow.hpp"
#include "hamreeb/reeb.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/shift_map.hpp"

namespace hamreeb {

/// Continuous function on the Kronrod-Reeb graph: one value per node and a
/// piecewise-linear profile per edge in the edge's f-parameter.
struct GraphFunction {
    std::map<int, double> node_values;
    struct Profile {
        std::vector<std::pair<double, double>> points;  // (param in (0,1), value), sorted
    };
    std::map<int, Profile> edge_profiles;  // absent profile = linear between node values

    double node_value(int n) const {
        auto it = node_values.find(n);
        if (it == node_values.end()) throw std::invalid_argument("graph function: missing node");
        return it->second;
    }

    /// PL evaluation along an edge, pinned to the node values at t = 0, 1.
    double eval_edge(const ReebGraph& g, int edge, double t) const {
        const ReebEdge& e = g.edges.at(edge);
        const double v0 = node_value(e.node_lo), v1 = node_value(e.node_hi);
        std::vector<std::pair<double, double>> pts = {{0.0, v0}};
        if (auto it = edge_profiles.find(edge); it != edge_profiles.end())
            for (const auto& p : it->second.points)
                if (p.first > 0.0 && p.first < 1.0) pts.push_back(p);
        pts.push_back({1.0, v1});
        t = std::clamp(t, 0.0, 1.0);
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            if (t > pts[i + 1].first) continue;
            const double w = pts[i + 1].first - pts[i].first;
            const double u = w > 0 ? (t - pts[i].first) / w : 0.0;
            return pts[i].second + (pts[i + 1].second - pts[i].second) * u;
        }
        return pts.back().second;
    }

    /// Continuity on the graph: profiles must approach the endpoint node
    /// values.  Profiles with explicit endpoint breakpoints must match them.
    void validate(const ReebGraph& g, double tol = 1e-9) const {
        for (const auto& [eid, prof] : edge_profiles) {
            const ReebEdge& e = g.edges.at(eid);
            for (const auto& [t, v] : prof.points) {
                if (t < 0.0 || t > 1.0)
                    throw std::invalid_argument("graph function: profile parameter outside [0,1]");
                if (t == 0.0 && std::abs(v - node_value(e.node_lo)) > tol)
                    throw std::invalid_argument("graph function: discontinuous at the lower node");
                if (t == 1.0 && std::abs(v - node_value(e.node_hi)) > tol)
                    throw std::invalid_argument("graph function: discontinuous at the upper node");
            }
        }
        for (const auto& e : g.edges) {
            (void)node_value(e.node_lo);
            (void)node_value(e.node_hi);
        }
    }
};

inline GraphFunction constant_graph_function(const ReebGraph& g, double c) {
    GraphFunction gf;
    for (const auto& n : g.nodes) gf.node_values[n.id] = c;
    return gf;
}

/// Smooth function on M induced by a graph function: alpha = alpha_hat o p,
/// C1-blended over f-collars of width delta around each node so that the
/// composition with the quotient map stays differentiable across singular
/// levels.  The blend depends only on f and the edge id, both constant along
/// orbits, so d alpha (H) = 0 exactly.
struct LiftedGraphFunction {
    ScalarField field;
    double collar_width = 0.0;                             // delta, in f units
    std::vector<std::pair<double, double>> collar_support;  // per node: [v - d, v + d]
};

inline LiftedGraphFunction lift_graph_function(const std::shared_ptr<const ReebGraph>& g,
                                               const GraphFunction& gf,
                                               double collar_factor = 3.0) {
    gf.validate(*g);
    const TriMesh& m = *g->mesh;
    double max_grad = 0.0;
    for (int v = 0; v < m.vertex_count(); v += 3)
        max_grad = std::max(max_grad, g->field.gradient(m.vertices[v]).norm());
    const double delta = collar_factor * m.resolution * std::max(max_grad, 1e-12);

    auto gf_ptr = std::make_shared<const GraphFunction>(gf);
    LiftedGraphFunction out;
    out.collar_width = delta;
    // effective per-node support: the blend is capped at a third of each
    // incident edge's span
    for (const auto& n : g->nodes) {
        double d = 0.0;
        for (const auto& e : g->edges)
            if (e.node_lo == n.id || e.node_hi == n.id)
                d = std::max(d, std::min(delta, (e.v_hi - e.v_lo) / 3));
        out.collar_support.push_back({n.value - d, n.value + d});
    }

    out.field.fd_step = 1e-6;
    const size_t n_charts = g->mesh->surface->charts.size();
    for (size_t ci = 0; ci < n_charts; ++ci) {
        const int chart = (int)ci;
        ScalarField::ChartFns cf;
        cf.value = [g, gf_ptr, delta, chart](Vec2 p) {
            const ChartPoint x{chart, p};
            const GraphPoint gp = quotient_point(*g, x);
            if (gp.is_node) return gf_ptr->node_value(gp.id);
            const ReebEdge& e = g->edges[gp.id];
            const double raw_v = g->field.value(x);
            const double v = g->circle_cut ? wrap_periodic(raw_v, g->period) : raw_v;
            const double span = e.v_hi - e.v_lo;
            const double t = std::clamp((v - e.v_lo) / span, 0.0, 1.0);
            double val = gf_ptr->eval_edge(*g, gp.id, t);
            const double de = std::min(delta, span / 3);
            // quintic step: C2 across the collar ends, so finite-difference
            // Jacobians of shift maps stay second-order accurate
            auto smooth = [](double s) { return s * s * s * (10 + s * (6 * s - 15)); };
            if (v < e.v_lo + de) {
                const double nv = gf_ptr->node_value(e.node_lo);
                val = nv + (val - nv) * smooth((v - e.v_lo) / de);
            }
            if (v > e.v_hi - de) {
                const double nv = gf_ptr->node_value(e.node_hi);
                val = nv + (val - nv) * smooth((e.v_hi - v) / de);
            }
            return val;
        };
        out.field.charts.push_back(cf);
    }
    return out;
}

/// Points along the level component of {f = v} through the given triangle:
/// one marching point per crossing triangle, refined onto the analytic level.
/// The seed may sit on a mesh vertex ring where the level grazes a triangle;
/// nearby triangles are searched for the actual crossing.
inline std::vector<ChartPoint> level_component_points(const ReebGraph& g, double v,
                                                      int seed_triangle) {
    const TriMesh& m = *g.mesh;
    const auto lc = detail::level_components(m, v);
    auto it = lc.tri2comp.find(seed_triangle);
    if (it == lc.tri2comp.end()) {
        std::vector<int> frontier = {seed_triangle};
        for (int depth = 0; depth < 3 && it == lc.tri2comp.end(); ++depth) {
            std::vector<int> next;
            for (int t : frontier)
                for (int nb : m.tri_neighbors[t]) {
                    if (nb < 0) continue;
                    if ((it = lc.tri2comp.find(nb)) != lc.tri2comp.end()) break;
                    next.push_back(nb);
                }
            frontier = std::move(next);
        }
        if (it == lc.tri2comp.end())
            throw std::runtime_error(
                "level_component_points: no level crossing near the seed triangle");
    }
    const int comp = it->second;
    std::vector<ChartPoint> pts;
    for (const auto& [t, c] : lc.tri2comp) {
        if (c != comp) continue;
        for (int k = 0; k < 3; ++k) {
            const int a = m.triangles[t][k], b = m.triangles[t][(k + 1) % 3];
            if ((m.values[a] <= v) == (m.values[b] <= v)) continue;
            const double u = (v - m.values[a]) / (m.values[b] - m.values[a]);
            Vec2 p = m.tri_coords[t][k] + (m.tri_coords[t][(k + 1) % 3] - m.tri_coords[t][k]) * u;
            ChartPoint z = m.surface->canonicalize({m.tri_chart[t], p});
            for (int n = 0; n < 4; ++n) {  // project onto the analytic level
                const double r = g.field.value_difference(g.field.value(z), v);
                if (std::abs(r) < 1e-13) break;
                const Vec2 gr = g.field.gradient(z);
                const double n2 = gr.norm2();
                if (n2 < 1e-20) break;
                z.p = z.p - gr * (r / n2);
            }
            pts.push_back(z);
            break;
        }
    }
    return pts;
}

struct ProjectionResult {
    bool constant_on_levels = false;
    double max_spread = 0.0;  // worst within-component variation of alpha
    GraphFunction fn;
};

/// eta: sample alpha along level components; NotConstant (constant_on_levels
/// = false) when any component sees a spread above tol, otherwise the edge
/// profiles of component means.  avoid_f_intervals excludes value bands
/// (typically the collar support of a lifted function) from the sampling.
inline ProjectionResult project_to_graph_function(
    const ScalarField& alpha, const ReebGraph& g, double tol, int params_per_edge = 13,
    const std::vector<std::pair<double, double>>& avoid_f_intervals = {}) {
    ProjectionResult out;
    for (const auto& n : g.nodes) out.fn.node_values[n.id] = alpha.value(n.anchor);

    for (const auto& e : g.edges) {
        GraphFunction::Profile prof;
        for (int k = 0; k < params_per_edge; ++k) {
            const double t = 0.2 + 0.6 * k / (params_per_edge - 1);
            const double v = e.v_lo + t * (e.v_hi - e.v_lo);
            bool excluded = false;
            for (const auto& [lo, hi] : avoid_f_intervals)
                if (v >= lo && v <= hi) excluded = true;
            if (excluded) continue;
            const ChartPoint p0 = point_on_edge_at_value(g, e.id, v);
            const int seed = g.mesh->locate(p0, 1e-7);
            if (seed < 0) throw std::runtime_error("projection: lost the level representative");
            const auto pts = level_component_points(g, v, seed);
            double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0;
            for (const auto& z : pts) {
                const double a = alpha.value(z);
                lo = std::min(lo, a);
                hi = std::max(hi, a);
                mean += a;
            }
            mean /= (double)pts.size();
            out.max_spread = std::max(out.max_spread, hi - lo);
            prof.points.push_back({t, mean});
        }
        out.fn.edge_profiles[e.id] = prof;
    }
    out.constant_on_levels = out.max_spread <= tol;
    return out;
}

struct CentralizerCheck {
    double max_abs_dalpha = 0.0;
    int used_samples = 0;
    bool passed = false;
};

/// max |d alpha (H)| over random samples; lifted graph functions may exclude
/// their node collars (the smoothing support) from the requirement.
inline CentralizerCheck centralizer_check(const SurfaceModel& surface, const ScalarField& alpha,
                                          const PlanarVectorField& h, int sample_count, double tol,
                                          uint64_t seed = 101,
                                          const ScalarField* f = nullptr,
                                          const std::vector<std::pair<double, double>>&
                                              exclude_f_intervals = {}) {
    CentralizerCheck out;
    Rng rng(seed);
    auto pts = random_surface_points(surface, sample_count, rng, 1e-3);
    for (const auto& z : pts) {
        if (f && !exclude_f_intervals.empty()) {
            const double v = f->value(z);
            bool excluded = false;
            for (const auto& [lo, hi] : exclude_f_intervals)
                if (v >= lo && v <= hi) excluded = true;
            if (excluded) continue;
        }
        ++out.used_samples;
        out.max_abs_dalpha =
            std::max(out.max_abs_dalpha, std::abs(dot(alpha.gradient(z), h.value(z))));
    }
    out.passed = out.max_abs_dalpha < tol;
    return out;
}

struct ShiftVerification {
    double max_f_drift = 0.0;
    double max_ratio_deviation = 0.0;
    int samples = 0;
    bool f_preserved = false;
    bool omega_preserved = false;
    bool passed() const { return f_preserved && omega_preserved; }
};

struct GraphFunctionShift {
    ShiftMap map;
    LiftedGraphFunction lift;
    ShiftVerification report;
};

/// Realize a graph function as an f- and omega-preserving diffeomorphism:
/// the shift map of the lift, verified for f-invariance and unit density
/// ratio at random samples.
inline GraphFunctionShift symplectomorphism_from_graph_function(
    const std::shared_ptr<const ReebGraph>& g, const GraphFunction& gf, const ScalarField& f,
    const AreaForm& omega, int samples = 200, double f_tol = 1e-6, double ratio_tol = 1e-5,
    uint64_t seed = 303, bool throw_on_failure = true) {
    GraphFunctionShift out;
    out.lift = lift_graph_function(g, gf);
    FlowIntegrator integ;
    out.map = ShiftMap{g->mesh->surface, out.lift.field,
                       hamiltonian_field(f, omega), integ};

    Rng rng(seed);
    auto pts = random_surface_points(*g->mesh->surface, samples, rng, 1e-2);
    for (const auto& z : pts) {
        const ChartPoint w = shift_apply(out.map, z);
        out.report.max_f_drift =
            std::max(out.report.max_f_drift, f.value_distance(f.value(w), f.value(z)));
        // collar blends carry large third derivatives; the fine stencil keeps
        // the second-order finite-difference error below ratio_tol
        const auto pr = pullback_density_ratio(out.map, omega, z, 1e-6);
        out.report.max_ratio_deviation =
            std::max(out.report.max_ratio_deviation, std::abs(pr.ratio - 1.0));
    }
    out.report.samples = samples;
    out.report.f_preserved = out.report.max_f_drift < f_tol;
    out.report.omega_preserved = out.report.max_ratio_deviation < ratio_tol;
    if (throw_on_failure && !out.report.passed())
        throw std::runtime_error(
            out.report.f_preserved
                ? "graph-function shift map does not preserve the area form"
                : "graph-function shift map does not preserve f");
    return out;
}

}  // namespace hamreeb
