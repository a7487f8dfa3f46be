#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/scalar_field.hpp"

namespace hamreeb {

enum class SurfaceKind { Disk, Annulus, FlatTorus, Sphere, PlanarSublevel };

inline std::string to_string(SurfaceKind k) {
    switch (k) {
        case SurfaceKind::Disk: return "disk";
        case SurfaceKind::Annulus: return "annulus";
        case SurfaceKind::FlatTorus: return "torus";
        case SurfaceKind::Sphere: return "sphere";
        case SurfaceKind::PlanarSublevel: return "planar-sublevel";
    }
    return "?";
}

struct RectDomain {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool periodic_x = false, periodic_y = false;
};
struct DiskDomain {
    double radius = 1.0;
};
struct SublevelDomain {
    std::function<double(Vec2)> g;
    double level = 0.0;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // bounding box
};

/// A planar chart domain.  Rectangles may be periodic in either direction
/// (cylinder and torus quotients); disks are used for the disk surface and
/// the two sphere charts; sublevel domains carry the defining function.
struct Chart {
    int id = 0;

    using Rect = RectDomain;
    using Disk = DiskDomain;
    using Sublevel = SublevelDomain;
    std::variant<Rect, Disk, Sublevel> domain;

    bool contains(Vec2 p, double slack = 0.0) const {
        if (const auto* r = std::get_if<Rect>(&domain)) {
            const bool okx = r->periodic_x || (p.x >= r->x0 - slack && p.x <= r->x1 + slack);
            const bool oky = r->periodic_y || (p.y >= r->y0 - slack && p.y <= r->y1 + slack);
            return okx && oky;
        }
        if (const auto* d = std::get_if<Disk>(&domain)) return p.norm() <= d->radius + slack;
        const auto& s = std::get<Sublevel>(domain);
        return s.g(p) <= s.level + slack;
    }

    /// Axis-aligned bounding box of the domain.
    std::array<double, 4> bbox() const {
        if (const auto* r = std::get_if<Rect>(&domain)) return {r->x0, r->x1, r->y0, r->y1};
        if (const auto* d = std::get_if<Disk>(&domain))
            return {-d->radius, d->radius, -d->radius, d->radius};
        const auto& s = std::get<Sublevel>(domain);
        return {s.x0, s.x1, s.y0, s.y1};
    }

    double period_x() const {
        const auto* r = std::get_if<Rect>(&domain);
        return (r && r->periodic_x) ? r->x1 - r->x0 : 0.0;
    }
    double period_y() const {
        const auto* r = std::get_if<Rect>(&domain);
        return (r && r->periodic_y) ? r->y1 - r->y0 : 0.0;
    }
};

/// Orientation-preserving coordinate change between two charts.
struct Transition {
    int from = 0, to = 0;
    std::function<Vec2(Vec2)> map;
    std::function<Mat2(Vec2)> jacobian;
};

/// Closed boundary curve in one chart, parametrized by t in [0,1).
struct BoundaryComponent {
    int chart = 0;
    std::function<Vec2(double)> curve;
    double length = 0.0;
};

struct SurfaceParams {
    double radius = 1.0;                        // disk
    double period_x = 1.0, period_y = 1.0;      // torus / annulus circumference
    double height = 1.0;                        // annulus transversal extent
    std::shared_ptr<const ScalarField> g;       // planar sublevel
    double level = 0.0;
    std::array<double, 4> bbox = {0, 0, 0, 0};  // planar sublevel search box
    double trace_resolution = 0.01;             // boundary tracing grid
    std::vector<Vec2> landmarks;                // points triangulation must separate
};

struct SurfaceModel {
    SurfaceKind kind = SurfaceKind::Disk;
    std::vector<Chart> charts;
    std::vector<Transition> transitions;
    std::vector<BoundaryComponent> boundary;
    SurfaceParams params;

    // Sphere charts overlap in an annular band; beyond switch_radius a point
    // is re-expressed in the opposite chart.
    double sphere_cover_radius = 1.25;
    double sphere_switch_radius = 1.1;

    bool closed() const { return boundary.empty(); }

    /// Wrap periodic coordinates into the fundamental domain.
    ChartPoint canonicalize(ChartPoint z) const {
        const Chart& c = charts.at(z.chart);
        if (const auto* r = std::get_if<Chart::Rect>(&c.domain)) {
            if (r->periodic_x) z.p.x = r->x0 + wrap_periodic(z.p.x - r->x0, r->x1 - r->x0);
            if (r->periodic_y) z.p.y = r->y0 + wrap_periodic(z.p.y - r->y0, r->y1 - r->y0);
        }
        return z;
    }

    std::optional<ChartPoint> to_chart(const ChartPoint& z, int target) const {
        if (z.chart == target) return z;
        for (const auto& t : transitions)
            if (t.from == z.chart && t.to == target) {
                const Vec2 q = t.map(z.p);
                if (charts.at(target).contains(q, 1e-9)) return ChartPoint{target, q};
                return std::nullopt;
            }
        return std::nullopt;
    }

    /// Re-express z in the chart best suited for numerics (sphere only).
    ChartPoint prefer_chart(const ChartPoint& z) const {
        if (kind != SurfaceKind::Sphere) return canonicalize(z);
        if (z.p.norm() > sphere_switch_radius) {
            const int other = 1 - z.chart;
            if (auto w = to_chart(z, other)) return *w;
        }
        return z;
    }

    bool contains(const ChartPoint& z, double slack = 0.0) const {
        return charts.at(z.chart).contains(z.p, slack);
    }

    /// Chart distance honouring periodic identifications in-chart.
    double distance(const ChartPoint& a, const ChartPoint& b) const {
        ChartPoint bb = b;
        if (a.chart != b.chart) {
            auto w = to_chart(b, a.chart);
            if (!w) return std::numeric_limits<double>::infinity();
            bb = *w;
        }
        const Chart& c = charts.at(a.chart);
        double dx = a.p.x - bb.p.x, dy = a.p.y - bb.p.y;
        if (const double px = c.period_x(); px > 0) dx = wrap_symmetric(dx, px);
        if (const double py = c.period_y(); py > 0) dy = wrap_symmetric(dy, py);
        return std::sqrt(dx * dx + dy * dy);
    }
};

namespace detail {

/// Trace the closed loops of {g = level} over a grid on the bounding box by
/// marching squares, Newton-refining every emitted point onto the exact level.
inline std::vector<std::vector<Vec2>> trace_level_loops(const std::function<double(Vec2)>& g,
                                                        const std::function<Vec2(Vec2)>& grad,
                                                        double level,
                                                        std::array<double, 4> box, double res) {
    const int nx = std::max(4, (int)std::ceil((box[1] - box[0]) / res));
    const int ny = std::max(4, (int)std::ceil((box[3] - box[2]) / res));
    const double hx = (box[1] - box[0]) / nx, hy = (box[3] - box[2]) / ny;
    auto corner = [&](int i, int j) { return Vec2{box[0] + i * hx, box[2] + j * hy}; };

    auto refine = [&](Vec2 p) {
        for (int it = 0; it < 6; ++it) {
            const double r = g(p) - level;
            const Vec2 gr = grad(p);
            const double n2 = gr.norm2();
            if (n2 < 1e-16) break;
            p = p - gr * (r / n2);
            if (std::abs(g(p) - level) < 1e-13) break;
        }
        return p;
    };

    // Cell-edge crossings; each cell of the grid contributes segments joining
    // crossings on its four edges (ambiguous saddle cells split arbitrarily;
    // the Newton refinement keeps loops on the exact curve).
    struct EdgeKey {
        int i, j, dir;  // dir 0: horizontal edge from (i,j), 1: vertical
        bool operator<(const EdgeKey& o) const {
            return std::tie(i, j, dir) < std::tie(o.i, o.j, o.dir);
        }
    };
    std::map<EdgeKey, Vec2> crossing;
    auto edge_crossing = [&](EdgeKey k) -> std::optional<Vec2> {
        if (auto it = crossing.find(k); it != crossing.end()) return it->second;
        const Vec2 a = corner(k.i, k.j);
        const Vec2 b = k.dir == 0 ? corner(k.i + 1, k.j) : corner(k.i, k.j + 1);
        const double fa = g(a) - level, fb = g(b) - level;
        if ((fa > 0) == (fb > 0)) return std::nullopt;
        const double t = fa / (fa - fb);
        const Vec2 p = refine(a + (b - a) * t);
        crossing[k] = p;
        return p;
    };

    // adjacency between crossings through cells
    std::map<EdgeKey, std::vector<EdgeKey>> adj;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            std::vector<EdgeKey> hit;
            const EdgeKey edges[4] = {{i, j, 0}, {i, j, 1}, {i + 1, j, 1}, {i, j + 1, 0}};
            for (const auto& e : edges)
                if (edge_crossing(e)) hit.push_back(e);
            if (hit.size() == 2) {
                adj[hit[0]].push_back(hit[1]);
                adj[hit[1]].push_back(hit[0]);
            } else if (hit.size() == 4) {
                // pair by proximity of refined points
                const Vec2 p0 = *edge_crossing(hit[0]);
                double best = 1e300;
                int bi = 1;
                for (int k = 1; k < 4; ++k) {
                    const double d = (*edge_crossing(hit[k]) - p0).norm();
                    if (d < best) best = d, bi = k;
                }
                adj[hit[0]].push_back(hit[bi]);
                adj[hit[bi]].push_back(hit[0]);
                int rest[2], n = 0;
                for (int k = 1; k < 4; ++k)
                    if (k != bi) rest[n++] = k;
                adj[hit[rest[0]]].push_back(hit[rest[1]]);
                adj[hit[rest[1]]].push_back(hit[rest[0]]);
            }
        }

    std::vector<std::vector<Vec2>> loops;
    std::map<EdgeKey, bool> used;
    for (const auto& [start, nbrs] : adj) {
        if (used[start] || nbrs.size() != 2) continue;
        std::vector<Vec2> loop;
        EdgeKey cur = start, prev = start;
        bool closed_loop = false;
        for (size_t guard = 0; guard <= adj.size(); ++guard) {
            used[cur] = true;
            loop.push_back(*edge_crossing(cur));
            const auto& nb = adj[cur];
            if (nb.size() != 2) break;  // open chain: clipped by the box
            EdgeKey next = (guard == 0) ? nb[0] : ((nb[0] < prev || prev < nb[0]) ? nb[0] : nb[1]);
            prev = cur;
            cur = next;
            if (!(cur < start) && !(start < cur)) {
                closed_loop = true;
                break;
            }
        }
        if (closed_loop && loop.size() >= 8) loops.push_back(std::move(loop));
    }
    return loops;
}

/// Closed polyline as a parametrized boundary curve; an optional snap
/// projects interpolated points back onto the exact curve.
inline BoundaryComponent polyline_boundary(int chart, std::vector<Vec2> pts,
                                           std::function<Vec2(Vec2)> snap = nullptr) {
    std::vector<double> cum = {0.0};
    for (size_t i = 0; i + 1 <= pts.size(); ++i) {
        const Vec2 a = pts[i], b = pts[(i + 1) % pts.size()];
        cum.push_back(cum.back() + (b - a).norm());
    }
    const double total = cum.back();
    BoundaryComponent bc;
    bc.chart = chart;
    bc.length = total;
    bc.curve = [pts = std::move(pts), cum = std::move(cum), total,
                snap = std::move(snap)](double t) {
        const double s = wrap_periodic(t, 1.0) * total;
        size_t lo = 0, hi = cum.size() - 1;
        while (lo + 1 < hi) {
            const size_t mid = (lo + hi) / 2;
            (cum[mid] <= s ? lo : hi) = mid;
        }
        const double seg = cum[lo + 1] - cum[lo];
        const double u = seg > 0 ? (s - cum[lo]) / seg : 0.0;
        const Vec2 a = pts[lo], b = pts[(lo + 1) % pts.size()];
        const Vec2 p = a + (b - a) * u;
        return snap ? snap(p) : p;
    };
    return bc;
}

}  // namespace detail

inline SurfaceModel make_model_surface(SurfaceKind kind, const SurfaceParams& params) {
    SurfaceModel s;
    s.kind = kind;
    s.params = params;
    switch (kind) {
        case SurfaceKind::Disk: {
            if (params.radius <= 0) throw std::invalid_argument("disk: radius must be positive");
            Chart c;
            c.id = 0;
            c.domain = Chart::Disk{params.radius};
            s.charts.push_back(c);
            const double R = params.radius;
            BoundaryComponent bc;
            bc.chart = 0;
            bc.length = 2 * kPi * R;
            bc.curve = [R](double t) {
                return Vec2{R * std::cos(2 * kPi * t), R * std::sin(2 * kPi * t)};
            };
            s.boundary.push_back(bc);
            break;
        }
        case SurfaceKind::Annulus: {
            if (params.period_x <= 0 || params.height <= 0)
                throw std::invalid_argument("annulus: period and height must be positive");
            Chart c;
            c.id = 0;
            c.domain = Chart::Rect{0, params.period_x, 0, params.height, true, false};
            s.charts.push_back(c);
            for (const double y : {0.0, params.height}) {
                BoundaryComponent bc;
                bc.chart = 0;
                bc.length = params.period_x;
                const double px = params.period_x;
                bc.curve = [px, y](double t) { return Vec2{wrap_periodic(t, 1.0) * px, y}; };
                s.boundary.push_back(bc);
            }
            break;
        }
        case SurfaceKind::FlatTorus: {
            if (params.period_x <= 0 || params.period_y <= 0)
                throw std::invalid_argument("torus: periods must be positive");
            Chart c;
            c.id = 0;
            c.domain = Chart::Rect{0, params.period_x, 0, params.period_y, true, true};
            s.charts.push_back(c);
            break;
        }
        case SurfaceKind::Sphere: {
            // Two stereographic-style disk charts; the second carries a y-flip
            // so the transition u -> (u.x, -u.y)/|u|^2 preserves orientation.
            for (int id : {0, 1}) {
                Chart c;
                c.id = id;
                c.domain = Chart::Disk{s.sphere_cover_radius};
                s.charts.push_back(c);
            }
            auto inv = [](Vec2 p) {
                const double r2 = p.norm2();
                return Vec2{p.x / r2, -p.y / r2};
            };
            auto inv_jac = [](Vec2 p) {
                const double r2 = p.norm2(), r4 = r2 * r2;
                return Mat2{(p.y * p.y - p.x * p.x) / r4, -2 * p.x * p.y / r4,
                            2 * p.x * p.y / r4, (p.y * p.y - p.x * p.x) / r4};
            };
            s.transitions.push_back({0, 1, inv, inv_jac});
            s.transitions.push_back({1, 0, inv, inv_jac});
            break;
        }
        case SurfaceKind::PlanarSublevel: {
            if (!params.g) throw std::invalid_argument("planar-sublevel: missing defining field");
            const auto& gf = *params.g;
            auto gval = [&gf](Vec2 p) { return gf.value({0, p}); };
            auto ggrad = [&gf](Vec2 p) { return gf.gradient({0, p}); };
            Chart c;
            c.id = 0;
            Chart::Sublevel dom;
            dom.g = gval;
            dom.level = params.level;
            dom.x0 = params.bbox[0];
            dom.x1 = params.bbox[1];
            dom.y0 = params.bbox[2];
            dom.y1 = params.bbox[3];
            if (dom.x1 <= dom.x0 || dom.y1 <= dom.y0)
                throw std::invalid_argument("planar-sublevel: empty bounding box");
            c.domain = dom;
            s.charts.push_back(c);
            auto loops = detail::trace_level_loops(gval, ggrad, params.level, params.bbox,
                                                   params.trace_resolution);
            if (loops.empty())
                throw std::invalid_argument("planar-sublevel: level curve not found in box");
            auto snap = [gval, ggrad, level = params.level](Vec2 p) {
                for (int it = 0; it < 4; ++it) {
                    const double r = gval(p) - level;
                    const Vec2 gr = ggrad(p);
                    const double n2 = gr.norm2();
                    if (n2 < 1e-16 || std::abs(r) < 1e-13) break;
                    p = p - gr * (r / n2);
                }
                return p;
            };
            for (auto& loop : loops) {
                // regular-value requirement: the gradient must not vanish on
                // the boundary (a critical level would violate Axiom (B))
                for (const Vec2& p : loop)
                    if (ggrad(p).norm() < 1e-8)
                        throw std::invalid_argument(
                            "planar-sublevel: level is critical on the boundary");
                s.boundary.push_back(detail::polyline_boundary(0, std::move(loop), snap));
            }
            break;
        }
    }
    return s;
}

}  // namespace hamreeb
