#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

/// Triangulated surface.  Vertices live in chart coordinates; triangles store
/// seam-unwrapped copies of their corner coordinates so geometric predicates
/// work across periodic identifications.
struct TriMesh {
    std::shared_ptr<const SurfaceModel> surface;
    double resolution = 0.0;

    std::vector<ChartPoint> vertices;
    std::vector<bool> boundary_flag;
    std::vector<std::array<int, 3>> triangles;   // CCW in chart coordinates
    std::vector<int> tri_chart;                  // chart the triangle is drawn in
    std::vector<std::array<Vec2, 3>> tri_coords; // unwrapped corner coordinates
    std::vector<double> values;                  // per-vertex samples (see sample_field)

    std::vector<std::array<int, 3>> tri_neighbors;  // across edge (k, k+1), -1 if boundary

    int vertex_count() const { return (int)vertices.size(); }
    int triangle_count() const { return (int)triangles.size(); }

    /// (value, index) comparison: symbolic perturbation making samples distinct.
    bool value_less(int i, int j) const {
        if (values[i] != values[j]) return values[i] < values[j];
        return i < j;
    }

    double tri_area(int t) const {
        const auto& c = tri_coords[t];
        return 0.5 * cross(c[1] - c[0], c[2] - c[0]);
    }

    Vec2 tri_centroid(int t) const {
        const auto& c = tri_coords[t];
        return (c[0] + c[1] + c[2]) / 3.0;
    }

    int euler_characteristic() const {
        std::map<std::pair<int, int>, int> edges;
        for (const auto& tr : triangles)
            for (int k = 0; k < 3; ++k)
                edges[{std::min(tr[k], tr[(k + 1) % 3]), std::max(tr[k], tr[(k + 1) % 3])}]++;
        return vertex_count() - (int)edges.size() + triangle_count();
    }

    int boundary_edge_count() const {
        int n = 0;
        for (const auto& nb : tri_neighbors)
            for (int k = 0; k < 3; ++k)
                if (nb[k] < 0) ++n;
        return n;
    }

    /// Number of closed loops formed by boundary edges.
    int boundary_loop_count() const {
        std::map<int, int> next;  // boundary edge as vertex->vertex
        for (int t = 0; t < triangle_count(); ++t)
            for (int k = 0; k < 3; ++k)
                if (tri_neighbors[t][k] < 0) next[triangles[t][k]] = triangles[t][(k + 1) % 3];
        int loops = 0;
        std::map<int, bool> seen;
        for (const auto& [v0, v1] : next) {
            if (seen[v0]) continue;
            int v = v0;
            while (!seen[v]) {
                seen[v] = true;
                v = next.at(v);
            }
            ++loops;
        }
        return loops;
    }

    // --- point location ------------------------------------------------

    struct Locator {
        double cell = 0.1;
        int nx = 1, ny = 1;
        double x0 = 0, y0 = 0;
        bool wrap_x = false, wrap_y = false;
        double px = 0, py = 0;
        std::vector<std::vector<int>> cells;
    };
    mutable std::vector<Locator> locators;  // per chart, built lazily

    void build_locators() const {
        locators.assign(surface->charts.size(), {});
        for (size_t c = 0; c < surface->charts.size(); ++c) {
            auto& L = locators[c];
            const auto box = surface->charts[c].bbox();
            L.px = surface->charts[c].period_x();
            L.py = surface->charts[c].period_y();
            L.wrap_x = L.px > 0;
            L.wrap_y = L.py > 0;
            L.cell = std::max(2.5 * resolution, 1e-6);
            L.x0 = box[0];
            L.y0 = box[2];
            L.nx = std::max(1, (int)std::ceil((box[1] - box[0]) / L.cell));
            L.ny = std::max(1, (int)std::ceil((box[3] - box[2]) / L.cell));
            L.cells.assign((size_t)L.nx * L.ny, {});
        }
        for (int t = 0; t < triangle_count(); ++t) {
            auto& L = locators[tri_chart[t]];
            double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
            for (const Vec2& v : tri_coords[t]) {
                lo_x = std::min(lo_x, v.x);
                hi_x = std::max(hi_x, v.x);
                lo_y = std::min(lo_y, v.y);
                hi_y = std::max(hi_y, v.y);
            }
            const int i0 = (int)std::floor((lo_x - L.x0) / L.cell);
            const int i1 = (int)std::floor((hi_x - L.x0) / L.cell);
            const int j0 = (int)std::floor((lo_y - L.y0) / L.cell);
            const int j1 = (int)std::floor((hi_y - L.y0) / L.cell);
            for (int i = i0; i <= i1; ++i)
                for (int j = j0; j <= j1; ++j) {
                    int ii = L.wrap_x ? ((i % L.nx) + L.nx) % L.nx : std::clamp(i, 0, L.nx - 1);
                    int jj = L.wrap_y ? ((j % L.ny) + L.ny) % L.ny : std::clamp(j, 0, L.ny - 1);
                    auto& bucket = L.cells[(size_t)jj * L.nx + ii];
                    if (bucket.empty() || bucket.back() != t) bucket.push_back(t);
                }
        }
    }

    bool point_in_triangle(int t, Vec2 q, double slack = 1e-12) const {
        const auto& c = tri_coords[t];
        const auto& L = locators[tri_chart[t]];
        // bring q to the triangle's unwrapped frame
        if (L.wrap_x) q.x = c[0].x + wrap_symmetric(q.x - c[0].x, L.px);
        if (L.wrap_y) q.y = c[0].y + wrap_symmetric(q.y - c[0].y, L.py);
        const double a = tri_area(t);
        if (a <= 0) return false;
        const double tol = -slack * std::max(1.0, a);
        const double w0 = cross(c[1] - q, c[2] - q);
        const double w1 = cross(c[2] - q, c[0] - q);
        const double w2 = cross(c[0] - q, c[1] - q);
        return w0 >= tol * 2 * a && w1 >= tol * 2 * a && w2 >= tol * 2 * a;
    }

    /// Triangle containing the point, or -1.  Tries the other sphere chart
    /// if the point is not covered in its own.
    int locate(const ChartPoint& zq, double slack = 1e-9) const {
        if (locators.empty()) build_locators();
        ChartPoint z = surface->canonicalize(zq);
        for (int attempt = 0; attempt < 2; ++attempt) {
            const auto& L = locators[z.chart];
            int i = (int)std::floor((z.p.x - L.x0) / L.cell);
            int j = (int)std::floor((z.p.y - L.y0) / L.cell);
            i = L.wrap_x ? ((i % L.nx) + L.nx) % L.nx : std::clamp(i, 0, L.nx - 1);
            j = L.wrap_y ? ((j % L.ny) + L.ny) % L.ny : std::clamp(j, 0, L.ny - 1);
            for (int t : L.cells[(size_t)j * L.nx + i])
                if (point_in_triangle(t, z.p, slack)) return t;
            // deeper slack pass over the 3x3 neighbourhood
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    int ii = L.wrap_x ? (((i + di) % L.nx) + L.nx) % L.nx
                                      : std::clamp(i + di, 0, L.nx - 1);
                    int jj = L.wrap_y ? (((j + dj) % L.ny) + L.ny) % L.ny
                                      : std::clamp(j + dj, 0, L.ny - 1);
                    for (int t : L.cells[(size_t)jj * L.nx + ii])
                        if (point_in_triangle(t, z.p, std::max(slack, 1e-7))) return t;
                }
            if (surface->kind != SurfaceKind::Sphere || attempt == 1) break;
            auto w = surface->to_chart(z, 1 - z.chart);
            if (!w) break;
            z = *w;
        }
        return -1;
    }
};

namespace detail {

inline void build_neighbors(TriMesh& m) {
    std::map<std::pair<int, int>, std::pair<int, int>> half;  // directed edge -> (tri, slot)
    m.tri_neighbors.assign(m.triangles.size(), {-1, -1, -1});
    for (int t = 0; t < m.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k) {
            const int a = m.triangles[t][k], b = m.triangles[t][(k + 1) % 3];
            if (half.count({a, b}))
                throw std::runtime_error("mesh: duplicated directed edge (orientation broken)");
            half[{a, b}] = {t, k};
        }
    for (const auto& [edge, slot] : half) {
        const auto rev = half.find({edge.second, edge.first});
        if (rev != half.end()) m.tri_neighbors[slot.first][slot.second] = rev->second.first;
    }
    // every undirected edge must be shared by at most two triangles; the
    // directed-edge uniqueness above already guarantees it
}

inline void fill_tri_coords(TriMesh& m) {
    m.tri_coords.resize(m.triangles.size());
    for (int t = 0; t < m.triangle_count(); ++t) {
        const Chart& c = m.surface->charts[m.tri_chart[t]];
        const double px = c.period_x(), py = c.period_y();
        std::array<Vec2, 3> co;
        for (int k = 0; k < 3; ++k) {
            const ChartPoint& v = m.vertices[m.triangles[t][k]];
            Vec2 q = v.p;
            if (v.chart != m.tri_chart[t]) {
                auto w = m.surface->to_chart(v, m.tri_chart[t]);
                if (!w) throw std::runtime_error("mesh: vertex not expressible in triangle chart");
                q = w->p;
            }
            co[k] = q;
        }
        if (px > 0)
            for (int k = 1; k < 3; ++k) co[k].x = co[0].x + wrap_symmetric(co[k].x - co[0].x, px);
        if (py > 0)
            for (int k = 1; k < 3; ++k) co[k].y = co[0].y + wrap_symmetric(co[k].y - co[0].y, py);
        m.tri_coords[t] = co;
    }
}

inline void orient_ccw(TriMesh& m) {
    fill_tri_coords(m);
    for (int t = 0; t < m.triangle_count(); ++t)
        if (m.tri_area(t) < 0) {
            std::swap(m.triangles[t][1], m.triangles[t][2]);
            std::swap(m.tri_coords[t][1], m.tri_coords[t][2]);
        }
}

/// Regular grid over a rectangle chart; periodic directions wrap indices.
inline void grid_rect_mesh(TriMesh& m, const Chart::Rect& r, double res) {
    const int nx = std::max(3, (int)std::llround((r.x1 - r.x0) / res));
    const int ny = std::max(3, (int)std::llround((r.y1 - r.y0) / res));
    const int vx = r.periodic_x ? nx : nx + 1;
    const int vy = r.periodic_y ? ny : ny + 1;
    const double hx = (r.x1 - r.x0) / nx, hy = (r.y1 - r.y0) / ny;
    auto vid = [&](int i, int j) { return (j % vy + vy) % vy * vx + (i % vx + vx) % vx; };
    for (int j = 0; j < vy; ++j)
        for (int i = 0; i < vx; ++i) {
            m.vertices.push_back({0, r.x0 + i * hx, r.y0 + j * hy});
            const bool on_y_bdry = !r.periodic_y && (j == 0 || j == vy - 1);
            const bool on_x_bdry = !r.periodic_x && (i == 0 || i == vx - 1);
            m.boundary_flag.push_back(on_x_bdry || on_y_bdry);
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            // consistent diagonal (i,j) -> (i+1,j+1)
            m.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            m.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
            m.tri_chart.push_back(0);
            m.tri_chart.push_back(0);
        }
}

/// Concentric-ring disk mesh with a common angular count; returns the vertex
/// ids of the outermost ring in angular order.
inline std::vector<int> disk_mesh(TriMesh& m, int chart, double radius, double res,
                                  bool outer_is_boundary) {
    const int base = m.vertex_count();
    const int rings = std::max(2, (int)std::llround(radius / res));
    const int n = std::max(8, (int)std::llround(2 * kPi * radius / res));
    m.vertices.push_back({chart, 0.0, 0.0});
    m.boundary_flag.push_back(false);
    auto vid = [&](int ring, int j) { return base + 1 + (ring - 1) * n + ((j % n) + n) % n; };
    for (int ring = 1; ring <= rings; ++ring) {
        const double r = radius * ring / rings;
        for (int j = 0; j < n; ++j) {
            const double a = 2 * kPi * j / n;
            m.vertices.push_back({chart, r * std::cos(a), r * std::sin(a)});
            m.boundary_flag.push_back(outer_is_boundary && ring == rings);
        }
    }
    for (int j = 0; j < n; ++j) {
        m.triangles.push_back({base, vid(1, j), vid(1, j + 1)});
        m.tri_chart.push_back(chart);
    }
    for (int ring = 1; ring < rings; ++ring)
        for (int j = 0; j < n; ++j) {
            m.triangles.push_back({vid(ring, j), vid(ring + 1, j), vid(ring + 1, j + 1)});
            m.triangles.push_back({vid(ring, j), vid(ring + 1, j + 1), vid(ring, j + 1)});
            m.tri_chart.push_back(chart);
            m.tri_chart.push_back(chart);
        }
    std::vector<int> rim(n);
    for (int j = 0; j < n; ++j) rim[j] = vid(rings, j);
    return rim;
}

/// Clip a grid triangulation of the bounding box against {g <= level}.
inline void sublevel_mesh(TriMesh& m, const Chart::Sublevel& dom, double res) {
    const auto& g = dom.g;
    const double c = dom.level;
    const int nx = std::max(3, (int)std::ceil((dom.x1 - dom.x0) / res));
    const int ny = std::max(3, (int)std::ceil((dom.y1 - dom.y0) / res));
    const double hx = (dom.x1 - dom.x0) / nx, hy = (dom.y1 - dom.y0) / ny;

    std::vector<Vec2> grid_pos((size_t)(nx + 1) * (ny + 1));
    std::vector<double> gv((size_t)(nx + 1) * (ny + 1));
    auto gid = [&](int i, int j) { return (size_t)j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const Vec2 p{dom.x0 + i * hx, dom.y0 + j * hy};
            grid_pos[gid(i, j)] = p;
            gv[gid(i, j)] = g(p);
        }

    std::vector<int> vert_of_grid((size_t)(nx + 1) * (ny + 1), -1);
    auto inside = [&](size_t id) { return gv[id] <= c; };
    auto grid_vertex = [&](int i, int j) {
        const size_t id = gid(i, j);
        if (vert_of_grid[id] < 0) {
            vert_of_grid[id] = m.vertex_count();
            m.vertices.push_back({0, grid_pos[id]});
            m.boundary_flag.push_back(false);
        }
        return vert_of_grid[id];
    };

    std::map<std::pair<size_t, size_t>, int> cut_vertex;
    auto crossing_vertex = [&](size_t ida, size_t idb) {
        const auto key = std::minmax(ida, idb);
        if (auto it = cut_vertex.find({key.first, key.second}); it != cut_vertex.end())
            return it->second;
        Vec2 a = grid_pos[ida], b = grid_pos[idb];
        double fa = gv[ida] - c, fb = gv[idb] - c;
        // bisection on the segment, then a few secant steps
        for (int it = 0; it < 60; ++it) {
            const Vec2 mid = (a + b) * 0.5;
            const double fm = g(mid) - c;
            if ((fm > 0) == (fa > 0))
                a = mid, fa = fm;
            else
                b = mid, fb = fm;
            if ((b - a).norm() < 1e-13) break;
        }
        const int v = m.vertex_count();
        m.vertices.push_back({0, (a + b) * 0.5});
        m.boundary_flag.push_back(true);
        cut_vertex[{key.first, key.second}] = v;
        return v;
    };

    auto emit = [&](int a, int b, int cc) {
        m.triangles.push_back({a, b, cc});
        m.tri_chart.push_back(0);
    };

    auto clip_triangle = [&](std::array<std::pair<int, int>, 3> corners) {
        size_t ids[3];
        bool in[3];
        for (int k = 0; k < 3; ++k) {
            ids[k] = gid(corners[k].first, corners[k].second);
            in[k] = inside(ids[k]);
        }
        const int n_in = in[0] + in[1] + in[2];
        if (n_in == 0) return;
        if (n_in == 3) {
            emit(grid_vertex(corners[0].first, corners[0].second),
                 grid_vertex(corners[1].first, corners[1].second),
                 grid_vertex(corners[2].first, corners[2].second));
            return;
        }
        // rotate so the pattern starts at a distinguished corner
        int s = 0;
        if (n_in == 1)
            while (!in[s]) ++s;
        else
            while (in[s]) ++s;  // s = the single outside corner
        const int k0 = s, k1 = (s + 1) % 3, k2 = (s + 2) % 3;
        if (n_in == 1) {
            const int a = grid_vertex(corners[k0].first, corners[k0].second);
            const int pab = crossing_vertex(ids[k0], ids[k1]);
            const int pca = crossing_vertex(ids[k2], ids[k0]);
            emit(a, pab, pca);
        } else {
            const int b = grid_vertex(corners[k1].first, corners[k1].second);
            const int cc = grid_vertex(corners[k2].first, corners[k2].second);
            const int pab = crossing_vertex(ids[k0], ids[k1]);
            const int pca = crossing_vertex(ids[k2], ids[k0]);
            emit(b, cc, pca);
            emit(b, pca, pab);
        }
    };

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            clip_triangle({{{i, j}, {i + 1, j}, {i + 1, j + 1}}});
            clip_triangle({{{i, j}, {i + 1, j + 1}, {i, j + 1}}});
        }
}

}  // namespace detail

/// Triangulate the surface at a target edge length.
inline TriMesh triangulate(const std::shared_ptr<const SurfaceModel>& surface, double resolution) {
    if (resolution <= 0) throw std::invalid_argument("triangulate: resolution must be positive");
    TriMesh m;
    m.surface = surface;
    m.resolution = resolution;

    for (size_t a = 0; a < surface->params.landmarks.size(); ++a)
        for (size_t b = a + 1; b < surface->params.landmarks.size(); ++b) {
            const double d =
                (surface->params.landmarks[a] - surface->params.landmarks[b]).norm();
            if (d < 3 * resolution)
                throw std::invalid_argument(
                    "triangulate: resolution too coarse to separate declared critical points");
        }

    switch (surface->kind) {
        case SurfaceKind::Disk:
            detail::disk_mesh(m, 0, surface->params.radius, resolution, true);
            break;
        case SurfaceKind::Annulus:
        case SurfaceKind::FlatTorus:
            detail::grid_rect_mesh(m, std::get<Chart::Rect>(surface->charts[0].domain),
                                   resolution);
            break;
        case SurfaceKind::Sphere: {
            auto rim0 = detail::disk_mesh(m, 0, 1.0, resolution, false);
            const int offset = m.vertex_count();
            auto rim1 = detail::disk_mesh(m, 1, 1.0, resolution, false);
            const int first_tri_chart1 = 0;
            (void)first_tri_chart1;
            // stitch: chart-1 rim vertex at angle a matches the chart-0 rim
            // vertex at angle -a (the transition flips y on the equator)
            const int n = (int)rim0.size();
            std::vector<int> remap(m.vertex_count());
            for (int i = 0; i < m.vertex_count(); ++i) remap[i] = i;
            for (int j = 0; j < n; ++j) {
                const int target = rim0[((n - j) % n + n) % n];
                const Vec2 a = m.vertices[rim1[j]].p;
                const Vec2 b = m.vertices[target].p;
                if ((Vec2{b.x, -b.y} - a).norm() > resolution / 4)
                    throw std::runtime_error("sphere stitch: rim vertices do not match");
                remap[rim1[j]] = target;
            }
            // drop the duplicated rim vertices, compacting indices
            std::vector<int> compact(m.vertex_count(), -1);
            TriMesh out;
            out.surface = m.surface;
            out.resolution = resolution;
            for (int i = 0; i < m.vertex_count(); ++i) {
                if (remap[i] != i) continue;
                compact[i] = out.vertex_count();
                out.vertices.push_back(m.vertices[i]);
                out.boundary_flag.push_back(false);
            }
            for (size_t t = 0; t < m.triangles.size(); ++t) {
                std::array<int, 3> tr;
                for (int k = 0; k < 3; ++k) tr[k] = compact[remap[m.triangles[t][k]]];
                out.triangles.push_back(tr);
                out.tri_chart.push_back(m.tri_chart[t]);
            }
            (void)offset;
            m = std::move(out);
            break;
        }
        case SurfaceKind::PlanarSublevel:
            detail::sublevel_mesh(m, std::get<Chart::Sublevel>(surface->charts[0].domain),
                                  resolution);
            break;
    }
    detail::orient_ccw(m);
    detail::build_neighbors(m);

    // boundary edges must lie on declared boundary components
    if (surface->closed() && m.boundary_edge_count() != 0)
        throw std::runtime_error("triangulate: closed surface produced boundary edges");
    return m;
}

/// Fill vertex values with (chartwise lifted) field samples.
inline void sample_field(TriMesh& m, const ScalarField& f) {
    m.values.resize(m.vertices.size());
    for (size_t i = 0; i < m.vertices.size(); ++i) m.values[i] = f.value(m.vertices[i]);
}

}  // namespace hamreeb
