#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "hamreeb/area_form.hpp"
#include "hamreeb/core.hpp"
#include "hamreeb/mesh.hpp"

namespace hamreeb {

/// Region of integration described against PL vertex data: the band
/// lo < sel <= hi of the selector samples, optionally restricted to a
/// triangle subset.  Crossing triangles are clipped by linear interpolation
/// of the level crossing (marching-triangles), which makes the quadrature
/// exactly additive over disjoint bands.
struct Region {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    std::shared_ptr<const std::vector<double>> selector;  // defaults to mesh.values
    std::function<bool(int)> tri_filter;

    static Region whole() { return {}; }
    static Region sublevel(double level) {
        Region r;
        r.hi = level;
        return r;
    }
    static Region band(double lo, double hi) {
        Region r;
        r.lo = lo;
        r.hi = hi;
        return r;
    }
};

namespace detail {

struct ClipVertex {
    Vec2 p;
    double v;
};

/// Sutherland-Hodgman style clip of a polygon against {keep(v)} with the
/// crossing point found by linear interpolation of the selector value.
template <class Keep>
inline std::vector<ClipVertex> clip_polygon(const std::vector<ClipVertex>& poly, double level,
                                            Keep keep) {
    std::vector<ClipVertex> out;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const ClipVertex& a = poly[i];
        const ClipVertex& b = poly[(i + 1) % n];
        const bool ka = keep(a.v), kb = keep(b.v);
        if (ka) out.push_back(a);
        if (ka != kb) {
            const double t = (level - a.v) / (b.v - a.v);
            out.push_back({a.p + (b.p - a.p) * t, level});
        }
    }
    return out;
}

inline double polygon_area(const std::vector<ClipVertex>& poly) {
    double s = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i].p;
        const Vec2& b = poly[(i + 1) % poly.size()].p;
        s += cross(a, b);
    }
    return 0.5 * s;
}

}  // namespace detail

/// omega-area of the region: sum over triangles of clipped area times the
/// mean density over the clip polygon.  The density is sampled at the three
/// triangle corners and interpolated linearly, so the rule is second-order
/// accurate and exactly additive over disjoint bands of the same selector.
inline double integrate_density(const TriMesh& mesh, const AreaForm& form, const Region& region) {
    if (mesh.triangle_count() == 0) throw std::invalid_argument("integrate_density: empty mesh");
    const std::vector<double>& sel = region.selector ? *region.selector : mesh.values;
    const bool banded = region.lo > -std::numeric_limits<double>::infinity() ||
                        region.hi < std::numeric_limits<double>::infinity();
    if (banded && sel.size() != mesh.vertices.size())
        throw std::invalid_argument("integrate_density: selector samples missing");

    double total = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (region.tri_filter && !region.tri_filter(t)) continue;
        std::vector<detail::ClipVertex> poly(3);
        for (int k = 0; k < 3; ++k)
            poly[k] = {mesh.tri_coords[t][k], banded ? sel[mesh.triangles[t][k]] : 0.0};
        if (region.hi < std::numeric_limits<double>::infinity())
            poly = detail::clip_polygon(poly, region.hi,
                                        [&](double v) { return v <= region.hi; });
        if (poly.size() < 3) continue;
        if (region.lo > -std::numeric_limits<double>::infinity())
            poly = detail::clip_polygon(poly, region.lo,
                                        [&](double v) { return v > region.lo; });
        if (poly.size() < 3) continue;
        const double area = detail::polygon_area(poly);
        if (area <= 0) continue;

        // centroid of the clip polygon (exact)
        Vec2 centroid{0, 0};
        for (size_t i = 0; i < poly.size(); ++i) {
            const Vec2& a = poly[i].p;
            const Vec2& b = poly[(i + 1) % poly.size()].p;
            centroid += (a + b) * cross(a, b);
        }
        centroid = centroid / (6.0 * area);

        // linear interpolant of gamma from the triangle corners, evaluated at
        // the centroid: the exact mean of PL gamma over the polygon
        const auto& c = mesh.tri_coords[t];
        const double full = cross(c[1] - c[0], c[2] - c[0]);
        const double w0 = cross(c[1] - centroid, c[2] - centroid) / full;
        const double w1 = cross(c[2] - centroid, c[0] - centroid) / full;
        const double w2 = 1.0 - w0 - w1;
        const int ch = mesh.tri_chart[t];
        const double g = w0 * form.density({ch, c[0]}) + w1 * form.density({ch, c[1]}) +
                         w2 * form.density({ch, c[2]});
        total += area * g;
    }
    return total;
}

inline double surface_area(const TriMesh& mesh, const AreaForm& form) {
    return integrate_density(mesh, form, Region::whole());
}

}  // namespace hamreeb
