#pragma once

#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

/// Deterministic grid of interior points, spaced roughly by `step`.
/// `margin` keeps samples away from the boundary.
inline std::vector<ChartPoint> surface_grid_points(const SurfaceModel& s, double step,
                                                   double margin = 0.0) {
    std::vector<ChartPoint> pts;
    auto scan_chart = [&](int ci, double rmax) {
        const auto box = s.charts[ci].bbox();
        const int nx = std::max(2, (int)std::ceil((box[1] - box[0]) / step));
        const int ny = std::max(2, (int)std::ceil((box[3] - box[2]) / step));
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                const Vec2 p{box[0] + (box[1] - box[0]) * i / nx,
                             box[2] + (box[3] - box[2]) * j / ny};
                const ChartPoint z{ci, p};
                if (!s.charts[ci].contains(p)) continue;
                if (rmax > 0 && p.norm() > rmax) continue;
                if (s.kind == SurfaceKind::FlatTorus || s.kind == SurfaceKind::Annulus) {
                    // periodic duplicates at the far edge of the fundamental domain
                    if (s.charts[ci].period_x() > 0 && i == nx) continue;
                    if (s.charts[ci].period_y() > 0 && j == ny) continue;
                }
                if (margin > 0) {
                    if (s.kind == SurfaceKind::Disk && s.params.radius - p.norm() < margin)
                        continue;
                    if (s.kind == SurfaceKind::Annulus &&
                        std::min(p.y, s.params.height - p.y) < margin)
                        continue;
                    if (s.kind == SurfaceKind::PlanarSublevel) {
                        const auto& dom = std::get<Chart::Sublevel>(s.charts[0].domain);
                        if (dom.g(p) > dom.level - margin) continue;
                    }
                }
                pts.push_back(z);
            }
    };
    if (s.kind == SurfaceKind::Sphere) {
        scan_chart(0, 1.0);
        scan_chart(1, 0.999);  // chart 1 open hemisphere; equator owned by chart 0
    } else {
        scan_chart(0, 0.0);
    }
    return pts;
}

/// Random interior points by rejection from the chart bounding box.
inline std::vector<ChartPoint> random_surface_points(const SurfaceModel& s, int n, Rng& rng,
                                                     double margin = 0.0) {
    std::vector<ChartPoint> pts;
    int guard = 0;
    while ((int)pts.size() < n && guard++ < 1000 * n) {
        int ci = 0;
        if (s.kind == SurfaceKind::Sphere) ci = (int)(uniform(rng, 0, 2));
        const auto box = s.charts[ci].bbox();
        Vec2 p{uniform(rng, box[0], box[1]), uniform(rng, box[2], box[3])};
        if (!s.charts[ci].contains(p)) continue;
        if (s.kind == SurfaceKind::Sphere && p.norm() > 1.0) continue;
        if (margin > 0) {
            if (s.kind == SurfaceKind::Disk && s.params.radius - p.norm() < margin) continue;
            if (s.kind == SurfaceKind::Annulus && std::min(p.y, s.params.height - p.y) < margin)
                continue;
            if (s.kind == SurfaceKind::PlanarSublevel) {
                const auto& dom = std::get<Chart::Sublevel>(s.charts[0].domain);
                if (dom.g(p) > dom.level - margin) continue;
            }
        }
        pts.push_back({ci, p});
    }
    if ((int)pts.size() < n) throw std::runtime_error("random_surface_points: rejection stalled");
    return pts;
}

}  // namespace hamreeb
