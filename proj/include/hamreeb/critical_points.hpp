#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

enum class CriticalKind { NondegMin, NondegMax, NondegSaddle, DeclaredHomogeneous, Unclassified };

inline std::string to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::NondegMin: return "min";
        case CriticalKind::NondegMax: return "max";
        case CriticalKind::NondegSaddle: return "saddle";
        case CriticalKind::DeclaredHomogeneous: return "declared-homogeneous";
        case CriticalKind::Unclassified: return "unclassified";
    }
    return "?";
}

struct CriticalPoint {
    ChartPoint position;
    double value = 0.0;
    CriticalKind kind = CriticalKind::Unclassified;
    std::array<double, 2> hessian_eigs = {0, 0};
    double grad_norm = 0.0;
    int declared_degree = 0;
    bool declared_square_free = false;
};

struct CriticalSearch {
    std::vector<CriticalPoint> points;
    int diverged_seeds = 0;
    std::vector<ChartPoint> boundary_violations;  // converged onto the boundary (Axiom B)
    double hessian_scale = 0.0;
};

/// Signed distance of a point from the boundary into the interior (large for
/// closed surfaces).
inline double interior_distance(const SurfaceModel& s, const ChartPoint& z) {
    switch (s.kind) {
        case SurfaceKind::Disk:
            return s.params.radius - z.p.norm();
        case SurfaceKind::Annulus:
            return std::min(z.p.y, s.params.height - z.p.y);
        case SurfaceKind::FlatTorus:
        case SurfaceKind::Sphere:
            return std::numeric_limits<double>::infinity();
        case SurfaceKind::PlanarSublevel: {
            const auto& dom = std::get<Chart::Sublevel>(s.charts[0].domain);
            const double r = dom.level - dom.g(z.p);
            if (r <= 0) return r;
            // first-order distance estimate via the defining gradient
            const double h = 1e-6;
            const Vec2 g{(dom.g({z.p.x + h, z.p.y}) - dom.g({z.p.x - h, z.p.y})) / (2 * h),
                         (dom.g({z.p.x, z.p.y + h}) - dom.g({z.p.x, z.p.y - h})) / (2 * h)};
            return r / std::max(g.norm(), 1e-12);
        }
    }
    return 0.0;
}

namespace detail {

/// Growth exponent of |f - f(z0)| along rays, for validating a declared
/// homogeneous model: log2 of the ratio between radii r and r/2.
inline double ray_growth_exponent(const ScalarField& f, const ChartPoint& z0, double r) {
    const double f0 = f.value(z0);
    double acc = 0.0;
    int n = 0;
    for (int k = 0; k < 8; ++k) {
        const double a = 2 * kPi * k / 8;
        const Vec2 dir{std::cos(a), std::sin(a)};
        const double d1 =
            std::abs(f.value({z0.chart, z0.p + dir * r}) - f0);
        const double d2 =
            std::abs(f.value({z0.chart, z0.p + dir * (r / 2)}) - f0);
        if (d2 <= 0) continue;
        acc += std::log2(d1 / d2);
        ++n;
    }
    return n ? acc / n : 0.0;
}

}  // namespace detail

/// Newton refinement of grid seeds to |grad f| < tol; classification by the
/// Hessian eigenvalue signs.  Duplicates within 10*tol are merged, seeds that
/// diverge are counted and skipped, converged points on the boundary are
/// collected separately (they violate Axiom (B)).
inline CriticalSearch search_critical_points(const ScalarField& f, const SurfaceModel& surface,
                                             double grid_resolution, double tol) {
    if (tol <= 0 || grid_resolution <= 0)
        throw std::invalid_argument("search_critical_points: tol and resolution must be positive");
    CriticalSearch out;
    std::vector<CriticalPoint> found;

    for (size_t ci = 0; ci < surface.charts.size(); ++ci) {
        const Chart& chart = surface.charts[ci];
        const auto box = chart.bbox();
        const int nx = std::max(2, (int)std::ceil((box[1] - box[0]) / grid_resolution));
        const int ny = std::max(2, (int)std::ceil((box[3] - box[2]) / grid_resolution));
        const double diam = std::max(box[1] - box[0], box[3] - box[2]);

        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                Vec2 p{box[0] + (box[1] - box[0]) * i / nx, box[2] + (box[3] - box[2]) * j / ny};
                if (!chart.contains(p)) continue;
                // hessian scale for the classification threshold
                out.hessian_scale = std::max(
                    out.hessian_scale, f.hessian({(int)ci, p}).frobenius_norm());

                bool converged = false;
                for (int it = 0; it < 50; ++it) {
                    const Vec2 g = f.gradient({(int)ci, p});
                    Mat2 h = f.hessian({(int)ci, p});
                    if (std::abs(h.det()) < 1e-14 * std::max(1.0, h.frobenius_norm())) {
                        // singular Hessian: damped gradient step
                        const double n = g.norm();
                        if (n < tol) {
                            converged = true;
                            break;
                        }
                        p = p - g * std::min(0.1 * grid_resolution / n, 1.0);
                        continue;
                    }
                    const Vec2 step = h.inverse().apply(g);
                    p = p - step;
                    if (!std::isfinite(p.x) || !std::isfinite(p.y) ||
                        std::abs(p.x) + std::abs(p.y) > 10 * (diam + 1)) {
                        break;  // diverged
                    }
                    if (step.norm() < 1e-12) {
                        converged = true;
                        break;
                    }
                }
                if (!converged) {
                    ++out.diverged_seeds;
                    continue;
                }
                ChartPoint z = surface.canonicalize({(int)ci, p});
                const double gn = f.gradient(z).norm();
                if (gn >= tol) {
                    ++out.diverged_seeds;
                    continue;
                }
                if (interior_distance(surface, z) < tol) {
                    out.boundary_violations.push_back(z);
                    continue;
                }
                if (!surface.contains(z, tol)) continue;
                CriticalPoint cp;
                cp.position = z;
                cp.value = f.value(z);
                cp.grad_norm = gn;
                found.push_back(cp);
            }
    }

    // order-independent merge: sort by position, then deduplicate
    std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return std::tie(a.position.chart, a.position.p.x, a.position.p.y) <
               std::tie(b.position.chart, b.position.p.x, b.position.p.y);
    });
    const double merge_radius = 10 * tol;
    for (const auto& cp : found) {
        bool dup = false;
        for (const auto& kept : out.points)
            if (surface.distance(kept.position, cp.position) < merge_radius) {
                dup = true;
                break;
            }
        if (!dup) out.points.push_back(cp);
    }

    // Degenerate critical points appear as a cluster: the gradient tolerance
    // localizes a degree-d zero only to radius ~ tol^(1/(d-1)).  Collapse
    // groups of near-singular-Hessian points closer than a third of the seed
    // grid onto the member with the smallest gradient.
    {
        const double sing = 1e-8 * std::max(out.hessian_scale, 1e-30);
        std::vector<CriticalPoint> collapsed;
        std::vector<bool> used(out.points.size(), false);
        for (size_t i = 0; i < out.points.size(); ++i) {
            if (used[i]) continue;
            const Mat2 hi = f.hessian(out.points[i].position);
            if (std::abs(hi.det()) > sing * std::max(hi.frobenius_norm(), 1e-30)) {
                collapsed.push_back(out.points[i]);
                continue;
            }
            CriticalPoint best = out.points[i];
            for (size_t j = i + 1; j < out.points.size(); ++j) {
                if (used[j]) continue;
                const Mat2 hj = f.hessian(out.points[j].position);
                if (std::abs(hj.det()) > sing * std::max(hj.frobenius_norm(), 1e-30)) continue;
                if (surface.distance(out.points[i].position, out.points[j].position) >
                    grid_resolution / 3)
                    continue;
                used[j] = true;
                if (out.points[j].grad_norm < best.grad_norm) best = out.points[j];
            }
            collapsed.push_back(best);
        }
        out.points = std::move(collapsed);
    }

    // classification
    const double thresh = 1e-6 * std::max(out.hessian_scale, 1e-30);
    for (auto& cp : out.points) {
        const Mat2 h = f.hessian(cp.position);
        const auto eigs = h.symmetric_eigenvalues();
        cp.hessian_eigs = eigs;
        if (eigs[0] > thresh && eigs[1] > thresh)
            cp.kind = CriticalKind::NondegMin;
        else if (eigs[0] < -thresh && eigs[1] < -thresh)
            cp.kind = CriticalKind::NondegMax;
        else if (eigs[0] < -thresh && eigs[1] > thresh)
            cp.kind = CriticalKind::NondegSaddle;
        else {
            cp.kind = CriticalKind::Unclassified;
            for (const auto& decl : f.declared) {
                if (surface.distance(decl.position, cp.position) > grid_resolution / 2) continue;
                const double expo = detail::ray_growth_exponent(f, cp.position, 1e-2);
                if (std::abs(expo - decl.degree) <= 0.1 * decl.degree) {
                    cp.kind = CriticalKind::DeclaredHomogeneous;
                    cp.declared_degree = decl.degree;
                    cp.declared_square_free = decl.square_free;
                }
                break;
            }
        }
    }

    std::sort(out.points.begin(), out.points.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) {
                  return std::tie(a.value, a.position.p.x, a.position.p.y) <
                         std::tie(b.value, b.position.p.x, b.position.p.y);
              });
    return out;
}

inline std::vector<CriticalPoint> find_critical_points(const ScalarField& f,
                                                       const SurfaceModel& surface,
                                                       double grid_resolution, double tol) {
    return search_critical_points(f, surface, grid_resolution, tol).points;
}

}  // namespace hamreeb
