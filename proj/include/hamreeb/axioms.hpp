#pragma once

#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/critical_points.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

/// Admissibility of f: constancy and regularity on the boundary (B) and
/// recognizable local models at critical points (L).
struct AxiomReport {
    bool axiom_b_ok = false;
    std::vector<double> boundary_residuals;  // max |f - mean| per boundary component
    bool boundary_critical_found = false;
    bool axiom_l_ok = false;
    bool in_class_F = false;
    bool in_class_Morse = false;
};

inline AxiomReport check_axioms(const ScalarField& f, const SurfaceModel& surface,
                                const std::vector<CriticalPoint>& crit_list,
                                double boundary_tol = 1e-8) {
    AxiomReport r;
    r.axiom_b_ok = true;
    const int samples = 256;
    for (const auto& bc : surface.boundary) {
        double mean = 0.0;
        std::vector<double> vals(samples);
        const double v0 = f.value({bc.chart, bc.curve(0.0)});
        for (int i = 0; i < samples; ++i) {
            const double raw = f.value({bc.chart, bc.curve((double)i / samples)});
            // lift circle values into the branch of the first sample
            vals[i] = v0 + f.value_difference(raw, v0);
            mean += vals[i];
        }
        mean /= samples;
        double res = 0.0;
        for (double v : vals) res = std::max(res, std::abs(v - mean));
        r.boundary_residuals.push_back(res);
        if (res > boundary_tol) r.axiom_b_ok = false;
        // regularity on the boundary
        for (int i = 0; i < samples; i += 8)
            if (f.gradient({bc.chart, bc.curve((double)i / samples)}).norm() < boundary_tol)
                r.axiom_b_ok = false;
    }
    for (const auto& cp : crit_list)
        if (interior_distance(surface, cp.position) < 1e-6) {
            r.boundary_critical_found = true;
            r.axiom_b_ok = false;
        }

    r.axiom_l_ok = true;
    bool all_nondeg = true;
    for (const auto& cp : crit_list) {
        const bool nondeg = cp.kind == CriticalKind::NondegMin ||
                            cp.kind == CriticalKind::NondegMax ||
                            cp.kind == CriticalKind::NondegSaddle;
        if (!nondeg) all_nondeg = false;
        const bool declared_ok =
            cp.kind == CriticalKind::DeclaredHomogeneous && cp.declared_square_free;
        if (!nondeg && !declared_ok) r.axiom_l_ok = false;
    }
    r.in_class_F = r.axiom_b_ok && r.axiom_l_ok;
    r.in_class_Morse = r.axiom_b_ok && all_nondeg;
    return r;
}

/// Predicted homotopy type of the group of f- and omega-preserving
/// diffeomorphisms isotopic to the identity: a circle for the four
/// extreme-only model cases, a point otherwise.
enum class HomotopyType { Contractible, CircleA, CircleB, CircleC, CircleD };

inline std::string to_string(HomotopyType t) {
    switch (t) {
        case HomotopyType::Contractible: return "contractible";
        case HomotopyType::CircleA: return "circle(A)";
        case HomotopyType::CircleB: return "circle(B)";
        case HomotopyType::CircleC: return "circle(C)";
        case HomotopyType::CircleD: return "circle(D)";
    }
    return "?";
}

inline bool is_circle_case(HomotopyType t) { return t != HomotopyType::Contractible; }

inline HomotopyType homotopy_case(const ScalarField& f, const SurfaceModel& surface,
                                  const AxiomReport& report,
                                  const std::vector<CriticalPoint>& crit_list) {
    if (!report.in_class_F)
        throw std::invalid_argument("homotopy_case: field is not in class F(M,P)");
    int mins = 0, maxs = 0;
    for (const auto& cp : crit_list) {
        if (cp.kind == CriticalKind::NondegMin)
            ++mins;
        else if (cp.kind == CriticalKind::NondegMax)
            ++maxs;
        else
            return HomotopyType::Contractible;  // a saddle or degenerate point
    }
    const int n = (int)crit_list.size();
    switch (surface.kind) {
        case SurfaceKind::Sphere:
            if (n == 2 && mins == 1 && maxs == 1) return HomotopyType::CircleA;
            break;
        case SurfaceKind::Disk:
            if (n == 1) return HomotopyType::CircleB;
            break;
        case SurfaceKind::PlanarSublevel:
            // a compact planar domain with connected boundary is a disk
            if (n == 1 && surface.boundary.size() == 1) return HomotopyType::CircleB;
            break;
        case SurfaceKind::Annulus:
            if (n == 0) return HomotopyType::CircleC;
            break;
        case SurfaceKind::FlatTorus:
            if (n == 0 && f.codomain == Codomain::Circle) return HomotopyType::CircleD;
            break;
    }
    return HomotopyType::Contractible;
}

}  // namespace hamreeb
