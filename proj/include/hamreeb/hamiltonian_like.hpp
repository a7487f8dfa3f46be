#pragma once

#include <optional>
#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/critical_points.hpp"
#include "hamreeb/sampling.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"
#include "hamreeb/vector_field.hpp"

namespace hamreeb {

/// Outcome of checking the three conditions of a Hamiltonian-like field:
/// (a) dV(f) = 0, (b) zeros exactly at critical points, (c) the exact local
/// form (-fhat_y, fhat_x) near each critical point.
struct HamiltonianLikeReport {
    bool a_annihilates_f = false;
    bool b_zeros_match = false;
    enum class LocalForm { Pass, Fail, Unverifiable } c_local_form = LocalForm::Unverifiable;
    double max_df_v = 0.0;
    double max_local_residual = 0.0;
    bool passed() const {
        return a_annihilates_f && b_zeros_match && c_local_form == LocalForm::Pass;
    }
};

/// Quadratic local model of a nondegenerate critical point: the second-order
/// Taylor form (without the constant).
inline Poly2 quadratic_model(const ScalarField& f, const ChartPoint& z) {
    const Mat2 h = f.hessian(z);
    Poly2 q;
    q.terms = {{2, 0, h.a / 2}, {1, 1, (h.b + h.c) / 2}, {0, 2, h.d / 2}};
    return q;
}

inline HamiltonianLikeReport is_hamiltonian_like(const SurfaceModel& surface,
                                                 const PlanarVectorField& v, const ScalarField& f,
                                                 const std::vector<CriticalPoint>& crit_list,
                                                 double tol = 1e-8, uint64_t seed = 23) {
    HamiltonianLikeReport rep;
    Rng rng(seed);
    auto pts = random_surface_points(surface, 300, rng, 1e-3);

    // (a) |df(V)| below tolerance everywhere sampled
    for (const auto& z : pts)
        rep.max_df_v = std::max(rep.max_df_v, std::abs(dot(f.gradient(z), v.value(z))));
    rep.a_annihilates_f = rep.max_df_v < tol;

    // (b) V vanishes at every critical point of f and nowhere else
    rep.b_zeros_match = true;
    for (const auto& cp : crit_list)
        if (v.value(cp.position).norm() > tol) rep.b_zeros_match = false;
    for (const auto& z : pts) {
        bool near_crit = false;
        for (const auto& cp : crit_list)
            if (surface.distance(z, cp.position) < 1e-2) near_crit = true;
        if (!near_crit && v.value(z).norm() < tol) rep.b_zeros_match = false;
    }

    // (c) exact local form on shrinking circles around each critical point
    rep.c_local_form = HamiltonianLikeReport::LocalForm::Pass;
    for (const auto& cp : crit_list) {
        std::optional<Poly2> model;
        if (cp.kind == CriticalKind::NondegMin || cp.kind == CriticalKind::NondegMax ||
            cp.kind == CriticalKind::NondegSaddle) {
            model = quadratic_model(f, cp.position);
        } else {
            for (const auto& d : f.declared)
                if (surface.distance(d.position, cp.position) < 1e-6 && d.local_model)
                    model = d.local_model;
        }
        if (!model) {
            rep.c_local_form = HamiltonianLikeReport::LocalForm::Unverifiable;
            continue;
        }
        const Poly2 mx = model->dx(), my = model->dy();
        for (const double r : {0.1, 0.05}) {
            double res = 0.0, scale = 0.0;
            for (int k = 0; k < 16; ++k) {
                const double a = 2 * kPi * k / 16;
                const Vec2 d{r * std::cos(a), r * std::sin(a)};
                const Vec2 want{-my.eval(d), mx.eval(d)};
                const Vec2 got = v.value({cp.position.chart, cp.position.p + d});
                res = std::max(res, (got - want).norm());
                scale = std::max(scale, want.norm());
            }
            rep.max_local_residual = std::max(rep.max_local_residual, res / std::max(scale, 1e-30));
        }
    }
    if (rep.c_local_form == HamiltonianLikeReport::LocalForm::Pass &&
        rep.max_local_residual > tol)
        rep.c_local_form = HamiltonianLikeReport::LocalForm::Fail;
    return rep;
}

/// The nonvanishing ratio lambda with H = lambda * F for a Hamiltonian H and
/// a Hamiltonian-like F of the same function; extended over critical points
/// by 1/gamma.
inline ScalarField lambda_ratio(const std::shared_ptr<const SurfaceModel>& surface,
                                const PlanarVectorField& h, const PlanarVectorField& f_like,
                                const std::vector<CriticalPoint>& crit_list, double tol = 1e-8,
                                uint64_t seed = 29) {
    if (h.provenance != PlanarVectorField::Provenance::HamiltonianOf || !h.omega)
        throw std::invalid_argument("lambda_ratio: H must carry Hamiltonian provenance");
    const auto omega = h.omega;
    auto crits = std::make_shared<std::vector<CriticalPoint>>(crit_list);

    ScalarField lam;
    lam.fd_step = 1e-6;
    for (size_t ci = 0; ci < surface->charts.size(); ++ci) {
        const int chart = (int)ci;
        ScalarField::ChartFns cf;
        cf.value = [surface, h, f_like, omega, crits, chart](Vec2 p) {
            const ChartPoint z{chart, p};
            const Vec2 fv = f_like.value(z);
            for (const auto& cp : *crits)
                if (surface->distance(z, cp.position) < 1e-6)
                    return 1.0 / omega->density(z);  // lemma's extension over zeros
            const Vec2 hv = h.value(z);
            return std::abs(fv.x) >= std::abs(fv.y) ? hv.x / fv.x : hv.y / fv.y;
        };
        lam.charts.push_back(cf);
    }

    // parallelism residual |H - lambda F| at samples
    Rng rng(seed);
    auto pts = random_surface_points(*surface, 200, rng, 1e-3);
    for (const auto& z : pts) {
        const double l = lam.value(z);
        const double res = (h.value(z) - f_like.value(z) * l).norm();
        if (res > tol)
            throw std::runtime_error("lambda_ratio: fields are not parallel (residual " +
                                     std::to_string(res) + ")");
        if (l == 0.0) throw std::runtime_error("lambda_ratio: vanishing ratio");
    }
    return lam;
}

/// mu with F1 = mu * F2, obtained from two lambda ratios against the same H.
inline ScalarField mu_ratio(const std::shared_ptr<const SurfaceModel>& surface,
                            const PlanarVectorField& h, const PlanarVectorField& f1,
                            const PlanarVectorField& f2,
                            const std::vector<CriticalPoint>& crit_list, double tol = 1e-8) {
    const ScalarField l1 = lambda_ratio(surface, h, f1, crit_list, tol);
    const ScalarField l2 = lambda_ratio(surface, h, f2, crit_list, tol);
    ScalarField mu;
    mu.fd_step = 1e-6;
    for (size_t ci = 0; ci < surface->charts.size(); ++ci) {
        const int chart = (int)ci;
        ScalarField::ChartFns cf;
        cf.value = [l1, l2, chart](Vec2 p) {
            return l2.value({chart, p}) / l1.value({chart, p});
        };
        mu.charts.push_back(cf);
    }
    return mu;
}

}  // namespace hamreeb
