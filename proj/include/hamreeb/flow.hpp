#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/scalar_field.hpp"
#include "hamreeb/surface.hpp"
#include "hamreeb/vector_field.hpp"

namespace hamreeb {

struct FlowIntegrator {
    double step_size = 1e-3;
    double reprojection_tolerance = 1e-9;
    double max_time = 1e4;
};

namespace detail {

inline Vec2 rk4_step(const std::function<Vec2(Vec2)>& f, Vec2 p, double dt) {
    const Vec2 k1 = f(p);
    const Vec2 k2 = f(p + k1 * (dt / 2));
    const Vec2 k3 = f(p + k2 * (dt / 2));
    const Vec2 k4 = f(p + k3 * dt);
    return p + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
}

struct FlowState {
    ChartPoint z;
    double conserved = 0.0;  // f-value at the start, for reprojection
    bool reproject = false;
    const ScalarField* f = nullptr;
};

/// One step of size dt: RK4 in the current chart, then one Newton step back
/// onto the level set when the field is Hamiltonian, then wrap / chart switch.
inline void advance(const SurfaceModel& s, const PlanarVectorField& v, FlowState& st, double dt) {
    const int chart = st.z.chart;
    const auto& comp = v.charts.at(chart);
    st.z.p = rk4_step(comp, st.z.p, dt);
    if (st.reproject) {
        const double r = st.f->value_difference(st.f->value(st.z), st.conserved);
        const Vec2 g = st.f->gradient(st.z);
        const double n2 = g.norm2();
        if (n2 > 1e-24) st.z.p = st.z.p - g * (r / n2);
    }
    st.z = s.prefer_chart(s.canonicalize(st.z));
    if (!s.contains(st.z, 1e-3))
        throw std::runtime_error("flow: trajectory exited the chart atlas");
}

inline FlowState make_state(const SurfaceModel& s, const PlanarVectorField& v,
                            const ChartPoint& x) {
    FlowState st;
    st.z = s.canonicalize(x);
    if (v.provenance == PlanarVectorField::Provenance::HamiltonianOf && v.hamiltonian_of) {
        st.reproject = true;
        st.f = v.hamiltonian_of.get();
        st.conserved = st.f->value(st.z);
    }
    return st;
}

}  // namespace detail

/// Point of the flow of V after time t.  Near equilibria (|V| < 1e-10) the
/// point is frozen.
inline ChartPoint flow_point(const SurfaceModel& s, const PlanarVectorField& v,
                             const ChartPoint& x, double t, const FlowIntegrator& integ = {}) {
    if (std::abs(t) > integ.max_time) throw std::runtime_error("flow_point: max_time exceeded");
    auto st = detail::make_state(s, v, x);
    if (v.value(st.z).norm() < 1e-10) return st.z;
    const double h = integ.step_size;
    double remaining = t;
    while (std::abs(remaining) > 1e-9 * h) {
        const double dt = std::clamp(remaining, -h, h);
        detail::advance(s, v, st, dt);
        remaining -= dt;
    }
    return st.z;
}

struct TrajectorySample {
    double t = 0.0;
    ChartPoint z;
    double f_value = 0.0;
};

inline std::vector<TrajectorySample> flow_trajectory(const SurfaceModel& s,
                                                     const PlanarVectorField& v,
                                                     const ChartPoint& x, double t,
                                                     const FlowIntegrator& integ = {}) {
    auto st = detail::make_state(s, v, x);
    std::vector<TrajectorySample> out;
    auto record = [&](double tt) {
        out.push_back({tt, st.z, st.f ? st.f->value(st.z) : 0.0});
    };
    record(0.0);
    if (v.value(st.z).norm() < 1e-10) return out;
    const double h = integ.step_size;
    double done = 0.0;
    while (std::abs(t - done) > 1e-9 * h) {
        const double dt = std::clamp(t - done, -h, h);
        detail::advance(s, v, st, dt);
        done += dt;
        record(done);
    }
    return out;
}

/// Smallest T > 0 with |Phi(x,T) - x| < tol, by Poincare-section event
/// detection on the transversal through x normal to V(x), refined by
/// bisection to 1e-10 in time.  nullopt = no return within max_time, or a
/// pass within 1e-3 of an avoided point (periods are unreliable near
/// equilibria, and separatrices never return).
inline std::optional<double> orbit_period(const SurfaceModel& s, const PlanarVectorField& v,
                                          const ChartPoint& x, const FlowIntegrator& integ = {},
                                          double tol = 1e-6, double max_time = -1.0,
                                          const std::vector<ChartPoint>& avoid = {}) {
    if (max_time <= 0) max_time = integ.max_time;
    auto st = detail::make_state(s, v, x);
    const ChartPoint x0 = st.z;
    const Vec2 v0 = v.value(x0);
    if (v0.norm() < 1e-10) throw std::invalid_argument("orbit_period: equilibrium input");
    for (const auto& a : avoid)
        if (s.distance(x0, a) < 1e-3)
            throw std::invalid_argument("orbit_period: start too close to a critical point");
    const Vec2 n = v0 / v0.norm();

    // signed offset along the section normal, in the start chart with
    // periodic min-image differences
    auto section = [&](const ChartPoint& z) -> std::optional<double> {
        ChartPoint w = z;
        if (w.chart != x0.chart) {
            auto ww = s.to_chart(w, x0.chart);
            if (!ww) return std::nullopt;
            w = *ww;
        }
        double dx = w.p.x - x0.p.x, dy = w.p.y - x0.p.y;
        const Chart& c = s.charts[x0.chart];
        if (const double px = c.period_x(); px > 0) dx = wrap_symmetric(dx, px);
        if (const double py = c.period_y(); py > 0) dy = wrap_symmetric(dy, py);
        return dx * n.x + dy * n.y;
    };

    const double h = integ.step_size;
    double t = 0.0;
    auto s_prev = section(st.z);
    auto z_prev = st;
    while (t < max_time) {
        z_prev = st;
        detail::advance(s, v, st, h);
        t += h;
        for (const auto& a : avoid)
            if (s.distance(st.z, a) < 1e-3) return std::nullopt;
        const auto s_cur = section(st.z);
        if (s_prev && s_cur && *s_prev < 0 && *s_cur >= 0 && t > h * 1.5) {
            // bracket [t-h, t]; bisection keeping the state at the low end
            auto lo = z_prev;
            double t_lo = t - h, t_hi = t;
            for (int it = 0; it < 60 && t_hi - t_lo > 1e-10; ++it) {
                const double t_mid = (t_lo + t_hi) / 2;
                auto mid = lo;
                detail::advance(s, v, mid, t_mid - t_lo);
                const auto s_mid = section(mid.z);
                if (s_mid && *s_mid < 0) {
                    lo = mid;
                    t_lo = t_mid;
                } else {
                    t_hi = t_mid;
                }
            }
            const double T = (t_lo + t_hi) / 2;
            auto fin = lo;
            detail::advance(s, v, fin, T - t_lo);
            if (s.distance(fin.z, x0) < tol) return T;
        }
        s_prev = s_cur;
    }
    return std::nullopt;
}

/// sigma(x, s) = integral_0^s lambda(Phi_H(x,t)) dt along the flow of
/// H = lambda * V_base; satisfies Phi_H(x, s) = Phi_V(x, sigma(x, s)).
inline double sigma_reparametrization(const SurfaceModel& s, const ScalarField& lambda,
                                      const PlanarVectorField& v_base, const ChartPoint& x,
                                      double time, const FlowIntegrator& integ = {}) {
    // augmented RK4: state (p, sigma), dp/dt = lambda(p) V(p), dsigma/dt = lambda(p)
    ChartPoint z = s.canonicalize(x);
    double acc = 0.0;
    const double h = integ.step_size;
    double remaining = time;
    while (std::abs(remaining) > 1e-9 * h) {
        const double dt = std::clamp(remaining, -h, h);
        const int chart = z.chart;
        const auto& comp = v_base.charts.at(chart);
        auto rhs = [&](Vec2 p, double& dl) {
            dl = lambda.value({chart, p});
            if (std::abs(dl) < 1e-14)
                throw std::runtime_error("sigma: lambda vanishes on the trajectory");
            return comp(p) * dl;
        };
        double l1, l2, l3, l4;
        const Vec2 k1 = rhs(z.p, l1);
        const Vec2 k2 = rhs(z.p + k1 * (dt / 2), l2);
        const Vec2 k3 = rhs(z.p + k2 * (dt / 2), l3);
        const Vec2 k4 = rhs(z.p + k3 * dt, l4);
        z.p = z.p + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        acc += (l1 + 2 * (l2 + l3) + l4) * (dt / 6.0);
        z = s.prefer_chart(s.canonicalize(z));
        remaining -= dt;
    }
    return acc;
}

/// gamma(alpha)(x) = sigma(x, alpha(x)) as a scalar field.
inline ScalarField gamma_of_alpha(const std::shared_ptr<const SurfaceModel>& s,
                                  const ScalarField& lambda, const PlanarVectorField& v_base,
                                  const ScalarField& alpha, const FlowIntegrator& integ = {}) {
    ScalarField r;
    r.fd_step = 1e-5;
    for (size_t ci = 0; ci < s->charts.size(); ++ci) {
        const int chart = (int)ci;
        ScalarField::ChartFns cf;
        cf.value = [s, lambda, v_base, alpha, integ, chart](Vec2 p) {
            const ChartPoint z{chart, p};
            return sigma_reparametrization(*s, lambda, v_base, z, alpha.value(z), integ);
        };
        r.charts.push_back(cf);
    }
    return r;
}

}  // namespace hamreeb
