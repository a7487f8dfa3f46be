#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "hamreeb/core.hpp"

namespace hamreeb {

enum class Codomain { Line, Circle };

/// Bivariate polynomial sum c * x^i * y^j.
struct Poly2 {
    struct Term {
        int i = 0, j = 0;
        double c = 0.0;
    };
    std::vector<Term> terms;

    double eval(Vec2 p) const {
        double s = 0.0;
        for (const auto& t : terms) s += t.c * std::pow(p.x, t.i) * std::pow(p.y, t.j);
        return s;
    }

    Poly2 dx() const {
        Poly2 r;
        for (const auto& t : terms)
            if (t.i > 0) r.terms.push_back({t.i - 1, t.j, t.c * t.i});
        return r;
    }

    Poly2 dy() const {
        Poly2 r;
        for (const auto& t : terms)
            if (t.j > 0) r.terms.push_back({t.i, t.j - 1, t.c * t.j});
        return r;
    }
};

/// User-supplied local model at a degenerate critical point.  The square_free
/// flag is an attestation; degree consistency is verified numerically but
/// square-freeness cannot be decided from samples.
struct DeclaredCriticalModel {
    ChartPoint position;
    int degree = 0;
    bool square_free = false;
    std::optional<Poly2> local_model;  // homogeneous polynomial in coordinates centred at the point
};

/// Smooth map M -> P, P the line or a circle, as per-chart evaluators.
/// Circle-valued maps are represented by a chartwise lift; values on overlaps
/// agree modulo the period.
struct ScalarField {
    struct ChartFns {
        std::function<double(Vec2)> value;
        std::function<Vec2(Vec2)> grad;  // optional; finite differences otherwise
        std::function<Mat2(Vec2)> hess;  // optional
    };

    Codomain codomain = Codomain::Line;
    double period = 0.0;  // circle codomain only
    std::vector<ChartFns> charts;
    double fd_step = 1e-6;
    std::vector<DeclaredCriticalModel> declared;

    double value(const ChartPoint& z) const { return charts.at(z.chart).value(z.p); }

    bool has_analytic_gradient(int chart = 0) const {
        return static_cast<bool>(charts.at(chart).grad);
    }

    Vec2 gradient(const ChartPoint& z) const {
        const auto& cf = charts.at(z.chart);
        if (cf.grad) return cf.grad(z.p);
        const double h = fd_step;
        const double fx =
            (cf.value({z.p.x + h, z.p.y}) - cf.value({z.p.x - h, z.p.y})) / (2 * h);
        const double fy =
            (cf.value({z.p.x, z.p.y + h}) - cf.value({z.p.x, z.p.y - h})) / (2 * h);
        return {fx, fy};
    }

    Mat2 hessian(const ChartPoint& z) const {
        const auto& cf = charts.at(z.chart);
        if (cf.hess) return cf.hess(z.p);
        const double h = std::sqrt(fd_step);  // larger step for second differences
        const auto g = [&](Vec2 p) { return gradient({z.chart, p}); };
        const Vec2 gxp = g({z.p.x + h, z.p.y}), gxm = g({z.p.x - h, z.p.y});
        const Vec2 gyp = g({z.p.x, z.p.y + h}), gym = g({z.p.x, z.p.y - h});
        Mat2 m;
        m.a = (gxp.x - gxm.x) / (2 * h);
        m.b = (gyp.x - gym.x) / (2 * h);
        m.c = (gxp.y - gxm.y) / (2 * h);
        m.d = (gyp.y - gym.y) / (2 * h);
        // symmetrize
        const double off = (m.b + m.c) / 2;
        m.b = m.c = off;
        return m;
    }

    /// Codomain-aware difference a - b (shortest representative for circles).
    double value_difference(double a, double b) const {
        if (codomain == Codomain::Circle) return wrap_symmetric(a - b, period);
        return a - b;
    }

    double value_distance(double a, double b) const { return std::abs(value_difference(a, b)); }
};

inline ScalarField make_constant_field(double c, int n_charts = 1) {
    ScalarField f;
    for (int i = 0; i < n_charts; ++i)
        f.charts.push_back({[c](Vec2) { return c; }, [](Vec2) { return Vec2{0, 0}; },
                            [](Vec2) { return Mat2{}; }});
    return f;
}

/// Field from an analytic closure, same formula on every chart.
inline ScalarField make_analytic_field(std::function<double(Vec2)> value,
                                       std::function<Vec2(Vec2)> grad = nullptr,
                                       std::function<Mat2(Vec2)> hess = nullptr,
                                       int n_charts = 1) {
    ScalarField f;
    for (int i = 0; i < n_charts; ++i) f.charts.push_back({value, grad, hess});
    return f;
}

inline ScalarField make_polynomial_field(const Poly2& p, int n_charts = 1) {
    const Poly2 px = p.dx(), py = p.dy();
    const Poly2 pxx = px.dx(), pxy = px.dy(), pyy = py.dy();
    ScalarField f;
    for (int i = 0; i < n_charts; ++i)
        f.charts.push_back({[p](Vec2 z) { return p.eval(z); },
                            [px, py](Vec2 z) { return Vec2{px.eval(z), py.eval(z)}; },
                            [pxx, pxy, pyy](Vec2 z) {
                                return Mat2{pxx.eval(z), pxy.eval(z), pxy.eval(z), pyy.eval(z)};
                            }});
    return f;
}

/// Pointwise sum.  Line-valued operands only.
inline ScalarField field_sum(const ScalarField& f, const ScalarField& g) {
    if (f.codomain == Codomain::Circle || g.codomain == Codomain::Circle)
        throw std::invalid_argument("field_sum: circle-valued operand");
    if (f.charts.size() != g.charts.size())
        throw std::invalid_argument("field_sum: chart count mismatch");
    ScalarField r;
    r.fd_step = std::min(f.fd_step, g.fd_step);
    for (size_t i = 0; i < f.charts.size(); ++i) {
        const auto cf = f.charts[i], cg = g.charts[i];
        ScalarField::ChartFns out;
        out.value = [cf, cg](Vec2 p) { return cf.value(p) + cg.value(p); };
        if (cf.grad && cg.grad)
            out.grad = [cf, cg](Vec2 p) { return cf.grad(p) + cg.grad(p); };
        r.charts.push_back(out);
    }
    return r;
}

inline ScalarField field_scale(const ScalarField& f, double s) {
    ScalarField r = f;
    for (auto& cf : r.charts) {
        const auto v = cf.value;
        cf.value = [v, s](Vec2 p) { return s * v(p); };
        if (cf.grad) {
            const auto g = cf.grad;
            cf.grad = [g, s](Vec2 p) { return g(p) * s; };
        }
        cf.hess = nullptr;
    }
    r.declared.clear();
    return r;
}

/// Pointwise product with product-rule gradient.
inline ScalarField field_product(const ScalarField& f, const ScalarField& g) {
    if (f.charts.size() != g.charts.size())
        throw std::invalid_argument("field_product: chart count mismatch");
    ScalarField r;
    r.fd_step = std::min(f.fd_step, g.fd_step);
    for (size_t i = 0; i < f.charts.size(); ++i) {
        const auto cf = f.charts[i], cg = g.charts[i];
        ScalarField::ChartFns out;
        out.value = [cf, cg](Vec2 p) { return cf.value(p) * cg.value(p); };
        if (cf.grad && cg.grad)
            out.grad = [cf, cg](Vec2 p) {
                return cf.grad(p) * cg.value(p) + cg.grad(p) * cf.value(p);
            };
        r.charts.push_back(out);
    }
    return r;
}

}  // namespace hamreeb
