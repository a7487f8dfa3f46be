#pragma once

#include <functional>
#include <vector>

#include "hamreeb/core.hpp"
#include "hamreeb/surface.hpp"

namespace hamreeb {

/// Area form gamma(x,y) dx ^ dy given by a strictly positive density per chart.
struct AreaForm {
    std::vector<std::function<double(Vec2)>> charts;

    double density(const ChartPoint& z) const {
        const double g = charts.at(z.chart)(z.p);
        if (g <= 0) throw std::runtime_error("AreaForm: density must stay positive");
        return g;
    }
};

inline AreaForm make_constant_form(double gamma, int n_charts = 1) {
    AreaForm w;
    for (int i = 0; i < n_charts; ++i) w.charts.push_back([gamma](Vec2) { return gamma; });
    return w;
}

inline AreaForm make_analytic_form(std::function<double(Vec2)> gamma, int n_charts = 1) {
    AreaForm w;
    for (int i = 0; i < n_charts; ++i) w.charts.push_back(gamma);
    return w;
}

/// Max relative mismatch of gamma_1 = gamma_2(T p) * det DT(p) over random
/// points of chart overlaps.  Zero transitions means trivially compatible.
inline double density_compatibility_residual(const SurfaceModel& s, const AreaForm& w,
                                             int n_samples, uint64_t seed) {
    double worst = 0.0;
    Rng rng(seed);
    for (const auto& t : s.transitions) {
        const auto box = s.charts.at(t.from).bbox();
        int accepted = 0, guard = 0;
        while (accepted < n_samples && guard++ < 100 * n_samples) {
            const Vec2 p{uniform(rng, box[0], box[1]), uniform(rng, box[2], box[3])};
            if (!s.charts[t.from].contains(p)) continue;
            const Vec2 q = t.map(p);
            if (!s.charts[t.to].contains(q)) continue;
            ++accepted;
            const double det = t.jacobian(p).det();
            if (det <= 0) throw std::runtime_error("transition Jacobian not positive");
            const double lhs = w.density({t.from, p});
            const double rhs = w.density({t.to, q}) * det;
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
    }
    return worst;
}

}  // namespace hamreeb
