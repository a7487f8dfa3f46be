#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace hamreeb {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2 operator-() const { return {-x, -y}; }

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// 2x2 matrix, row major.
struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;  // [a b; c d]

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 rotation(double angle) {
        const double cs = std::cos(angle), sn = std::sin(angle);
        return {cs, -sn, sn, cs};
    }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Vec2 apply(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    }
    Mat2 operator-(const Mat2& m) const { return {a - m.a, b - m.b, c - m.c, d - m.d}; }
    Mat2 transpose() const { return {a, c, b, d}; }

    Mat2 inverse() const {
        const double dt = det();
        if (std::abs(dt) < 1e-300) throw std::runtime_error("Mat2: singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    double frobenius_norm() const { return std::sqrt(a * a + b * b + c * c + d * d); }

    /// Largest singular value.
    double spectral_norm() const {
        const Mat2 m = transpose() * (*this);
        const double tr = m.trace(), dt = m.det();
        const double disc = std::max(0.0, tr * tr / 4.0 - dt);
        return std::sqrt(tr / 2.0 + std::sqrt(disc));
    }

    /// Eigenvalues of a symmetric matrix, ascending.
    std::array<double, 2> symmetric_eigenvalues() const {
        const double mean = (a + d) / 2.0;
        const double offdiag = (b + c) / 2.0;
        const double disc = std::sqrt((a - d) * (a - d) / 4.0 + offdiag * offdiag);
        return {mean - disc, mean + disc};
    }
};

/// A point on a surface: coordinates in a specific chart.
struct ChartPoint {
    int chart = 0;
    Vec2 p;

    ChartPoint() = default;
    ChartPoint(int c, Vec2 q) : chart(c), p(q) {}
    ChartPoint(int c, double x, double y) : chart(c), p(x, y) {}
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Deterministic RNG used across sampling helpers.
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Uniform point in the disk of given radius (area measure).
inline Vec2 uniform_in_disk(Rng& rng, double radius) {
    const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
    const double phi = uniform(rng, 0.0, 2.0 * kPi);
    return {r * std::cos(phi), r * std::sin(phi)};
}

/// Reduce x into [0, period).
inline double wrap_periodic(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    return r;
}

/// Signed representative of x in [-period/2, period/2).
inline double wrap_symmetric(double x, double period) {
    double r = wrap_periodic(x, period);
    if (r >= period / 2) r -= period;
    return r;
}

inline bool approx_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace hamreeb
