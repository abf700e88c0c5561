#pragma once

#include <cmath>
#include <complex>

namespace ortholap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double t) const { return {x * t, y * t}; }
    Vec2 operator/(double t) const { return {x / t, y / t}; }
    Vec2 operator-() const { return {-x, -y}; }

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }

    std::complex<double> to_complex() const { return {x, y}; }
};

inline Vec2 operator*(double t, const Vec2& v) { return v * t; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// z-component of the 3D cross product; positive when b is counterclockwise of a.
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Distance from p to the closed segment [a, b].
inline double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    if (len2 == 0.0) return dist(p, a);
    double t = dot(p - a, ab) / len2;
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    return dist(p, a + ab * t);
}

}  // namespace ortholap
