#pragma once
#include <cmath>

namespace lps {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    // Rotation by +90 degrees: (x, y) -> (-y, x).
    Vec2 perp() const { return {-y, x}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

}  // namespace lps
