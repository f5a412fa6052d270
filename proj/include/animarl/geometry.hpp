#ifndef ANIMARL_GEOMETRY_HPP
#define ANIMARL_GEOMETRY_HPP

#include <cmath>

namespace animarl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Rotate `v` by the rotation that maps (1,0) onto the unit vector `heading`.
inline Vec2 rotate_to_frame(const Vec2& heading, const Vec2& v) {
    return {heading.x * v.x - heading.y * v.y,
            heading.y * v.x + heading.x * v.y};
}

// Inverse of rotate_to_frame.
inline Vec2 rotate_from_frame(const Vec2& heading, const Vec2& v) {
    return {heading.x * v.x + heading.y * v.y,
            -heading.y * v.x + heading.x * v.y};
}

}  // namespace animarl

#endif
