#pragma once

#include <cmath>

namespace shepherd {

/// Planar position, movement or force value.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::sqrt(v.x * v.x + v.y * v.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(b - a); }
inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Counter-clockwise rotation about the origin.
inline Vec2 rotated(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace shepherd
