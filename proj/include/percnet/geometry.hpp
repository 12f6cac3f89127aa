#pragma once

#include <cmath>

namespace percnet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline Vec2 normalized(const Vec2& v) {
  double n = norm(v);
  return {v.x / n, v.y / n};
}

}  // namespace percnet
