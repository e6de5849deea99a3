#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace hcurl {

using Index = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Scalar 2D cross product a.x b.y - a.y b.x.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Rotation by -90 degrees; maps a CCW boundary tangent to the outward normal.
constexpr Vec2 rotate_cw(Vec2 a) { return {a.y, -a.x}; }

using Barycentric = std::array<double, 3>;

/// Straight-sided triangle given by its three corners.
struct TriangleGeometry {
  std::array<Vec2, 3> p;

  double signed_area() const { return 0.5 * cross(p[1] - p[0], p[2] - p[0]); }
  double area() const { return std::abs(signed_area()); }

  /// Longest edge length, which is the diameter of a triangle.
  double diameter() const {
    return std::max({norm(p[1] - p[0]), norm(p[2] - p[1]), norm(p[0] - p[2])});
  }

  Vec2 centroid() const {
    return {(p[0].x + p[1].x + p[2].x) / 3.0, (p[0].y + p[1].y + p[2].y) / 3.0};
  }

  Vec2 point(const Barycentric& l) const {
    return l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
  }

  Barycentric barycentric(Vec2 x) const {
    const double a2 = 2.0 * signed_area();
    const double l1 = cross(x - p[0], p[2] - p[0]) / a2;
    const double l2 = cross(p[1] - p[0], x - p[0]) / a2;
    return {1.0 - l1 - l2, l1, l2};
  }

  /// Gradients of the barycentric coordinates (constant over the triangle).
  std::array<Vec2, 3> barycentric_gradients() const {
    const double a2 = 2.0 * signed_area();
    std::array<Vec2, 3> g;
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = p[(k + 1) % 3];
      const Vec2 b = p[(k + 2) % 3];
      g[k] = {(a.y - b.y) / a2, (b.x - a.x) / a2};
    }
    return g;
  }
};

}  // namespace hcurl
