#pragma once

#include <cmath>
#include <vector>

namespace plnav {

constexpr double kPi = 3.141592653589793238462643;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
  double squared_norm() const { return x * x + y * y; }
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

struct ConvexPolygon {
  std::vector<Vec2> vertices;  // counterclockwise
};

bool polygon_is_convex(const ConvexPolygon& poly);

/// Axis-aligned rectangle as a convenience constructor for box obstacles.
ConvexPolygon make_box(Vec2 center, double size_x, double size_y, double yaw = 0.0);

bool point_in_polygon(const Vec2& p, const ConvexPolygon& poly);

/// Euclidean distance from a point to the solid shape (0 inside).
double distance_to_circle(const Vec2& p, const Circle& c);
double distance_to_polygon(const Vec2& p, const ConvexPolygon& poly);
double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Parametric interval [t_in, t_out] for which o + t*d lies inside the shape.
/// Returns false when the ray misses. d need not be normalized; t is in units
/// of |d|. Intervals may start at negative t when the origin is inside.
bool ray_circle_interval(const Vec2& o, const Vec2& d, const Circle& c,
                         double* t_in, double* t_out);
bool ray_polygon_interval(const Vec2& o, const Vec2& d, const ConvexPolygon& poly,
                          double* t_in, double* t_out);

}  // namespace plnav
