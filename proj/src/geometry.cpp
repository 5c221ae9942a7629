#include "plnav/geometry.hpp"

#include <algorithm>
#include <limits>

namespace plnav {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a > kPi) a -= 2.0 * kPi;
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

bool polygon_is_convex(const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  const size_t n = v.size();
  if (n < 3) return false;
  double sign = 0.0;
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = v[(i + 1) % n] - v[i];
    Vec2 b = v[(i + 2) % n] - v[(i + 1) % n];
    double c = a.cross(b);
    if (std::abs(c) < 1e-12) continue;  // collinear edge pair
    if (sign == 0.0) {
      sign = c;
    } else if (sign * c < 0.0) {
      return false;
    }
  }
  return sign != 0.0 || n >= 3;
}

ConvexPolygon make_box(Vec2 center, double size_x, double size_y, double yaw) {
  const double hx = 0.5 * size_x;
  const double hy = 0.5 * size_y;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  auto rot = [&](double px, double py) {
    return Vec2{center.x + c * px - s * py, center.y + s * px + c * py};
  };
  ConvexPolygon poly;
  poly.vertices = {rot(-hx, -hy), rot(hx, -hy), rot(hx, hy), rot(-hx, hy)};
  return poly;
}

bool point_in_polygon(const Vec2& p, const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 edge = v[(i + 1) % n] - v[i];
    if (edge.cross(p - v[i]) < 0.0) return false;  // ccw polygon: inside is left of every edge
  }
  return true;
}

double distance_to_circle(const Vec2& p, const Circle& c) {
  return std::max(0.0, (p - c.center).norm() - c.radius);
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.squared_norm();
  if (len2 <= 0.0) return (p - a).norm();
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

double distance_to_polygon(const Vec2& p, const ConvexPolygon& poly) {
  if (point_in_polygon(p, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const auto& v = poly.vertices;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    best = std::min(best, distance_to_segment(p, v[i], v[(i + 1) % n]));
  }
  return best;
}

bool ray_circle_interval(const Vec2& o, const Vec2& d, const Circle& c,
                         double* t_in, double* t_out) {
  Vec2 m = o - c.center;
  double a = d.dot(d);
  if (a <= 0.0) return false;
  double b = m.dot(d);
  double cc = m.dot(m) - c.radius * c.radius;
  double disc = b * b - a * cc;
  if (disc < 0.0) return false;
  double s = std::sqrt(disc);
  *t_in = (-b - s) / a;
  *t_out = (-b + s) / a;
  return true;
}

bool ray_polygon_interval(const Vec2& o, const Vec2& d, const ConvexPolygon& poly,
                          double* t_in, double* t_out) {
  // Clip the ray against each half-plane (inside = left of each ccw edge).
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const auto& v = poly.vertices;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 edge = v[(i + 1) % n] - v[i];
    Vec2 normal{-edge.y, edge.x};  // inward
    double denom = normal.dot(d);
    double dist = normal.dot(v[i] - o);
    if (std::abs(denom) < 1e-15) {
      if (dist < 0.0) return false;  // parallel and outside this half-plane
      continue;
    }
    double t = dist / denom;
    if (denom > 0.0) {
      lo = std::max(lo, t);
    } else {
      hi = std::min(hi, t);
    }
    if (lo > hi) return false;
  }
  *t_in = lo;
  *t_out = hi;
  return true;
}

}  // namespace plnav
