#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plnav/geometry.hpp"
#include "plnav/rng.hpp"

using namespace plnav;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(2.0 * kPi + 0.25) == doctest::Approx(0.25));
}

TEST_CASE("point_in_polygon on a ccw square") {
  ConvexPolygon sq = make_box({0.0, 0.0}, 2.0, 2.0);
  CHECK(point_in_polygon({0.0, 0.0}, sq));
  CHECK(point_in_polygon({0.99, 0.99}, sq));
  CHECK_FALSE(point_in_polygon({1.01, 0.0}, sq));
}

TEST_CASE("polygon distance matches dense boundary sampling") {
  Rng rng(42);
  ConvexPolygon poly = make_box({0.5, -0.3}, 1.4, 0.9, 0.37);
  for (int trial = 0; trial < 200; ++trial) {
    Vec2 p{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    double expected = point_in_polygon(p, poly) ? 0.0 : 1e18;
    if (expected > 0.0) {
      // Dense sampling of the boundary as an independent oracle.
      const auto& v = poly.vertices;
      for (size_t i = 0; i < v.size(); ++i) {
        Vec2 a = v[i], b = v[(i + 1) % v.size()];
        for (int k = 0; k <= 2000; ++k) {
          Vec2 q = a + (b - a) * (k / 2000.0);
          expected = std::min(expected, (p - q).norm());
        }
      }
    }
    // The sampled minimum overestimates by at most the sampling resolution.
    CHECK(std::abs(distance_to_polygon(p, poly) - expected) <= 1e-5 + 2e-3 * expected);
  }
}

TEST_CASE("ray-polygon interval brackets sampled membership") {
  Rng rng(7);
  ConvexPolygon poly = make_box({1.0, 0.5}, 1.2, 0.8, -0.2);
  for (int trial = 0; trial < 200; ++trial) {
    Vec2 o{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    double ang = rng.uniform(0.0, 2.0 * kPi);
    Vec2 d{std::cos(ang), std::sin(ang)};
    double t_in, t_out;
    bool hit = ray_polygon_interval(o, d, poly, &t_in, &t_out);
    for (int k = 0; k <= 300; ++k) {
      double t = -1.0 + k * (6.0 / 300.0);
      bool inside = point_in_polygon(o + d * t, poly);
      bool in_interval = hit && t >= t_in - 1e-9 && t <= t_out + 1e-9;
      if (inside) CHECK(in_interval);
      if (hit && t > t_in + 1e-6 && t < t_out - 1e-6) CHECK(inside);
    }
  }
}

TEST_CASE("ray-circle interval") {
  Circle c{{2.0, 0.0}, 0.5};
  double t_in, t_out;
  REQUIRE(ray_circle_interval({0.0, 0.0}, {1.0, 0.0}, c, &t_in, &t_out));
  CHECK(t_in == doctest::Approx(1.5));
  CHECK(t_out == doctest::Approx(2.5));
  CHECK_FALSE(ray_circle_interval({0.0, 2.0}, {1.0, 0.0}, c, &t_in, &t_out));
}
