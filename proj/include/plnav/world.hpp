#pragma once

#include <string>
#include <variant>
#include <vector>

#include "plnav/geometry.hpp"

namespace plnav {

enum class ObstacleCategory { solid, table_top, cone, special_floor, slope };

std::string to_string(ObstacleCategory c);
ObstacleCategory obstacle_category_from_string(const std::string& s);

/// Static world element: a 2-D footprint extruded over a height interval.
/// Cones taper linearly from the footprint radius at z_lo to zero at z_hi.
/// Slopes are traversable floor patches whose surface height varies linearly
/// as z(p) = z_lo + slope_grad . (p - slope_origin), clamped to [z_lo, z_hi].
struct Obstacle {
  std::variant<Circle, ConvexPolygon> footprint;
  double z_lo = 0.0;
  double z_hi = 0.0;
  ObstacleCategory category = ObstacleCategory::solid;
  Vec2 slope_origin;
  Vec2 slope_grad;

  bool traversable() const { return category == ObstacleCategory::slope; }
  const Circle* circle() const { return std::get_if<Circle>(&footprint); }
  const ConvexPolygon* polygon() const { return std::get_if<ConvexPolygon>(&footprint); }

  /// Throws std::invalid_argument on a violated invariant (z_lo > z_hi,
  /// nonpositive radius, non-convex footprint, special_floor with height,
  /// cone without circular footprint).
  void validate() const;
};

Obstacle make_solid_circle(Vec2 center, double radius, double z_lo, double z_hi);
Obstacle make_solid_box(Vec2 center, double sx, double sy, double z_lo, double z_hi,
                        double yaw = 0.0);
Obstacle make_table_top(ConvexPolygon footprint, double z_lo, double z_hi);
Obstacle make_table_top(Circle footprint, double z_lo, double z_hi);
Obstacle make_cone(Vec2 center, double base_radius, double z_lo, double z_hi);
Obstacle make_special_floor(ConvexPolygon footprint);
Obstacle make_slope(ConvexPolygon footprint, double z_lo, double z_hi,
                    Vec2 origin, Vec2 grad);

/// Commanded control: linear speed in m/s and angular velocity normalized to
/// [-1, 1] (scaled by kMaxAngularSpeed before integration).
struct Action {
  double v = 0.0;
  double w_norm = 0.0;
};

constexpr double kMaxAngularSpeed = kPi / 2.0;  // rad/s at |w_norm| = 1

struct AgentState {
  Vec2 position;
  double heading = 0.0;      // radians
  double linear_vel = 0.0;   // m/s, last executed
  double angular_vel = 0.0;  // rad/s, last executed
  double radius = 0.3;
  Vec2 goal;
  double camera_height = 0.3;
};

struct CameraModel {
  double horizontal_fov = kPi / 2.0;
  int height = 48;
  int width = 96;
  double max_range = 6.0;
  double vertical_fov = kPi / 3.0;

  void validate() const;
};

struct Bounds {
  Vec2 min;
  Vec2 max;
  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

struct WorldState {
  std::vector<Obstacle> obstacles;
  std::vector<AgentState> agents;
  Bounds bounds{{-10.0, -10.0}, {10.0, 10.0}};
  double time = 0.0;
  double dt = 0.1;
};

/// Unicycle update with exact arc integration: heading and position stay on
/// the closed-form circular arc for the whole step, so there is no
/// integrator step-size error. v is clamped to [0, 1] and w_norm to [-1, 1];
/// non-finite action components throw std::invalid_argument.
AgentState step_kinematics(const AgentState& state, const Action& action, double dt);

enum class CollisionWith { none, agent, obstacle, bounds };

struct CollisionReport {
  bool collided = false;
  CollisionWith with = CollisionWith::none;
  int other_index = -1;  // agent or obstacle index when applicable
};

/// collided iff agent-agent center distance < 2R, or distance from the agent
/// center to a non-traversable obstacle footprint < R, or the agent center
/// left the world bounds. Slopes never collide; special_floor does.
CollisionReport check_collision(const WorldState& world, int agent_index);

}  // namespace plnav
