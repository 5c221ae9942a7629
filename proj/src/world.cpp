#include "plnav/world.hpp"

#include <cmath>
#include <stdexcept>

namespace plnav {

std::string to_string(ObstacleCategory c) {
  switch (c) {
    case ObstacleCategory::solid: return "solid";
    case ObstacleCategory::table_top: return "table_top";
    case ObstacleCategory::cone: return "cone";
    case ObstacleCategory::special_floor: return "special_floor";
    case ObstacleCategory::slope: return "slope";
  }
  return "solid";
}

ObstacleCategory obstacle_category_from_string(const std::string& s) {
  if (s == "solid") return ObstacleCategory::solid;
  if (s == "table_top") return ObstacleCategory::table_top;
  if (s == "cone") return ObstacleCategory::cone;
  if (s == "special_floor") return ObstacleCategory::special_floor;
  if (s == "slope") return ObstacleCategory::slope;
  throw std::invalid_argument("unknown obstacle category: " + s);
}

void Obstacle::validate() const {
  if (!(z_lo <= z_hi)) throw std::invalid_argument("obstacle: z_lo > z_hi");
  if (const Circle* c = circle()) {
    if (!(c->radius > 0.0)) throw std::invalid_argument("obstacle: radius must be > 0");
  } else {
    const ConvexPolygon& p = *polygon();
    if (p.vertices.size() < 3 || !polygon_is_convex(p)) {
      throw std::invalid_argument("obstacle: polygon must be convex with >= 3 vertices");
    }
  }
  if (category == ObstacleCategory::special_floor && (z_lo != 0.0 || z_hi != 0.0)) {
    throw std::invalid_argument("obstacle: special_floor requires height_interval [0,0]");
  }
  if (category == ObstacleCategory::cone && circle() == nullptr) {
    throw std::invalid_argument("obstacle: cone requires a circular footprint");
  }
  if (category == ObstacleCategory::cone && !(z_hi > z_lo)) {
    throw std::invalid_argument("obstacle: cone requires z_hi > z_lo");
  }
}

Obstacle make_solid_circle(Vec2 center, double radius, double z_lo, double z_hi) {
  Obstacle o;
  o.footprint = Circle{center, radius};
  o.z_lo = z_lo;
  o.z_hi = z_hi;
  o.category = ObstacleCategory::solid;
  o.validate();
  return o;
}

Obstacle make_solid_box(Vec2 center, double sx, double sy, double z_lo, double z_hi,
                        double yaw) {
  Obstacle o;
  o.footprint = make_box(center, sx, sy, yaw);
  o.z_lo = z_lo;
  o.z_hi = z_hi;
  o.category = ObstacleCategory::solid;
  o.validate();
  return o;
}

Obstacle make_table_top(ConvexPolygon footprint, double z_lo, double z_hi) {
  Obstacle o;
  o.footprint = std::move(footprint);
  o.z_lo = z_lo;
  o.z_hi = z_hi;
  o.category = ObstacleCategory::table_top;
  o.validate();
  return o;
}

Obstacle make_table_top(Circle footprint, double z_lo, double z_hi) {
  Obstacle o;
  o.footprint = footprint;
  o.z_lo = z_lo;
  o.z_hi = z_hi;
  o.category = ObstacleCategory::table_top;
  o.validate();
  return o;
}

Obstacle make_cone(Vec2 center, double base_radius, double z_lo, double z_hi) {
  Obstacle o;
  o.footprint = Circle{center, base_radius};
  o.z_lo = z_lo;
  o.z_hi = z_hi;
  o.category = ObstacleCategory::cone;
  o.validate();
  return o;
}

Obstacle make_special_floor(ConvexPolygon footprint) {
  Obstacle o;
  o.footprint = std::move(footprint);
  o.z_lo = 0.0;
  o.z_hi = 0.0;
  o.category = ObstacleCategory::special_floor;
  o.validate();
  return o;
}

Obstacle make_slope(ConvexPolygon footprint, double z_lo, double z_hi,
                    Vec2 origin, Vec2 grad) {
  Obstacle o;
  o.footprint = std::move(footprint);
  o.z_lo = z_lo;
  o.z_hi = z_hi;
  o.category = ObstacleCategory::slope;
  o.slope_origin = origin;
  o.slope_grad = grad;
  o.validate();
  return o;
}

void CameraModel::validate() const {
  if (!(horizontal_fov > 0.0 && horizontal_fov <= kPi)) {
    throw std::invalid_argument("camera: horizontal_fov must be in (0, pi]");
  }
  if (height < 8 || width < 8) {
    throw std::invalid_argument("camera: image must be at least 8x8");
  }
  if (!(max_range > 0.0)) throw std::invalid_argument("camera: max_range must be > 0");
  if (!(vertical_fov > 0.0 && vertical_fov < kPi)) {
    throw std::invalid_argument("camera: vertical_fov must be in (0, pi)");
  }
}

AgentState step_kinematics(const AgentState& state, const Action& action, double dt) {
  if (!std::isfinite(action.v) || !std::isfinite(action.w_norm)) {
    throw std::invalid_argument("step_kinematics: non-finite action");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("step_kinematics: dt must be > 0");

  const double v = std::clamp(action.v, 0.0, 1.0);
  const double w = std::clamp(action.w_norm, -1.0, 1.0) * kMaxAngularSpeed;

  AgentState next = state;
  next.linear_vel = v;
  next.angular_vel = w;

  const double th0 = state.heading;
  if (std::abs(w) < 1e-12) {
    next.position.x = state.position.x + v * dt * std::cos(th0);
    next.position.y = state.position.y + v * dt * std::sin(th0);
    next.heading = th0;
  } else {
    const double th1 = th0 + w * dt;
    const double r = v / w;  // signed turn radius
    next.position.x = state.position.x + r * (std::sin(th1) - std::sin(th0));
    next.position.y = state.position.y - r * (std::cos(th1) - std::cos(th0));
    next.heading = wrap_angle(th1);
  }
  return next;
}

namespace {

double footprint_distance(const Vec2& p, const Obstacle& o) {
  if (const Circle* c = o.circle()) return distance_to_circle(p, *c);
  return distance_to_polygon(p, *o.polygon());
}

}  // namespace

CollisionReport check_collision(const WorldState& world, int agent_index) {
  if (agent_index < 0 || agent_index >= static_cast<int>(world.agents.size())) {
    throw std::out_of_range("check_collision: bad agent index");
  }
  const AgentState& a = world.agents[agent_index];

  CollisionReport report;
  for (int j = 0; j < static_cast<int>(world.agents.size()); ++j) {
    if (j == agent_index) continue;
    const double d = (a.position - world.agents[j].position).norm();
    if (d < a.radius + world.agents[j].radius) {
      report.collided = true;
      report.with = CollisionWith::agent;
      report.other_index = j;
      return report;
    }
  }
  for (int k = 0; k < static_cast<int>(world.obstacles.size()); ++k) {
    const Obstacle& o = world.obstacles[k];
    if (o.traversable()) continue;
    if (footprint_distance(a.position, o) < a.radius) {
      report.collided = true;
      report.with = CollisionWith::obstacle;
      report.other_index = k;
      return report;
    }
  }
  if (!world.bounds.contains(a.position)) {
    report.collided = true;
    report.with = CollisionWith::bounds;
  }
  return report;
}

}  // namespace plnav
