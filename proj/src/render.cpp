#include "plnav/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plnav {

namespace {

constexpr double kEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ray3 {
  Vec2 oxy;
  double oz;
  Vec2 dxy;
  double dz;
};

/// Interval of t for which the ray's xy projection is inside the footprint.
bool footprint_interval(const Ray3& ray, const Obstacle& o, double* t_in, double* t_out) {
  if (const Circle* c = o.circle()) {
    return ray_circle_interval(ray.oxy, ray.dxy, *c, t_in, t_out);
  }
  return ray_polygon_interval(ray.oxy, ray.dxy, *o.polygon(), t_in, t_out);
}

/// Interval of t for which the ray's z lies in [z_lo, z_hi].
bool z_slab_interval(const Ray3& ray, double z_lo, double z_hi, double* t_in, double* t_out) {
  if (std::abs(ray.dz) < kEps) {
    if (ray.oz < z_lo || ray.oz > z_hi) return false;
    *t_in = -kInf;
    *t_out = kInf;
    return true;
  }
  double t1 = (z_lo - ray.oz) / ray.dz;
  double t2 = (z_hi - ray.oz) / ray.dz;
  if (t1 > t2) std::swap(t1, t2);
  *t_in = t1;
  *t_out = t2;
  return true;
}

/// First positive t at which the ray enters the extruded volume; the camera
/// sitting inside the volume reports an immediate hit.
bool extruded_hit(const Ray3& ray, const Obstacle& o, double* t_hit) {
  double a_in, a_out, b_in, b_out;
  if (!footprint_interval(ray, o, &a_in, &a_out)) return false;

  if (o.z_lo == o.z_hi) {
    // Zero-thickness patch (special_floor): single plane crossing.
    if (std::abs(ray.dz) < kEps) return false;
    double t0 = (o.z_lo - ray.oz) / ray.dz;
    if (t0 < a_in - kEps || t0 > a_out + kEps || t0 <= 0.0) return false;
    *t_hit = t0;
    return true;
  }

  if (!z_slab_interval(ray, o.z_lo, o.z_hi, &b_in, &b_out)) return false;
  double enter = std::max(a_in, b_in);
  double exit = std::min(a_out, b_out);
  if (enter > exit || exit <= 0.0) return false;
  *t_hit = std::max(enter, 0.0);
  return true;
}

bool cone_hit(const Ray3& ray, const Obstacle& o, double* t_hit) {
  const Circle& base = *o.circle();
  const double span = o.z_hi - o.z_lo;
  const double k = base.radius / span;  // radius shrink per meter of height

  // |p_xy(t) - c| = k * (z_hi - z(t)) with z(t) in [z_lo, z_hi].
  Vec2 m = ray.oxy - base.center;
  const double q0 = k * (o.z_hi - ray.oz);
  const double q1 = -k * ray.dz;  // rhs(t) = q0 + q1 t
  const double A = ray.dxy.dot(ray.dxy) - q1 * q1;
  const double B = 2.0 * (m.dot(ray.dxy) - q0 * q1);
  const double C = m.dot(m) - q0 * q0;

  double best = kInf;
  auto consider_lateral = [&](double t) {
    if (t <= 0.0 || t >= best) return;
    double z = ray.oz + t * ray.dz;
    if (z < o.z_lo - 1e-9 || z > o.z_hi + 1e-9) return;
    best = t;
  };
  if (std::abs(A) < kEps) {
    if (std::abs(B) > kEps) consider_lateral(-C / B);
  } else {
    double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      double s = std::sqrt(disc);
      consider_lateral((-B - s) / (2.0 * A));
      consider_lateral((-B + s) / (2.0 * A));
    }
  }
  // Base disk at z_lo.
  if (std::abs(ray.dz) > kEps) {
    double t0 = (o.z_lo - ray.oz) / ray.dz;
    if (t0 > 0.0 && t0 < best) {
      Vec2 p = ray.oxy + ray.dxy * t0;
      if ((p - base.center).norm() <= base.radius) best = t0;
    }
  }
  if (best == kInf) return false;
  *t_hit = best;
  return true;
}

bool slope_hit(const Ray3& ray, const Obstacle& o, double* t_hit) {
  // Surface plane: z = z_lo + grad . (p - origin).
  const Vec2 g = o.slope_grad;
  const double denom = ray.dz - g.dot(ray.dxy);
  if (std::abs(denom) < kEps) return false;
  const double num = o.z_lo + g.dot(ray.oxy - o.slope_origin) - ray.oz;
  const double t = num / denom;
  if (t <= 0.0) return false;
  Vec2 p = ray.oxy + ray.dxy * t;
  if (!point_in_polygon(p, *o.polygon())) return false;
  const double z = ray.oz + t * ray.dz;
  if (z < o.z_lo - 1e-9 || z > o.z_hi + 1e-9) return false;
  *t_hit = t;
  return true;
}

HitRecord trace(const Ray3& ray, const WorldState& world, int agent_index,
                double max_range) {
  HitRecord best;
  best.distance = kInf;
  best.kind = SurfaceKind::background;

  auto consider = [&](double t, SurfaceKind kind, int index) {
    if (t < best.distance) {
      best.distance = t;
      best.kind = kind;
      best.index = index;
    }
  };

  for (int j = 0; j < static_cast<int>(world.agents.size()); ++j) {
    if (j == agent_index) continue;
    Obstacle body;
    body.footprint = Circle{world.agents[j].position, world.agents[j].radius};
    body.z_lo = 0.0;
    body.z_hi = kAgentBodyHeight;
    double t;
    if (extruded_hit(ray, body, &t)) consider(t, SurfaceKind::agent_body, j);
  }
  for (int k = 0; k < static_cast<int>(world.obstacles.size()); ++k) {
    const Obstacle& o = world.obstacles[k];
    double t;
    switch (o.category) {
      case ObstacleCategory::cone:
        if (cone_hit(ray, o, &t)) consider(t, SurfaceKind::obstacle, k);
        break;
      case ObstacleCategory::slope:
        if (slope_hit(ray, o, &t)) consider(t, SurfaceKind::slope, k);
        break;
      case ObstacleCategory::special_floor:
        if (extruded_hit(ray, o, &t)) consider(t, SurfaceKind::special_floor, k);
        break;
      default:
        if (extruded_hit(ray, o, &t)) consider(t, SurfaceKind::obstacle, k);
        break;
    }
  }
  // Floor last so that a special_floor patch at the same distance wins the tie.
  if (ray.dz < -kEps) {
    double t = -ray.oz / ray.dz;
    if (t > 0.0) consider(t, SurfaceKind::floor, -1);
  }

  if (best.distance > max_range) {
    best.distance = max_range;
    best.kind = SurfaceKind::background;
    best.index = -1;
  }
  best.distance = std::max(best.distance, kMinDepth);
  return best;
}

}  // namespace

double column_bearing(const CameraModel& camera, int j) {
  const double fx = (camera.width / 2.0) / std::tan(camera.horizontal_fov / 2.0);
  const double u = (j + 0.5) - camera.width / 2.0;
  return std::atan2(-u, fx);
}

RenderResult render_scene(const WorldState& world, int agent_index,
                          const CameraModel& camera) {
  camera.validate();
  if (agent_index < 0 || agent_index >= static_cast<int>(world.agents.size())) {
    throw std::out_of_range("render_scene: bad agent index");
  }
  const AgentState& agent = world.agents[agent_index];
  const int H = camera.height;
  const int W = camera.width;

  RenderResult out;
  out.depth.height = H;
  out.depth.width = W;
  out.depth.max_range = camera.max_range;
  out.depth.values.resize(static_cast<size_t>(H) * W);
  out.mask.height = H;
  out.mask.width = W;
  out.mask.values.resize(static_cast<size_t>(H) * W);
  out.hits.resize(static_cast<size_t>(H) * W);

  const double fx = (W / 2.0) / std::tan(camera.horizontal_fov / 2.0);
  const double fz = (H / 2.0) / std::tan(camera.vertical_fov / 2.0);
  const double ch = std::cos(agent.heading);
  const double sh = std::sin(agent.heading);

  for (int i = 0; i < H; ++i) {
    const double v = H / 2.0 - (i + 0.5);  // up positive, row 0 on top
    for (int j = 0; j < W; ++j) {
      const double u = (j + 0.5) - W / 2.0;  // right positive
      // Camera frame: x forward, y left, z up.
      double dx = 1.0;
      double dy = -u / fx;
      double dz = v / fz;
      const double inv_norm = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
      dx *= inv_norm;
      dy *= inv_norm;
      dz *= inv_norm;

      Ray3 ray;
      ray.oxy = agent.position;
      ray.oz = agent.camera_height;
      ray.dxy = Vec2{ch * dx - sh * dy, sh * dx + ch * dy};
      ray.dz = dz;

      HitRecord hit = trace(ray, world, agent_index, camera.max_range);
      const size_t idx = static_cast<size_t>(i) * W + j;
      out.hits[idx] = hit;
      out.depth.values[idx] = hit.distance;
      const bool traversable =
          hit.kind == SurfaceKind::floor || hit.kind == SurfaceKind::slope;
      out.mask.values[idx] = traversable ? 0 : 1;
    }
  }
  return out;
}

DepthImage render_depth(const WorldState& world, int agent_index,
                        const CameraModel& camera) {
  return render_scene(world, agent_index, camera).depth;
}

TraversabilityMask render_traversability(const WorldState& world, int agent_index,
                                         const CameraModel& camera) {
  return render_scene(world, agent_index, camera).mask;
}

std::vector<double> ideal_planar_laser(const WorldState& world, int agent_index,
                                       const CameraModel& camera, double scan_height) {
  camera.validate();
  const AgentState& agent = world.agents[agent_index];
  std::vector<double> ranges(camera.width, camera.max_range);

  for (int j = 0; j < camera.width; ++j) {
    const double bearing = agent.heading + column_bearing(camera, j);
    Ray3 ray;
    ray.oxy = agent.position;
    ray.oz = scan_height;
    ray.dxy = Vec2{std::cos(bearing), std::sin(bearing)};
    ray.dz = 0.0;

    double best = kInf;
    auto consider = [&](double t) {
      if (t > 0.0 && t < best) best = t;
    };

    for (int a = 0; a < static_cast<int>(world.agents.size()); ++a) {
      if (a == agent_index) continue;
      if (scan_height < 0.0 || scan_height > kAgentBodyHeight) continue;
      double t_in, t_out;
      if (ray_circle_interval(ray.oxy, ray.dxy,
                              Circle{world.agents[a].position, world.agents[a].radius},
                              &t_in, &t_out) &&
          t_out > 0.0) {
        consider(std::max(t_in, 0.0));
      }
    }
    for (const Obstacle& o : world.obstacles) {
      if (o.category == ObstacleCategory::slope) {
        // The beam meets the slope where the surface climbs to scan height.
        const double rise = o.slope_grad.dot(ray.dxy);
        if (std::abs(rise) < kEps) continue;
        const double t = (scan_height - o.z_lo -
                          o.slope_grad.dot(ray.oxy - o.slope_origin)) / rise;
        if (t <= 0.0) continue;
        Vec2 p = ray.oxy + ray.dxy * t;
        if (point_in_polygon(p, *o.polygon())) consider(t);
        continue;
      }
      if (scan_height < o.z_lo || scan_height > o.z_hi) continue;
      if (o.category == ObstacleCategory::cone) {
        const Circle& base = *o.circle();
        const double span = o.z_hi - o.z_lo;
        const double r = base.radius * (o.z_hi - scan_height) / span;
        if (r <= 0.0) continue;
        double t_in, t_out;
        if (ray_circle_interval(ray.oxy, ray.dxy, Circle{base.center, r}, &t_in, &t_out) &&
            t_out > 0.0) {
          consider(std::max(t_in, 0.0));
        }
        continue;
      }
      double t_in, t_out;
      bool ok = o.circle()
                    ? ray_circle_interval(ray.oxy, ray.dxy, *o.circle(), &t_in, &t_out)
                    : ray_polygon_interval(ray.oxy, ray.dxy, *o.polygon(), &t_in, &t_out);
      if (ok && t_out > 0.0) consider(std::max(t_in, 0.0));
    }

    ranges[j] = std::clamp(best, kMinDepth, camera.max_range);
  }
  return ranges;
}

}  // namespace plnav
