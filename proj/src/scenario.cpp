#include "plnav/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "plnav/rng.hpp"

namespace plnav {

namespace {

using nlohmann::json;

constexpr double kWallHeight = 0.6;
constexpr double kArenaHalf = 4.0;

void add_arena_walls(WorldState& world, double half) {
  const double t = 0.1;
  const double off = half - t / 2.0;
  const double len = 2.0 * half;
  world.obstacles.push_back(make_solid_box({0.0, off}, len, t, 0.0, kWallHeight));
  world.obstacles.push_back(make_solid_box({0.0, -off}, len, t, 0.0, kWallHeight));
  world.obstacles.push_back(make_solid_box({off, 0.0}, t, len, 0.0, kWallHeight));
  world.obstacles.push_back(make_solid_box({-off, 0.0}, t, len, 0.0, kWallHeight));
}

AgentState make_agent(const ScenarioSpec& spec, Vec2 pos, Vec2 goal, double heading) {
  AgentState a;
  a.position = pos;
  a.goal = goal;
  a.heading = wrap_angle(heading);
  a.radius = spec.agent_radius;
  a.camera_height = spec.camera_height;
  return a;
}

double bearing_to(Vec2 from, Vec2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

bool placement_ok(const WorldState& world, const Vec2& p, double radius,
                  double clearance) {
  if (p.x < world.bounds.min.x + radius || p.x > world.bounds.max.x - radius ||
      p.y < world.bounds.min.y + radius || p.y > world.bounds.max.y - radius) {
    return false;
  }
  for (const Obstacle& o : world.obstacles) {
    if (o.traversable()) continue;
    double d = o.circle() ? distance_to_circle(p, *o.circle())
                          : distance_to_polygon(p, *o.polygon());
    if (d < radius + clearance) return false;
  }
  return true;
}

/// Samples start/goal pairs inside [lo, hi]^2 with pairwise separation and
/// obstacle clearance, rejecting bad draws. Mutating the world as it goes
/// keeps spawn order (and thus the result) a pure function of the rng state.
void sample_free_agents(WorldState& world, const ScenarioSpec& spec, Rng& rng,
                        int n_agents, double lo, double hi,
                        double min_goal_dist, double max_goal_dist) {
  const double sep = 2.0 * spec.agent_radius + 0.4;
  for (int i = 0; i < n_agents; ++i) {
    for (int attempt = 0; attempt < 400; ++attempt) {
      Vec2 start{rng.uniform(lo, hi), rng.uniform(lo, hi)};
      Vec2 goal{rng.uniform(lo, hi), rng.uniform(lo, hi)};
      const double d = (goal - start).norm();
      if (d < min_goal_dist || d > max_goal_dist) continue;
      if (!placement_ok(world, start, spec.agent_radius, 0.1) ||
          !placement_ok(world, goal, spec.agent_radius, 0.1)) {
        continue;
      }
      bool clash = false;
      for (const AgentState& other : world.agents) {
        if ((other.position - start).norm() < sep ||
            (other.goal - goal).norm() < sep) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      const double heading = bearing_to(start, goal) + rng.uniform(-0.3, 0.3);
      world.agents.push_back(make_agent(spec, start, goal, heading));
      break;
    }
  }
  if (static_cast<int>(world.agents.size()) < n_agents) {
    throw std::runtime_error("spawn_scenario: could not place all agents");
  }
}

void add_single_obstacle(WorldState& world, const std::string& kind, Vec2 c) {
  if (kind == "table") {
    ConvexPolygon slab = make_box(c, 1.2, 0.8);
    world.obstacles.push_back(make_table_top(slab, 0.20, 0.25));
    const double ox = 0.6 - 0.09, oy = 0.4 - 0.09;
    for (double sx : {-1.0, 1.0}) {
      for (double sy : {-1.0, 1.0}) {
        world.obstacles.push_back(
            make_solid_box({c.x + sx * ox, c.y + sy * oy}, 0.06, 0.06, 0.0, 0.20));
      }
    }
  } else if (kind == "cafe_table") {
    world.obstacles.push_back(make_table_top(Circle{c, 0.45}, 0.18, 0.22));
    world.obstacles.push_back(make_solid_circle(c, 0.06, 0.0, 0.18));
  } else if (kind == "fire_hydrant") {
    world.obstacles.push_back(make_solid_circle(c, 0.12, 0.0, 0.28));
  } else if (kind == "construction_cone") {
    world.obstacles.push_back(make_cone(c, 0.16, 0.0, 0.26));
  } else if (kind == "cabinet") {
    world.obstacles.push_back(make_solid_box(c, 0.8, 0.45, 0.06, 0.45));
    const double ox = 0.4 - 0.05, oy = 0.225 - 0.05;
    for (double sx : {-1.0, 1.0}) {
      for (double sy : {-1.0, 1.0}) {
        world.obstacles.push_back(
            make_solid_box({c.x + sx * ox, c.y + sy * oy}, 0.04, 0.04, 0.0, 0.06));
      }
    }
  } else {
    throw std::invalid_argument("unknown single_obstacle kind: " + kind);
  }
}

WorldState spawn_impl(const ScenarioSpec& spec, uint64_t seed) {
  Rng rng(mix_seed(seed, static_cast<uint64_t>(spec.kind) * 1315423911ULL));
  WorldState world;
  world.dt = 0.1;
  world.bounds = {{-kArenaHalf, -kArenaHalf}, {kArenaHalf, kArenaHalf}};

  switch (spec.kind) {
    case ScenarioKind::stage1_open: {
      add_arena_walls(world, kArenaHalf);
      // One full-height static obstacle keeps the stage simple while still
      // forcing real avoidance rather than relying on the other agents to
      // yield.
      for (int k = 0; k < 1; ++k) {
        for (int attempt = 0; attempt < 100; ++attempt) {
          Vec2 c{rng.uniform(-2.2, 2.2), rng.uniform(-2.2, 2.2)};
          bool clash = false;
          for (const Obstacle& o : world.obstacles) {
            const double d = o.circle() ? distance_to_circle(c, *o.circle())
                                        : distance_to_polygon(c, *o.polygon());
            if (d < 1.5) clash = true;  // keep wide passable gaps
          }
          if (clash) continue;
          if (rng.uniform() < 0.5) {
            world.obstacles.push_back(
                make_solid_circle(c, rng.uniform(0.2, 0.3), 0.0, kWallHeight));
          } else {
            world.obstacles.push_back(make_solid_box(c, rng.uniform(0.4, 0.55),
                                                     rng.uniform(0.4, 0.55), 0.0,
                                                     kWallHeight,
                                                     rng.uniform(0.0, kPi)));
          }
          break;
        }
      }
      const int n = spec.n_agents > 0 ? spec.n_agents : 4;
      sample_free_agents(world, spec, rng, n, -3.2, 3.2, 2.5, 5.5);
      break;
    }
    case ScenarioKind::stage2_crossing:
    case ScenarioKind::test_crossing: {
      add_arena_walls(world, kArenaHalf);
      const int n = spec.n_agents > 0 ? spec.n_agents : 4;
      const double radius = spec.kind == ScenarioKind::stage2_crossing ? 2.8 : 3.1;
      const double base = rng.uniform(0.0, 2.0 * kPi);
      for (int i = 0; i < n; ++i) {
        const double ang = base + 2.0 * kPi * i / n + rng.uniform(-0.15, 0.15);
        Vec2 start{radius * std::cos(ang), radius * std::sin(ang)};
        Vec2 goal{-start.x + rng.uniform(-0.3, 0.3), -start.y + rng.uniform(-0.3, 0.3)};
        world.agents.push_back(make_agent(spec, start, goal, bearing_to(start, goal)));
      }
      break;
    }
    case ScenarioKind::stage3_corridor: {
      add_arena_walls(world, kArenaHalf);
      world.obstacles.push_back(make_solid_box({0.0, 0.9}, 5.0, 0.12, 0.0, kWallHeight));
      world.obstacles.push_back(make_solid_box({0.0, -0.9}, 5.0, 0.12, 0.0, kWallHeight));
      const int n = spec.n_agents > 0 ? spec.n_agents : 2;
      for (int i = 0; i < n; ++i) {
        const double side = (i % 2 == 0) ? -1.0 : 1.0;
        const double y = rng.uniform(-0.45, 0.45);
        Vec2 start{side * rng.uniform(2.9, 3.3), y};
        Vec2 goal{-side * rng.uniform(2.9, 3.3), rng.uniform(-0.45, 0.45)};
        world.agents.push_back(make_agent(spec, start, goal, bearing_to(start, goal)));
      }
      break;
    }
    case ScenarioKind::test_walls: {
      add_arena_walls(world, kArenaHalf);
      const double gap_center = rng.uniform(-2.0, 2.0);
      const double gap_half = 0.6;
      const double top_len = kArenaHalf - (gap_center + gap_half);
      const double bot_len = (gap_center - gap_half) + kArenaHalf;
      if (top_len > 0.05) {
        world.obstacles.push_back(make_solid_box(
            {0.0, gap_center + gap_half + top_len / 2.0}, 0.12, top_len, 0.0, kWallHeight));
      }
      if (bot_len > 0.05) {
        world.obstacles.push_back(make_solid_box(
            {0.0, gap_center - gap_half - bot_len / 2.0}, 0.12, bot_len, 0.0, kWallHeight));
      }
      const int n = spec.n_agents > 0 ? spec.n_agents : 2;
      const double sep = 2.0 * spec.agent_radius + 0.3;
      for (int i = 0; i < n; ++i) {
        for (int attempt = 0; attempt < 200; ++attempt) {
          Vec2 start{rng.uniform(-3.3, -2.7), rng.uniform(-2.5, 2.5)};
          Vec2 goal{rng.uniform(2.7, 3.3), rng.uniform(-2.5, 2.5)};
          bool clash = false;
          for (const AgentState& other : world.agents) {
            if ((other.position - start).norm() < sep) clash = true;
          }
          if (clash) continue;
          world.agents.push_back(make_agent(spec, start, goal, bearing_to(start, goal)));
          break;
        }
      }
      break;
    }
    case ScenarioKind::test_random: {
      add_arena_walls(world, kArenaHalf);
      const int n_obs = 5 + rng.uniform_int(0, 2);
      for (int k = 0; k < n_obs; ++k) {
        Vec2 c{rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)};
        if (rng.uniform() < 0.5) {
          world.obstacles.push_back(
              make_solid_circle(c, rng.uniform(0.15, 0.35), 0.0, kWallHeight));
        } else {
          world.obstacles.push_back(make_solid_box(c, rng.uniform(0.3, 0.7),
                                                   rng.uniform(0.3, 0.7), 0.0,
                                                   kWallHeight, rng.uniform(0.0, kPi)));
        }
      }
      const int n = spec.n_agents > 0 ? spec.n_agents : 2;
      sample_free_agents(world, spec, rng, n, -3.2, 3.2, 2.5, 6.0);
      break;
    }
    case ScenarioKind::single_obstacle: {
      add_arena_walls(world, kArenaHalf);
      Vec2 c{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
      add_single_obstacle(world, spec.variant, c);
      Vec2 start{rng.uniform(-2.8, -2.2), rng.uniform(-0.8, 0.8)};
      Vec2 goal{rng.uniform(2.2, 2.8), rng.uniform(-0.8, 0.8)};
      world.agents.push_back(make_agent(spec, start, goal, bearing_to(start, goal)));
      break;
    }
    case ScenarioKind::complex_ground: {
      add_arena_walls(world, kArenaHalf);
      Vec2 c{rng.uniform(-0.3, 0.3), rng.uniform(-0.5, 0.5)};
      if (spec.variant == "special_floor") {
        world.obstacles.push_back(make_special_floor(make_box(c, 1.5, 1.5)));
      } else if (spec.variant == "slope") {
        const double rise = 0.15;
        world.obstacles.push_back(make_slope(make_box(c, 2.0, 1.6), 0.0, rise,
                                             {c.x - 1.0, c.y}, {rise / 2.0, 0.0}));
      } else {
        throw std::invalid_argument("unknown complex_ground kind: " + spec.variant);
      }
      Vec2 start{rng.uniform(-2.8, -2.2), c.y + rng.uniform(-0.5, 0.5)};
      Vec2 goal{rng.uniform(2.2, 2.8), c.y + rng.uniform(-0.5, 0.5)};
      world.agents.push_back(make_agent(spec, start, goal, bearing_to(start, goal)));
      break;
    }
    case ScenarioKind::limitation_wall: {
      const double half_y = std::max(3.0, spec.wall_width / 2.0 + 2.5);
      const double half_x = std::max(4.0, spec.wall_distance + 1.5);
      world.bounds = {{-half_x, -half_y}, {half_x, half_y}};
      if (spec.wall_width > 0.0) {
        world.obstacles.push_back(
            make_solid_box({0.0, 0.0}, 0.1, spec.wall_width, 0.0, kWallHeight));
      }
      Vec2 start{-spec.wall_distance, rng.uniform(-0.05, 0.05)};
      Vec2 goal{2.0, rng.uniform(-0.05, 0.05)};
      world.agents.push_back(make_agent(spec, start, goal, 0.0));
      break;
    }
    case ScenarioKind::from_file: {
      world = load_scene_json(spec.file);
      if (world.agents.empty()) {
        throw std::invalid_argument("scene file has no agents: " + spec.file);
      }
      break;
    }
  }
  world.time = 0.0;
  return world;
}

}  // namespace

ScenarioSpec ScenarioSpec::parse(const std::string& id) {
  ScenarioSpec spec;
  const auto colon = id.find(':');
  const std::string head = id.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : id.substr(colon + 1);

  if (head == "stage1_open") {
    spec.kind = ScenarioKind::stage1_open;
  } else if (head == "stage2_crossing") {
    spec.kind = ScenarioKind::stage2_crossing;
  } else if (head == "stage3_corridor") {
    spec.kind = ScenarioKind::stage3_corridor;
  } else if (head == "test_crossing") {
    spec.kind = ScenarioKind::test_crossing;
  } else if (head == "test_walls") {
    spec.kind = ScenarioKind::test_walls;
  } else if (head == "test_random") {
    spec.kind = ScenarioKind::test_random;
  } else if (head == "single_obstacle") {
    spec.kind = ScenarioKind::single_obstacle;
    spec.variant = tail;
  } else if (head == "complex_ground") {
    spec.kind = ScenarioKind::complex_ground;
    spec.variant = tail;
  } else if (head == "limitation_wall") {
    spec.kind = ScenarioKind::limitation_wall;
    std::stringstream ss(tail);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.rfind("w=", 0) == 0) spec.wall_width = std::stod(part.substr(2));
      else if (part.rfind("d=", 0) == 0) spec.wall_distance = std::stod(part.substr(2));
      else throw std::invalid_argument("bad limitation_wall parameter: " + part);
    }
  } else if (head == "file") {
    spec.kind = ScenarioKind::from_file;
    spec.file = tail;
  } else {
    throw std::invalid_argument("unknown scenario id: " + id);
  }
  return spec;
}

std::string ScenarioSpec::id() const {
  switch (kind) {
    case ScenarioKind::stage1_open: return "stage1_open";
    case ScenarioKind::stage2_crossing: return "stage2_crossing";
    case ScenarioKind::stage3_corridor: return "stage3_corridor";
    case ScenarioKind::test_crossing: return "test_crossing";
    case ScenarioKind::test_walls: return "test_walls";
    case ScenarioKind::test_random: return "test_random";
    case ScenarioKind::single_obstacle: return "single_obstacle:" + variant;
    case ScenarioKind::complex_ground: return "complex_ground:" + variant;
    case ScenarioKind::limitation_wall: {
      std::ostringstream os;
      os << "limitation_wall:w=" << wall_width << ",d=" << wall_distance;
      return os.str();
    }
    case ScenarioKind::from_file: return "file:" + file;
  }
  return "stage1_open";
}

WorldState spawn_scenario(const ScenarioSpec& spec, uint64_t seed) {
  return spawn_impl(spec, seed);
}

WorldState spawn_scenario(const std::string& id, uint64_t seed) {
  return spawn_impl(ScenarioSpec::parse(id), seed);
}

namespace {

json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }
Vec2 vec2_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string scene_to_json(const WorldState& world) {
  json j;
  j["bounds"] = {{"min", vec2_to_json(world.bounds.min)},
                 {"max", vec2_to_json(world.bounds.max)}};
  j["dt"] = world.dt;
  j["obstacles"] = json::array();
  for (const Obstacle& o : world.obstacles) {
    json jo;
    if (const Circle* c = o.circle()) {
      jo["shape"] = "circle";
      jo["center"] = vec2_to_json(c->center);
      jo["radius"] = c->radius;
    } else {
      jo["shape"] = "polygon";
      json verts = json::array();
      for (const Vec2& v : o.polygon()->vertices) verts.push_back(vec2_to_json(v));
      jo["vertices"] = verts;
    }
    jo["height_interval"] = json::array({o.z_lo, o.z_hi});
    jo["category"] = to_string(o.category);
    if (o.category == ObstacleCategory::slope) {
      jo["slope_origin"] = vec2_to_json(o.slope_origin);
      jo["slope_grad"] = vec2_to_json(o.slope_grad);
    }
    j["obstacles"].push_back(jo);
  }
  j["agents"] = json::array();
  for (const AgentState& a : world.agents) {
    j["agents"].push_back({{"position", vec2_to_json(a.position)},
                          {"heading", a.heading},
                          {"radius", a.radius},
                          {"goal", vec2_to_json(a.goal)},
                          {"camera_height", a.camera_height}});
  }
  return j.dump(2);
}

WorldState scene_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  WorldState world;
  world.bounds.min = vec2_from_json(j.at("bounds").at("min"));
  world.bounds.max = vec2_from_json(j.at("bounds").at("max"));
  world.dt = j.value("dt", 0.1);
  if (!(world.dt > 0.0)) throw std::invalid_argument("scene: dt must be > 0");

  for (const json& jo : j.value("obstacles", json::array())) {
    Obstacle o;
    const std::string shape = jo.at("shape").get<std::string>();
    if (shape == "circle") {
      o.footprint = Circle{vec2_from_json(jo.at("center")), jo.at("radius").get<double>()};
    } else if (shape == "polygon") {
      ConvexPolygon poly;
      for (const json& v : jo.at("vertices")) poly.vertices.push_back(vec2_from_json(v));
      o.footprint = std::move(poly);
    } else {
      throw std::invalid_argument("scene: unknown shape " + shape);
    }
    o.z_lo = jo.at("height_interval").at(0).get<double>();
    o.z_hi = jo.at("height_interval").at(1).get<double>();
    o.category = obstacle_category_from_string(jo.at("category").get<std::string>());
    if (o.category == ObstacleCategory::slope) {
      o.slope_origin = vec2_from_json(jo.at("slope_origin"));
      o.slope_grad = vec2_from_json(jo.at("slope_grad"));
    }
    o.validate();
    world.obstacles.push_back(std::move(o));
  }
  for (const json& ja : j.value("agents", json::array())) {
    AgentState a;
    a.position = vec2_from_json(ja.at("position"));
    a.heading = ja.value("heading", 0.0);
    a.radius = ja.value("radius", 0.3);
    a.goal = vec2_from_json(ja.at("goal"));
    a.camera_height = ja.value("camera_height", 0.3);
    if (!(a.radius > 0.0)) throw std::invalid_argument("scene: agent radius must be > 0");
    if (!world.bounds.contains(a.position)) {
      throw std::invalid_argument("scene: agent spawns outside bounds");
    }
    world.agents.push_back(a);
  }
  return world;
}

WorldState load_scene_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json_text(ss.str());
}

}  // namespace plnav
