#pragma once

#include <cstdint>
#include <string>

#include "plnav/world.hpp"

namespace plnav {

enum class ScenarioKind {
  stage1_open,
  stage2_crossing,
  stage3_corridor,
  test_crossing,
  test_walls,
  test_random,
  single_obstacle,
  complex_ground,
  limitation_wall,
  from_file
};

/// Parsed scenario selector. Textual ids:
///   stage1_open, stage2_crossing, stage3_corridor,
///   test_crossing, test_walls, test_random,
///   single_obstacle:<table|cafe_table|fire_hydrant|construction_cone|cabinet>,
///   complex_ground:<special_floor|slope>,
///   limitation_wall:w=<width>,d=<distance>,
///   file:<path.json>
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::stage1_open;
  std::string variant;       // obstacle / ground kind
  double wall_width = 1.0;   // limitation_wall
  double wall_distance = 2.0;
  std::string file;          // from_file
  int n_agents = 0;          // 0 = scenario default
  double agent_radius = 0.3;
  double camera_height = 0.3;

  static ScenarioSpec parse(const std::string& id);
  std::string id() const;
};

/// Deterministic world for (spec, seed): identical inputs produce a
/// bit-identical WorldState. Start/goal poses are sampled from the
/// scenario's spawn regions with rejection of overlapping placements.
/// Throws std::invalid_argument for unknown scenario ids.
WorldState spawn_scenario(const ScenarioSpec& spec, uint64_t seed);
WorldState spawn_scenario(const std::string& id, uint64_t seed);

/// Scene file round-trip (schema documented in the README): obstacles with
/// {shape, params, height_interval, category}, bounds, dt and agents.
WorldState load_scene_json(const std::string& path);
std::string scene_to_json(const WorldState& world);
WorldState scene_from_json_text(const std::string& text);

}  // namespace plnav
