#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "plnav/scenario.hpp"

using namespace plnav;

namespace {

bool worlds_identical(const WorldState& a, const WorldState& b) {
  if (a.agents.size() != b.agents.size() || a.obstacles.size() != b.obstacles.size()) {
    return false;
  }
  for (size_t i = 0; i < a.agents.size(); ++i) {
    if (a.agents[i].position.x != b.agents[i].position.x ||
        a.agents[i].position.y != b.agents[i].position.y ||
        a.agents[i].heading != b.agents[i].heading ||
        a.agents[i].goal.x != b.agents[i].goal.x ||
        a.agents[i].goal.y != b.agents[i].goal.y) {
      return false;
    }
  }
  for (size_t k = 0; k < a.obstacles.size(); ++k) {
    const Obstacle& oa = a.obstacles[k];
    const Obstacle& ob = b.obstacles[k];
    if (oa.category != ob.category || oa.z_lo != ob.z_lo || oa.z_hi != ob.z_hi) {
      return false;
    }
    if (const Circle* ca = oa.circle()) {
      const Circle* cb = ob.circle();
      if (cb == nullptr || ca->center.x != cb->center.x ||
          ca->center.y != cb->center.y || ca->radius != cb->radius) {
        return false;
      }
    } else {
      const ConvexPolygon* pa = oa.polygon();
      const ConvexPolygon* pb = ob.polygon();
      if (pb == nullptr || pa->vertices.size() != pb->vertices.size()) return false;
      for (size_t v = 0; v < pa->vertices.size(); ++v) {
        if (pa->vertices[v].x != pb->vertices[v].x ||
            pa->vertices[v].y != pb->vertices[v].y) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("same scenario and seed give a bit-identical world") {
  for (const char* id : {"stage1_open", "stage2_crossing", "stage3_corridor",
                         "test_crossing", "test_walls", "test_random",
                         "single_obstacle:table", "complex_ground:special_floor",
                         "limitation_wall:w=1.5,d=2.0"}) {
    WorldState w1 = spawn_scenario(id, 7);
    WorldState w2 = spawn_scenario(id, 7);
    CHECK(worlds_identical(w1, w2));
    WorldState w3 = spawn_scenario(id, 8);
    CHECK_FALSE(worlds_identical(w1, w3));
  }
}

TEST_CASE("unknown scenario id is rejected") {
  CHECK_THROWS_AS(spawn_scenario("no_such_scene", 1), std::invalid_argument);
  CHECK_THROWS_AS(spawn_scenario("single_obstacle:sofa", 1), std::invalid_argument);
}

TEST_CASE("spawned agents never start in collision") {
  for (const char* id : {"stage1_open", "stage2_crossing", "test_crossing",
                         "test_walls", "test_random", "single_obstacle:table",
                         "single_obstacle:cabinet", "complex_ground:slope"}) {
    for (uint64_t seed = 0; seed < 25; ++seed) {
      WorldState world = spawn_scenario(id, seed);
      REQUIRE(!world.agents.empty());
      for (int i = 0; i < static_cast<int>(world.agents.size()); ++i) {
        CollisionReport r = check_collision(world, i);
        CAPTURE(id);
        CAPTURE(seed);
        CHECK_FALSE(r.collided);
        CHECK(world.bounds.contains(world.agents[i].position));
      }
    }
  }
}

TEST_CASE("single_obstacle(table) sits between the start and goal regions") {
  WorldState world = spawn_scenario("single_obstacle:table", 3);
  REQUIRE(world.agents.size() == 1);
  CHECK(world.agents[0].position.x < -2.0);
  CHECK(world.agents[0].goal.x > 2.0);
  bool has_table_top = false;
  for (const Obstacle& o : world.obstacles) {
    if (o.category == ObstacleCategory::table_top) has_table_top = true;
  }
  CHECK(has_table_top);
}

TEST_CASE("crossing spawns start and goal on opposite sides") {
  ScenarioSpec spec = ScenarioSpec::parse("test_crossing");
  spec.n_agents = 4;
  WorldState world = spawn_scenario(spec, 12);
  REQUIRE(world.agents.size() == 4);
  for (const AgentState& a : world.agents) {
    // Goal is near the antipode of the start.
    CHECK((a.goal + a.position).norm() < 1.0);
  }
}

TEST_CASE("limitation wall parameters control the geometry") {
  WorldState world = spawn_scenario("limitation_wall:w=2.0,d=3.0", 1);
  REQUIRE(world.obstacles.size() == 1);
  REQUIRE(world.agents.size() == 1);
  CHECK(world.agents[0].position.x == doctest::Approx(-3.0));
  const ConvexPolygon* wall = world.obstacles[0].polygon();
  REQUIRE(wall != nullptr);
  double ymin = 1e9, ymax = -1e9;
  for (const Vec2& v : wall->vertices) {
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  CHECK(ymax - ymin == doctest::Approx(2.0));

  WorldState none = spawn_scenario("limitation_wall:w=0,d=3.0", 1);
  CHECK(none.obstacles.empty());
}

TEST_CASE("scene json round-trips") {
  WorldState world = spawn_scenario("single_obstacle:construction_cone", 5);
  world.obstacles.push_back(
      make_slope(make_box({1.0, 2.0}, 1.0, 1.0), 0.0, 0.2, {0.5, 2.0}, {0.2, 0.0}));
  const std::string text = scene_to_json(world);
  WorldState back = scene_from_json_text(text);
  REQUIRE(back.obstacles.size() == world.obstacles.size());
  REQUIRE(back.agents.size() == world.agents.size());
  CHECK(back.agents[0].position.x == world.agents[0].position.x);
  CHECK(back.agents[0].goal.y == world.agents[0].goal.y);
  CHECK(back.obstacles.back().category == ObstacleCategory::slope);
  CHECK(back.obstacles.back().slope_grad.x == doctest::Approx(0.2));

  // And through a file with the file: scenario id.
  const std::string path = "test_scene_roundtrip.json";
  {
    std::ofstream out(path);
    out << text;
  }
  WorldState loaded = spawn_scenario("file:" + path, 0);
  CHECK(worlds_identical(world, loaded));
  std::filesystem::remove(path);
}

TEST_CASE("scene json validates content") {
  CHECK_THROWS(scene_from_json_text("{\"bounds\":{\"min\":[0,0],\"max\":[1,1]},"
                                    "\"obstacles\":[{\"shape\":\"blob\"}]}"));
  // Agent outside bounds.
  CHECK_THROWS(scene_from_json_text(
      "{\"bounds\":{\"min\":[-1,-1],\"max\":[1,1]},\"agents\":"
      "[{\"position\":[5,0],\"goal\":[0,0]}]}"));
}
