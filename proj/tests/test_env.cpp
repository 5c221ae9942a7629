#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plnav/config.hpp"
#include "plnav/env.hpp"
#include "plnav/rng.hpp"

using namespace plnav;

namespace {

EnvConfig small_env_config() {
  AppConfig cfg;
  cfg.camera.height = 24;
  cfg.camera.width = 32;
  cfg.finalize();
  return make_env_config(cfg, /*augment=*/false);
}

AgentState agent_at(Vec2 pos, Vec2 goal, double heading = 0.0) {
  AgentState a;
  a.position = pos;
  a.goal = goal;
  a.heading = heading;
  return a;
}

}  // namespace

TEST_CASE("reward: progress term with the published constants") {
  RewardConfig cfg;
  AgentState prev = agent_at({0.0, 0.0}, {2.0, 0.0});
  AgentState curr = agent_at({0.5, 0.0}, {2.0, 0.0});
  curr.angular_vel = 0.2 * kMaxAngularSpeed;
  CollisionReport none;
  RewardBreakdown r = compute_reward(prev, curr, none, cfg);
  CHECK(r.r_goal == doctest::Approx(2.5 * (2.0 - 1.5)).epsilon(1e-15));
  CHECK(r.r_collision == 0.0);
  CHECK(r.r_rotational == 0.0);
  CHECK(r.total == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("reward: arrival, collision and rotation terms") {
  RewardConfig cfg;
  CollisionReport none;

  AgentState prev = agent_at({0.15, 0.0}, {0.0, 0.0});
  AgentState curr = agent_at({0.05, 0.0}, {0.0, 0.0});
  RewardBreakdown r = compute_reward(prev, curr, none, cfg);
  CHECK(r.r_goal == 15.0);

  CollisionReport hit;
  hit.collided = true;
  hit.with = CollisionWith::agent;
  r = compute_reward(prev, agent_at({0.5, 0.0}, {0.0, 0.0}), hit, cfg);
  CHECK(r.r_collision == -15.0);

  AgentState spin = agent_at({1.0, 0.0}, {1.0, 0.0});
  spin.angular_vel = 0.8 * kMaxAngularSpeed;
  r = compute_reward(spin, spin, none, cfg);
  CHECK(r.r_rotational == doctest::Approx(-0.1 * 0.8).epsilon(1e-15));

  // At rest at constant distance: total reward is exactly zero.
  AgentState still = agent_at({1.0, 0.0}, {3.0, 0.0});
  r = compute_reward(still, still, none, cfg);
  CHECK(r.total == 0.0);
}

TEST_CASE("reward decomposition always sums exactly") {
  RewardConfig cfg;
  Rng rng(4);
  const double dt = 0.1;
  for (int i = 0; i < 500; ++i) {
    AgentState prev = agent_at({rng.uniform(-3, 3), rng.uniform(-3, 3)},
                               {rng.uniform(-3, 3), rng.uniform(-3, 3)},
                               rng.uniform(-kPi, kPi));
    Action a{rng.uniform(0.0, 1.0), rng.uniform(-1.0, 1.0)};
    AgentState curr = step_kinematics(prev, a, dt);
    CollisionReport rep;
    rep.collided = rng.uniform() < 0.2;
    RewardBreakdown r = compute_reward(prev, curr, rep, cfg);
    CHECK(r.total == r.r_goal + r.r_collision + r.r_rotational);
    // With speeds bounded by 1 m/s, per-step progress is at most v*dt.
    CHECK(r.total >= -15.0 - 2.5 * dt - 0.1 - 1e-12);
    CHECK(r.total <= 15.0 + 2.5 * dt + 1e-12);
  }
}

TEST_CASE("potential shaping telescopes over collision-free paths") {
  RewardConfig cfg;
  Rng rng(5);
  AgentState state = agent_at({-3.0, 0.0}, {3.5, 3.5});
  const double d0 = (state.position - state.goal).norm();
  double sum_goal = 0.0;
  AgentState prev = state;
  for (int t = 0; t < 100; ++t) {
    Action a{rng.uniform(0.0, 0.3), rng.uniform(-1.0, 1.0)};
    AgentState next = step_kinematics(prev, a, 0.1);
    CollisionReport none;
    sum_goal += compute_reward(prev, next, none, cfg).r_goal;
    prev = next;
  }
  const double dT = (prev.position - prev.goal).norm();
  CHECK(sum_goal == doctest::Approx(cfg.omega_g * (d0 - dT)).epsilon(1e-10));
}

TEST_CASE("goal transforms into the local polar frame") {
  AgentState a = agent_at({0.0, 0.0}, {1.0, 1.0}, kPi / 2.0);
  auto [dist, bearing] = goal_in_local_frame(a);
  CHECK(dist == doctest::Approx(std::sqrt(2.0)));
  CHECK(bearing == doctest::Approx(-kPi / 4.0));

  // Rotation-matrix oracle over random poses.
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    AgentState s = agent_at({rng.uniform(-2, 2), rng.uniform(-2, 2)},
                            {rng.uniform(-2, 2), rng.uniform(-2, 2)},
                            rng.uniform(-kPi, kPi));
    auto [d, b] = goal_in_local_frame(s);
    const double gx = s.goal.x - s.position.x;
    const double gy = s.goal.y - s.position.y;
    const double lx = std::cos(-s.heading) * gx - std::sin(-s.heading) * gy;
    const double ly = std::sin(-s.heading) * gx + std::cos(-s.heading) * gy;
    CHECK(d * std::cos(b) == doctest::Approx(lx).epsilon(1e-9));
    CHECK(d * std::sin(b) == doctest::Approx(ly).epsilon(1e-9));
  }
}

TEST_CASE("assemble_observation replicates missing history") {
  std::deque<ObsFrame> history;
  CHECK_THROWS_AS(assemble_observation(history), std::invalid_argument);

  ObsFrame f1;
  f1.laser = {1.0};
  history.push_back(f1);
  Observation obs = assemble_observation(history);
  CHECK(obs.frames[0].laser[0] == 1.0);
  CHECK(obs.frames[1].laser[0] == 1.0);
  CHECK(obs.frames[2].laser[0] == 1.0);

  ObsFrame f2;
  f2.laser = {2.0};
  ObsFrame f3;
  f3.laser = {3.0};
  ObsFrame f4;
  f4.laser = {4.0};
  history.push_back(f2);
  history.push_back(f3);
  history.push_back(f4);
  obs = assemble_observation(history);  // frames B, C, D of A,B,C,D
  CHECK(obs.frames[0].laser[0] == 2.0);
  CHECK(obs.frames[1].laser[0] == 3.0);
  CHECK(obs.frames[2].laser[0] == 4.0);
}

TEST_CASE("empty-world reset reports all max-range lasers") {
  NavEnv env(small_env_config(), 1);
  ScenarioSpec spec;
  spec.kind = ScenarioKind::limitation_wall;
  spec.wall_width = 0.0;  // no wall at all
  spec.wall_distance = 2.0;
  auto results = env.reset(spec, 3);
  REQUIRE(results.size() == 1);
  for (double r : results[0].obs.current().laser) {
    CHECK(r == doctest::Approx(6.0));
  }
}

TEST_CASE("reset is deterministic and velocities start at zero") {
  NavEnv env_a(small_env_config(), 1);
  NavEnv env_b(small_env_config(), 1);
  ScenarioSpec spec = ScenarioSpec::parse("stage2_crossing");
  auto ra = env_a.reset(spec, 17);
  auto rb = env_b.reset(spec, 17);
  REQUIRE(ra.size() == rb.size());
  for (size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra[i].obs.current().laser == rb[i].obs.current().laser);
    CHECK(ra[i].obs.current().goal == rb[i].obs.current().goal);
    CHECK(ra[i].obs.current().velocity == std::array<double, 2>{0.0, 0.0});
  }
}

TEST_CASE("arrival, collision and timeout statuses with frozen agents") {
  EnvConfig cfg = small_env_config();
  cfg.max_episode_steps = 5;
  NavEnv env(cfg, 1);
  ScenarioSpec spec;
  spec.kind = ScenarioKind::limitation_wall;
  spec.wall_width = 0.0;
  spec.wall_distance = 0.35;  // goal at (2.0, ~0); start 0.35 m before origin
  env.reset(spec, 2);

  // Drive straight at full speed: reaches the goal region quickly.
  int arrived_step = -1;
  for (int t = 0; t < 5 && !env.episode_done(); ++t) {
    auto live = env.live_agents();
    std::vector<std::pair<int, Action>> actions;
    for (int a : live) actions.emplace_back(a, Action{1.0, 0.0});
    auto results = env.step(actions);
    for (const auto& r : results) {
      if (r.status == AgentStatus::arrived) {
        arrived_step = env.step_count();
        CHECK(r.reward.r_goal == 15.0);
      }
    }
  }
  if (arrived_step < 0) {
    // Distance 2.35 m cannot be covered in 5 steps at 1 m/s: timeout.
    CHECK(env.episode_done());
    CHECK(env.status(0) == AgentStatus::timeout);
  }
  CHECK(env.episode_done());
  CHECK_THROWS_AS(env.step({{0, Action{0.0, 0.0}}}), std::invalid_argument);
}

TEST_CASE("two agents stepped into contact collide with -15") {
  EnvConfig cfg = small_env_config();
  NavEnv env(cfg, 1);
  ScenarioSpec spec = ScenarioSpec::parse("stage2_crossing");
  spec.n_agents = 2;
  env.reset(spec, 4);

  // Agents start on a circle aimed at each other's antipode; walking the
  // line must produce an agent-agent collision near the middle.
  bool collided = false;
  double collision_reward = 0.0;
  for (int t = 0; t < 150 && !env.episode_done(); ++t) {
    std::vector<std::pair<int, Action>> actions;
    for (int a : env.live_agents()) actions.emplace_back(a, Action{1.0, 0.0});
    auto results = env.step(actions);
    for (const auto& r : results) {
      if (r.status == AgentStatus::collided) {
        collided = true;
        collision_reward = r.reward.r_collision;
      }
    }
  }
  CHECK(collided);
  CHECK(collision_reward == -15.0);
}

TEST_CASE("finished agents vanish from subsequent results") {
  EnvConfig cfg = small_env_config();
  cfg.max_episode_steps = 150;
  NavEnv env(cfg, 1);
  ScenarioSpec spec = ScenarioSpec::parse("stage2_crossing");
  spec.n_agents = 2;
  env.reset(spec, 4);

  size_t last_count = 2;
  while (!env.episode_done()) {
    std::vector<std::pair<int, Action>> actions;
    for (int a : env.live_agents()) actions.emplace_back(a, Action{1.0, 0.0});
    auto results = env.step(actions);
    CHECK(results.size() <= last_count);
    CHECK(results.size() == actions.size());
    last_count = results.size();
  }
}

TEST_CASE("step sequence is fully deterministic without augmentation") {
  auto run = [] {
    NavEnv env(small_env_config(), 9);
    ScenarioSpec spec = ScenarioSpec::parse("test_random");
    spec.n_agents = 2;
    env.reset(spec, 11);
    std::vector<double> trace;
    Rng rng(3);
    while (!env.episode_done() && env.step_count() < 40) {
      std::vector<std::pair<int, Action>> actions;
      for (int a : env.live_agents()) {
        actions.emplace_back(a, Action{rng.uniform(0.0, 1.0), rng.uniform(-1.0, 1.0)});
      }
      for (const auto& r : env.step(actions)) {
        trace.push_back(r.reward.total);
        for (double v : r.obs.current().laser) trace.push_back(v);
      }
    }
    return trace;
  };
  CHECK(run() == run());
}

TEST_CASE("augmentation is seed-deterministic and training-only") {
  AppConfig app;
  app.camera.height = 24;
  app.camera.width = 32;
  app.finalize();

  EnvConfig plain = make_env_config(app, /*augment=*/false);
  EnvConfig noisy = make_env_config(app, /*augment=*/true);
  CHECK_FALSE(plain.augment);
  CHECK(noisy.augment);

  NavEnv a(noisy, 42), b(noisy, 42), c(noisy, 43);
  ScenarioSpec spec = ScenarioSpec::parse("single_obstacle:fire_hydrant");
  auto ra = a.reset(spec, 5);
  auto rb = b.reset(spec, 5);
  auto rc = c.reset(spec, 5);
  CHECK(ra[0].obs.current().laser == rb[0].obs.current().laser);
  CHECK(ra[0].obs.current().laser != rc[0].obs.current().laser);
}
