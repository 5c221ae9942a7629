#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plnav/eval/evaluate.hpp"
#include "plnav/io.hpp"

using namespace plnav;
using namespace plnav::eval;
using nn::PolicyConfig;
using nn::PolicyNetwork;

namespace {

AppConfig small_app() {
  AppConfig cfg;
  cfg.camera.height = 16;
  cfg.camera.width = 16;
  cfg.policy.hidden = 32;
  cfg.policy.feg_channels = 8;
  cfg.policy.trunk_channels = 8;
  cfg.policy.trunk_dense = 16;
  cfg.finalize();
  return cfg;
}

ScenarioSpec open_run(double distance) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::limitation_wall;
  spec.wall_width = 0.0;
  spec.wall_distance = distance;
  return spec;
}

}  // namespace

TEST_CASE("metrics identities hold and counts partition the trials") {
  AppConfig cfg = small_app();
  // Scripted always-arrive: straight ahead at full speed in an empty lane.
  int n = 12;
  Metrics m;
  std::vector<double> times;
  for (int i = 0; i < n; ++i) {
    TrialRecord r = run_scripted_episode(cfg, open_run(1.0), 100 + i,
                                         [](const Observation&) {
                                           return Action{1.0, 0.0};
                                         });
    m.n_trials += 1;
    if (r.outcome == AgentStatus::arrived) {
      m.n_success += 1;
      times.push_back(r.sim_time);
    } else if (r.outcome == AgentStatus::collided) {
      m.n_collision += 1;
    } else {
      m.n_timeout += 1;
    }
  }
  CHECK(m.n_success == n);
  CHECK(m.n_success + m.n_collision + m.n_timeout == m.n_trials);
}

TEST_CASE("scripted full-throttle into a wall always collides") {
  AppConfig cfg = small_app();
  ScenarioSpec spec;
  spec.kind = ScenarioKind::limitation_wall;
  spec.wall_width = 4.0;
  spec.wall_distance = 1.5;
  int collisions = 0;
  for (int i = 0; i < 10; ++i) {
    TrialRecord r = run_scripted_episode(cfg, spec, 200 + i, [](const Observation&) {
      return Action{1.0, 0.0};
    });
    if (r.outcome == AgentStatus::collided) ++collisions;
  }
  CHECK(collisions == 10);
}

TEST_CASE("run_eval aggregates seeded trials deterministically") {
  AppConfig cfg = small_app();
  PolicyNetwork policy(cfg.policy, 4);
  EvalRun a = run_eval(policy, cfg, open_run(1.2), 6, 31);
  EvalRun b = run_eval(policy, cfg, open_run(1.2), 6, 31);
  CHECK(a.metrics.n_trials == 6);
  CHECK(a.metrics.n_success == b.metrics.n_success);
  CHECK(a.metrics.n_collision == b.metrics.n_collision);
  CHECK(a.metrics.n_timeout == b.metrics.n_timeout);
  CHECK(a.metrics.success_rate ==
        doctest::Approx(static_cast<double>(a.metrics.n_success) / 6.0));
  for (size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].outcome == b.trials[i].outcome);
    CHECK(a.trials[i].steps == b.trials[i].steps);
  }
  // Counts must replay from the per-trial log.
  int succ = 0, coll = 0, tout = 0;
  for (const TrialRecord& t : a.trials) {
    succ += t.outcome == AgentStatus::arrived;
    coll += t.outcome == AgentStatus::collided;
    tout += t.outcome == AgentStatus::timeout;
  }
  CHECK(succ == a.metrics.n_success);
  CHECK(coll == a.metrics.n_collision);
  CHECK(tout == a.metrics.n_timeout);
}

TEST_CASE("average_time is absent when nothing succeeds") {
  AppConfig cfg = small_app();
  PolicyNetwork policy(cfg.policy, 4);
  // Freeze the policy output near zero speed: guaranteed timeouts.
  for (nn::Param* p : policy.params().all()) p->value.data.setZero();
  policy.params().find("actor.head.bias").value.data[0] = -30.0;  // v ~ 0
  cfg.trainer.max_episode_steps = 10;
  EvalRun run = run_eval(policy, cfg, open_run(2.0), 4, 77);
  CHECK(run.metrics.n_success == 0);
  CHECK_FALSE(run.metrics.average_time.has_value());
  CHECK(run.metrics.n_timeout == 4);
}

TEST_CASE("ablation table is a consistent cross product") {
  AppConfig cfg = small_app();
  PolicyNetwork policy(cfg.policy, 4);
  std::vector<AblationSpec> specs(2);
  specs[0].sensing = SensingVariant::depth_minpool_semantic;
  specs[1].sensing = SensingVariant::ideal_laser_bottom;
  std::vector<std::string> scenarios = {"limitation_wall:w=0,d=1.2",
                                        "limitation_wall:w=0,d=1.6"};
  AblationTable table = run_ablation(policy, cfg, specs, scenarios, 3, 5);
  REQUIRE(table.rows.size() == 4);
  for (const AblationRow& row : table.rows) {
    CHECK(row.metrics.n_trials == 3);
    CHECK(row.metrics.n_success + row.metrics.n_collision + row.metrics.n_timeout == 3);
  }
  // Degenerate cross product equals run_eval.
  EvalOptions opt;
  opt.sensing = specs[0].sensing;
  Metrics direct = run_eval(policy, cfg, make_scenario(cfg, scenarios[0]), 3, 5, opt)
                       .metrics;
  CHECK(table.rows[0].metrics.n_success == direct.n_success);
  const std::string csv = table.to_csv();
  CHECK(csv.find("ideal_laser_bottom") != std::string::npos);
  CHECK(table.to_text().find("limitation_wall") != std::string::npos);
}

TEST_CASE("sensing variants agree on full-height walls") {
  // In a world containing only full-height walls every variant reduces to
  // the same planar geometry along the shared column bearings.
  AppConfig cfg = small_app();
  WorldState world;
  world.bounds = {{-6, -6}, {6, 6}};
  AgentState a;
  a.camera_height = 0.3;
  world.agents = {a};
  world.obstacles.push_back(make_solid_box({2.5, 0.4}, 0.2, 3.0, 0.0, 0.8));
  world.obstacles.push_back(make_solid_box({1.2, -1.5}, 0.2, 1.2, 0.0, 0.8, 0.7));

  const PseudoLaser pipeline = pseudo_laser_from_camera(world, 0, cfg.camera);
  SensingConfig sensing = cfg.sensing;
  for (SensingVariant v :
       {SensingVariant::ideal_laser_bottom, SensingVariant::ideal_laser_top,
        SensingVariant::depth_minpool_semantic,
        SensingVariant::depth_minpool_semantic_noise}) {
    sensing.variant = v;
    PseudoLaser laser = sense_pseudo_laser(world, 0, cfg.camera, sensing);
    REQUIRE(laser.d_laser() == pipeline.d_laser());
    for (int j = 0; j < laser.d_laser(); ++j) {
      // Planar beams and column minima differ only by the sub-degree
      // elevation of the first lower-half pixel row.
      CAPTURE(to_string(v));
      CAPTURE(j);
      CHECK(std::abs(laser.ranges[j] - pipeline.ranges[j]) < 1e-2);
    }
  }
  // Without the semantic mask the floor stays in the pool, so the raw
  // min-pool can only read at or below the masked pipeline.
  sensing.variant = SensingVariant::depth_minpool;
  PseudoLaser raw = sense_pseudo_laser(world, 0, cfg.camera, sensing);
  for (int j = 0; j < raw.d_laser(); ++j) {
    CHECK(raw.ranges[j] <= pipeline.ranges[j] + 1e-12);
  }
}

TEST_CASE("1-d slice variants read a single row") {
  AppConfig cfg = small_app();
  WorldState world;
  world.bounds = {{-6, -6}, {6, 6}};
  AgentState a;
  a.camera_height = 0.3;
  world.agents = {a};
  world.obstacles.push_back(make_special_floor(make_box({1.2, 0.0}, 1.2, 1.2)));

  SensingConfig sensing = cfg.sensing;
  sensing.slice_row_frac = 0.75;  // steep row: the floor is inside max_range
  sensing.variant = SensingVariant::depth_1d_slice;
  PseudoLaser raw = sense_pseudo_laser(world, 0, cfg.camera, sensing);
  sensing.variant = SensingVariant::depth_1d_semantic;
  PseudoLaser sem = sense_pseudo_laser(world, 0, cfg.camera, sensing);
  const int mid = cfg.camera.width / 2;
  CHECK(raw.ranges[mid] < cfg.camera.max_range);
  // The patch is non-traversable, so the semantic row keeps its reading.
  CHECK(sem.ranges[mid] == raw.ranges[mid]);

  // On plain floor the raw row reads floor range while the semantic row
  // masks it out to the sentinel.
  WorldState plain = world;
  plain.obstacles.clear();
  sensing.variant = SensingVariant::depth_1d_slice;
  PseudoLaser raw_plain = sense_pseudo_laser(plain, 0, cfg.camera, sensing);
  sensing.variant = SensingVariant::depth_1d_semantic;
  PseudoLaser sem_plain = sense_pseudo_laser(plain, 0, cfg.camera, sensing);
  CHECK(raw_plain.ranges[mid] < cfg.camera.max_range);
  CHECK(sem_plain.ranges[mid] == cfg.camera.max_range);
}

TEST_CASE("exported trajectories replay through the simulator") {
  AppConfig cfg = small_app();
  EpisodeLog log;
  log.trial = 0;
  log.agent = 0;
  ScenarioSpec spec = open_run(1.0);
  TrialRecord record = run_scripted_episode(
      cfg, spec, 42,
      [](const Observation& obs) {
        return Action{0.8, obs.current().goal[1] > 0 ? 0.2 : -0.2};
      },
      &log);
  REQUIRE(record.steps > 0);
  REQUIRE(static_cast<int>(log.steps.size()) == record.steps + 1);
  CHECK(log.steps.front().t == 0.0);

  // Replay the exported actions through the kinematics.
  WorldState world = spawn_scenario(spec, 42);
  AgentState s = world.agents[0];
  for (size_t i = 1; i < log.steps.size(); ++i) {
    s = step_kinematics(s, {log.steps[i].v, log.steps[i].w}, world.dt);
    CHECK(std::abs(s.position.x - log.steps[i].x) < 1e-9);
    CHECK(std::abs(s.position.y - log.steps[i].y) < 1e-9);
  }

  // Export: one CSV per agent-episode plus the scene JSON.
  const std::string dir = "test_traj_export";
  auto files = export_trajectories({log}, world, dir);
  REQUIRE(files.size() == 2);
  std::ifstream csv(files[0]);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "t,x,y,heading,v,w,r_goal,r_collision,r_rotational,r_total,done");
  int rows = 0;
  std::string line;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == static_cast<int>(log.steps.size()));
  std::filesystem::remove_all(dir);

  // Empty log set: no files, still a success.
  auto none = export_trajectories({}, world, dir);
  CHECK(none.empty());
  CHECK_FALSE(std::filesystem::exists(dir));
}

TEST_CASE("limitation sweep covers the grid and reports the distance quotient") {
  AppConfig cfg = small_app();
  PolicyNetwork policy(cfg.policy, 4);
  auto grid = run_limitation_sweep(policy, cfg, {0.0, 0.5}, {1.5, 3.0}, 2, 9);
  REQUIRE(grid.size() == 4);
  for (const LimitationCell& cell : grid) {
    CHECK(cell.distance_norm ==
          doctest::Approx(cell.distance / cfg.camera.max_range));
    CHECK(cell.success_rate >= 0.0);
    CHECK(cell.success_rate <= 1.0);
  }
  // Distance definition: 3.0 m against the 6 m camera range.
  CHECK(grid[2].distance_norm == doctest::Approx(0.5));
  const std::string csv = limitation_to_csv(grid);
  CHECK(csv.find("occupancy") == 0);
}

TEST_CASE("app config round-trips through json") {
  AppConfig cfg = small_app();
  cfg.trainer.learning_rate = 3e-4;
  cfg.trainer.kl_penalty_coeff = 0.002;
  cfg.noise.gaussian_scale = 0.05;
  cfg.reward.omega_g = 2.0;
  cfg.sensing.variant = SensingVariant::ideal_laser_top;
  cfg.agent_radius = 0.25;
  AppConfig back = app_config_from_json_text(app_config_to_json(cfg));
  CHECK(back.trainer.learning_rate == cfg.trainer.learning_rate);
  CHECK(back.trainer.kl_penalty_coeff == cfg.trainer.kl_penalty_coeff);
  CHECK(back.noise.gaussian_scale == cfg.noise.gaussian_scale);
  CHECK(back.reward.omega_g == cfg.reward.omega_g);
  CHECK(back.sensing.variant == cfg.sensing.variant);
  CHECK(back.agent_radius == cfg.agent_radius);
  CHECK(back.camera.width == cfg.camera.width);
  CHECK(back.policy.d_laser == cfg.camera.width);
  CHECK(config_compat_hash_hex(back) == config_compat_hash_hex(cfg));

  // Rejected configs.
  CHECK_THROWS(app_config_from_json_text("{\"trainer\":{\"gamma\":1.5}}"));
  CHECK_THROWS(app_config_from_json_text("{\"camera\":{\"width\":4}}"));
}

TEST_CASE("pgm and laser csv round trip") {
  AppConfig cfg = small_app();
  WorldState world = spawn_scenario("single_obstacle:fire_hydrant", 3);
  RenderResult r = render_scene(world, 0, cfg.camera);
  write_pgm("test_depth.pgm", r.depth);
  write_pgm("test_mask.pgm", r.mask);
  std::ifstream pgm("test_depth.pgm");
  std::string magic;
  pgm >> magic;
  CHECK(magic == "P2");

  PseudoLaser laser = pseudo_laser_from_camera(world, 0, cfg.camera);
  write_laser_csv("test_laser.csv", laser);
  PseudoLaser back = read_laser_csv("test_laser.csv", laser.max_range);
  REQUIRE(back.d_laser() == laser.d_laser());
  for (int j = 0; j < laser.d_laser(); ++j) {
    CHECK(back.ranges[j] == laser.ranges[j]);
  }
  std::filesystem::remove("test_depth.pgm");
  std::filesystem::remove("test_mask.pgm");
  std::filesystem::remove("test_laser.csv");
}
