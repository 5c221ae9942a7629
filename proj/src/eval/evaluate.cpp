#include "plnav/eval/evaluate.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "plnav/scenario.hpp"

namespace plnav::eval {

namespace {

void finalize_metrics(Metrics& m, const std::vector<double>& success_times) {
  m.success_rate = m.n_trials > 0 ? static_cast<double>(m.n_success) / m.n_trials : 0.0;
  if (!success_times.empty()) {
    double sum = 0.0;
    for (double t : success_times) sum += t;
    m.average_time = sum / static_cast<double>(success_times.size());
  }
}

StepRecord spawn_record(const AgentState& a) {
  StepRecord r;
  r.t = 0.0;
  r.x = a.position.x;
  r.y = a.position.y;
  r.heading = a.heading;
  return r;
}

}  // namespace

EvalRun run_eval(const PolicyNetwork& policy, const AppConfig& cfg,
                 const ScenarioSpec& scenario, int n_trials, uint64_t seed,
                 const EvalOptions& options) {
  EvalRun run;
  std::vector<double> success_times;

  AppConfig eval_cfg = cfg;
  eval_cfg.sensing.variant = options.sensing;
  if (options.max_episode_steps > 0) {
    eval_cfg.trainer.max_episode_steps = options.max_episode_steps;
  }

  for (int trial = 0; trial < n_trials; ++trial) {
    const uint64_t trial_seed = mix_seed(seed, static_cast<uint64_t>(trial));
    NavEnv env(make_env_config(eval_cfg, /*augment=*/false), mix_seed(trial_seed, 1));
    auto results = env.reset(scenario, trial_seed);
    if (trial == 0) run.sample_world = env.world();

    const int n_agents = static_cast<int>(env.world().agents.size());
    std::vector<nn::HiddenState> hidden(n_agents,
                                        nn::HiddenState::zeros(cfg.policy.hidden));
    std::vector<Observation> obs(n_agents);
    for (const AgentStepResult& r : results) obs[r.agent] = r.obs;

    std::vector<EpisodeLog> logs;
    if (options.record_trajectories) {
      logs.resize(n_agents);
      for (int a = 0; a < n_agents; ++a) {
        logs[a].trial = trial;
        logs[a].agent = a;
        logs[a].steps.push_back(spawn_record(env.world().agents[a]));
      }
    }

    TrialRecord record;
    record.seed = trial_seed;
    while (!env.episode_done()) {
      std::vector<std::pair<int, Action>> actions;
      for (int a : env.live_agents()) {
        auto out = policy.act(obs[a], hidden[a]);
        hidden[a] = out.hidden;
        actions.emplace_back(a, out.dist.mean_action());
      }
      auto step_results = env.step(actions);
      for (const AgentStepResult& r : step_results) {
        obs[r.agent] = r.obs;
        if (options.record_trajectories) {
          const AgentState& s = env.world().agents[r.agent];
          StepRecord sr;
          sr.t = env.step_count() * env.world().dt;
          sr.x = s.position.x;
          sr.y = s.position.y;
          sr.heading = s.heading;
          sr.v = s.linear_vel;
          sr.w = s.angular_vel / kMaxAngularSpeed;
          sr.reward = r.reward;
          sr.done = r.status != AgentStatus::running;
          logs[r.agent].steps.push_back(sr);
        }
        if (r.agent == 0 && r.status != AgentStatus::running) {
          record.outcome = r.status;
          record.steps = env.step_count();
          record.sim_time = env.step_count() * env.world().dt;
        }
      }
    }

    run.metrics.n_trials += 1;
    switch (record.outcome) {
      case AgentStatus::arrived:
        run.metrics.n_success += 1;
        success_times.push_back(record.sim_time);
        break;
      case AgentStatus::collided:
        run.metrics.n_collision += 1;
        break;
      default:
        run.metrics.n_timeout += 1;
        break;
    }
    run.trials.push_back(record);
    if (options.record_trajectories) {
      for (auto& log : logs) run.trajectories.push_back(std::move(log));
    }
  }

  finalize_metrics(run.metrics, success_times);
  return run;
}

std::string AblationSpec::label() const {
  std::ostringstream os;
  os << architecture << "-" << static_cast<int>(std::round(fov * 180.0 / kPi)) << "deg-"
     << to_string(sensing) << (augmentation ? "-noise" : "");
  return os.str();
}

std::string AblationTable::to_csv() const {
  std::ostringstream os;
  os << "architecture,fov_deg,sensing,augmentation,scenario,n_trials,n_success,"
        "n_collision,n_timeout,success_rate,average_time\n";
  for (const AblationRow& row : rows) {
    os << row.spec.architecture << ","
       << static_cast<int>(std::round(row.spec.fov * 180.0 / kPi)) << ","
       << to_string(row.spec.sensing) << "," << (row.spec.augmentation ? 1 : 0) << ","
       << row.scenario << "," << row.metrics.n_trials << "," << row.metrics.n_success
       << "," << row.metrics.n_collision << "," << row.metrics.n_timeout << ","
       << row.metrics.success_rate << ",";
    if (row.metrics.average_time.has_value()) os << *row.metrics.average_time;
    os << "\n";
  }
  return os.str();
}

std::string AblationTable::to_text() const {
  std::ostringstream os;
  os << std::left;
  os.width(44);
  os << "model";
  os.width(28);
  os << "scenario";
  os << "success  avg_time\n";
  for (const AblationRow& row : rows) {
    os.width(44);
    os << row.spec.label();
    os.width(28);
    os << row.scenario;
    std::ostringstream val;
    val.precision(3);
    val << row.metrics.success_rate << "    ";
    if (row.metrics.average_time.has_value()) {
      val << *row.metrics.average_time;
    } else {
      val << "-";
    }
    os << val.str() << "\n";
  }
  return os.str();
}

AblationTable run_ablation(const PolicyNetwork& policy, const AppConfig& cfg,
                           const std::vector<AblationSpec>& specs,
                           const std::vector<std::string>& scenarios, int n_trials,
                           uint64_t seed) {
  AblationTable table;
  for (const AblationSpec& spec : specs) {
    for (const std::string& scenario_id : scenarios) {
      EvalOptions options;
      options.sensing = spec.sensing;
      AblationRow row;
      row.spec = spec;
      row.scenario = scenario_id;
      row.metrics = run_eval(policy, cfg, make_scenario(cfg, scenario_id), n_trials,
                             seed, options)
                        .metrics;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::vector<LimitationCell> run_limitation_sweep(
    const PolicyNetwork& policy, const AppConfig& cfg,
    const std::vector<double>& occupancies, const std::vector<double>& distances,
    int n_trials, uint64_t seed) {
  std::vector<LimitationCell> grid;
  for (double d : distances) {
    for (double occ : occupancies) {
      ScenarioSpec spec;
      spec.kind = ScenarioKind::limitation_wall;
      spec.agent_radius = cfg.agent_radius;
      spec.camera_height = cfg.camera_height;
      spec.wall_distance = d;
      spec.wall_width =
          occ <= 0.0 ? 0.0 : 2.0 * d * std::tan(occ * cfg.camera.horizontal_fov / 2.0);
      LimitationCell cell;
      cell.occupancy = occ;
      cell.distance = d;
      cell.distance_norm = d / cfg.camera.max_range;
      cell.success_rate =
          run_eval(policy, cfg, spec, n_trials, seed).metrics.success_rate;
      grid.push_back(cell);
    }
  }
  return grid;
}

std::string limitation_to_csv(const std::vector<LimitationCell>& grid) {
  std::ostringstream os;
  os << "occupancy,distance_m,distance_norm,success_rate\n";
  for (const LimitationCell& cell : grid) {
    os << cell.occupancy << "," << cell.distance << "," << cell.distance_norm << ","
       << cell.success_rate << "\n";
  }
  return os.str();
}

std::vector<std::string> export_trajectories(const std::vector<EpisodeLog>& logs,
                                             const WorldState& world,
                                             const std::string& dir) {
  std::vector<std::string> written;
  if (logs.empty()) return written;
  std::filesystem::create_directories(dir);

  for (const EpisodeLog& log : logs) {
    std::ostringstream name;
    name << dir << "/trial" << log.trial << "_agent" << log.agent << ".csv";
    std::ofstream out(name.str());
    if (!out) throw std::runtime_error("cannot write trajectory: " + name.str());
    out.precision(17);
    out << "t,x,y,heading,v,w,r_goal,r_collision,r_rotational,r_total,done\n";
    for (const StepRecord& s : log.steps) {
      out << s.t << "," << s.x << "," << s.y << "," << s.heading << "," << s.v << ","
          << s.w << "," << s.reward.r_goal << "," << s.reward.r_collision << ","
          << s.reward.r_rotational << "," << s.reward.total << "," << (s.done ? 1 : 0)
          << "\n";
    }
    written.push_back(name.str());
  }

  const std::string scene_path = dir + "/scene.json";
  std::ofstream scene(scene_path);
  if (!scene) throw std::runtime_error("cannot write scene: " + scene_path);
  scene << scene_to_json(world);
  written.push_back(scene_path);
  return written;
}

TrialRecord run_scripted_episode(const AppConfig& cfg, const ScenarioSpec& scenario,
                                 uint64_t seed,
                                 const std::function<Action(const Observation&)>& policy,
                                 EpisodeLog* log) {
  NavEnv env(make_env_config(cfg, /*augment=*/false), mix_seed(seed, 1));
  auto results = env.reset(scenario, seed);
  const int n_agents = static_cast<int>(env.world().agents.size());
  std::vector<Observation> obs(n_agents);
  for (const AgentStepResult& r : results) obs[r.agent] = r.obs;
  if (log != nullptr) {
    log->steps.push_back(spawn_record(env.world().agents[0]));
  }

  TrialRecord record;
  record.seed = seed;
  while (!env.episode_done()) {
    std::vector<std::pair<int, Action>> actions;
    for (int a : env.live_agents()) actions.emplace_back(a, policy(obs[a]));
    auto step_results = env.step(actions);
    for (const AgentStepResult& r : step_results) {
      obs[r.agent] = r.obs;
      if (r.agent == 0) {
        if (log != nullptr) {
          const AgentState& s = env.world().agents[0];
          StepRecord sr;
          sr.t = env.step_count() * env.world().dt;
          sr.x = s.position.x;
          sr.y = s.position.y;
          sr.heading = s.heading;
          sr.v = s.linear_vel;
          sr.w = s.angular_vel / kMaxAngularSpeed;
          sr.reward = r.reward;
          sr.done = r.status != AgentStatus::running;
          log->steps.push_back(sr);
        }
        if (r.status != AgentStatus::running) {
          record.outcome = r.status;
          record.steps = env.step_count();
          record.sim_time = env.step_count() * env.world().dt;
        }
      }
    }
  }
  return record;
}

}  // namespace plnav::eval
